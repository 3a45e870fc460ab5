"""Scripted GUI environment: app scripts, task checkers and the step loop."""

from .env import MockEnv as MockEnv
from .env import StepOutcome as StepOutcome
from .env import StochasticMockEnv as StochasticMockEnv
from .env import oracle_agent as oracle_agent
from .script import AppScript as AppScript
from .script import Task as Task
from .script import all_tasks as all_tasks
from .script import bundled_scripts as bundled_scripts
from .script import find_task as find_task
from .script import load_script as load_script
from .script import script_from_dict as script_from_dict
from .state import EnvState as EnvState
