"""Core episode loop."""

from __future__ import annotations

from typing import TYPE_CHECKING

from tqdm import tqdm

from guiag.actions import require_valid
from guiag.config import PARSE_ERROR_POLICIES
from guiag.episode.results import EpisodeResult
from guiag.errors import ActionError, EpisodeConfigError, ProtocolError
from guiag.logging import MORE_INFO, get_logger
from guiag.protocol import (
  EpisodeStatus,
  build_step_input,
  new_episode,
  parse_step_output,
  record_step,
  step_log_entry,
  write_step_log,
)

if TYPE_CHECKING:
  from pathlib import Path

  from guiag.agents import BaseAgent
  from guiag.env import MockEnv

logger = get_logger()


def run_episode(
  env: MockEnv,
  task_id: str,
  agent: BaseAgent,
  budget: int,
  *,
  window_size: int = 2,
  on_parse_error: str = "abort",
  describe_history: bool = True,
  step_log: str | Path | None = None,
) -> EpisodeResult:
  """Play one task until the agent ends it or the step budget runs out.

  Each step builds the agent input, parses the agent's answer, applies the action to the environment
  and records it. Output that does not parse, or whose action is outside the app's action space, is
  a parse miss: ``abort`` ends the episode as a failure, ``skip`` spends a step of the budget and
  asks again.

  Args:
    env: Environment to play in; it is reset to ``task_id``.
    task_id: Task to play.
    agent: Agent answering each step.
    budget: Maximum number of steps, including skipped ones.
    window_size: Number of past steps the agent sees.
    on_parse_error: Policy for parse misses.
    describe_history: Show past observations as one-line summaries instead of full scenes.
    step_log: Optional path of an NDJSON log of the recorded steps.

  Returns:
    The episode result.
  """
  if on_parse_error not in PARSE_ERROR_POLICIES:
    msg = f"on_parse_error must be one of {PARSE_ERROR_POLICIES}, got {on_parse_error!r}"
    raise EpisodeConfigError(msg)
  observation = env.reset(task_id)
  task = env.script.task(task_id)
  if budget <= 0:
    logger.info("Task %s has no step budget", task_id)
    return EpisodeResult(task_id, task.difficulty, False, 0, str(EpisodeStatus.EXHAUSTED), str(agent))

  state = new_episode(
    task.goal, window_size, env.script.action_space, max_steps=budget, describe_history=describe_history
  )
  entries = []
  used = 0
  parse_misses = 0
  success = False
  status = EpisodeStatus.RUNNING
  pbar = tqdm(total=budget, unit="step", desc=task_id, leave=False)
  while not state.is_terminal and used < budget:
    output = agent.act(build_step_input(state, observation))
    used += 1
    pbar.update(1)
    try:
      record, action = parse_step_output(output, state.t, strict=False)
      require_valid(action, state.action_space)
    except (ProtocolError, ActionError) as err:
      parse_misses += 1
      logger.warning("Unparseable output at step %d of %s: %s", state.t, task_id, err)
      if on_parse_error == "abort":
        status = EpisodeStatus.ABORTED
        break
      continue
    outcome = env.step(action)
    state = record_step(state, observation, record, action)
    observation = outcome.observation
    success = outcome.success
    entries.append(step_log_entry(state.t - 1, state.steps[-1], state.status))
    logger.log(MORE_INFO, "%s step %d: %s", task_id, state.t - 1, action.name)
  pbar.close()

  if status is not EpisodeStatus.ABORTED:
    status = state.status if state.is_terminal else EpisodeStatus.EXHAUSTED
  if step_log is not None:
    write_step_log(step_log, entries)
  result = EpisodeResult(task_id, task.difficulty, success, used, str(status), str(agent), parse_misses)
  logger.info("%s", result)
  return result
