"""Agents that answer from known solutions."""

from __future__ import annotations

from typing import TYPE_CHECKING

from guiag.actions import Action, serialize_action
from guiag.agents.base import BaseAgent, scripted_output
from guiag.geometry import box_center

if TYPE_CHECKING:
  from collections.abc import Mapping, Sequence

  from guiag.geometry import NormBox
  from guiag.protocol import StepInput


class OracleAgent(BaseAgent):
  """Replays a fixed action plan, one action per step.

  Once the plan runs out the agent declares the task infeasible, so an episode whose plan was
  disturbed still terminates.
  """

  def __init__(self, plan: Sequence[Action]) -> None:
    """Store the plan."""
    self.plan = tuple(plan)

  def act(self, step_input: StepInput) -> str:
    """Return the planned action of step ``t`` with scripted reasoning."""
    if step_input.t < len(self.plan):
      action = self.plan[step_input.t]
    else:
      action = Action("set_task_status", status="infeasible")
    return scripted_output(step_input, action)


class GroundingOracleAgent(BaseAgent):
  """Answers grounding questions with the center of the gold box, keyed by observation id."""

  def __init__(self, gold: Mapping[str, NormBox]) -> None:
    """Store the gold boxes."""
    self.gold = dict(gold)

  def act(self, step_input: StepInput) -> str:
    """Return a single point action on the gold box center."""
    box = self.gold[step_input.observation.obs_id]
    name = "tap" if "tap" in step_input.action_space.enabled else "click"
    return serialize_action(Action(name, point=box_center(box)))
