"""Random-action GUI agent."""

from __future__ import annotations

from typing import TYPE_CHECKING

from numpy.random import default_rng

from guiag.actions import ACTION_SCHEMAS, DIRECTIONS, TASK_STATUSES, Action, ArgKind
from guiag.agents.base import BaseAgent, scripted_output
from guiag.geometry import SCALE, NormPoint

if TYPE_CHECKING:
  from collections.abc import Sequence

  from guiag.protocol import StepInput

WORDS = ("Alice", "hello", "On my way", "1234", "settings", "Dana")


class RandomAgent(BaseAgent):
  """A GUI agent that picks uniformly among the enabled actions.

  Arguments are drawn at random too: points anywhere on the 0-1000 grid, directions, statuses
  and text from a small vocabulary.
  """

  def __init__(self, seed: int | Sequence[int] | None = None) -> None:
    """Initialize the RandomAgent.

    Args:
      seed: Seed for the random number generator. ``None`` draws fresh entropy from the OS.
    """
    self.generator = default_rng(seed)

  def _point(self) -> NormPoint:
    x, y = self.generator.integers(0, SCALE + 1, size=2)
    return NormPoint(int(x), int(y))

  def random_action(self, names: list[str]) -> Action:
    """Draw one action among ``names`` with random arguments."""
    name = names[int(self.generator.integers(0, len(names)))]
    values: dict[str, object] = {}
    for spec in ACTION_SCHEMAS[name].args:
      match spec.kind:
        case ArgKind.POINT:
          values[spec.attr] = self._point()
        case ArgKind.DIRECTION:
          values[spec.attr] = DIRECTIONS[int(self.generator.integers(0, len(DIRECTIONS)))]
        case ArgKind.STATUS:
          values[spec.attr] = TASK_STATUSES[int(self.generator.integers(0, len(TASK_STATUSES)))]
        case ArgKind.TEXT:
          values[spec.attr] = WORDS[int(self.generator.integers(0, len(WORDS)))]
    return Action(name, **values)  # type: ignore[arg-type]

  def act(self, step_input: StepInput) -> str:
    """Return a random valid action with scripted reasoning."""
    return scripted_output(step_input, self.random_action(step_input.action_space.ordered()))
