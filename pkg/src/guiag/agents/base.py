"""Base agent interface."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

from guiag.actions import serialize_action
from guiag.protocol import ReasoningRecord, render_step_output, summarize_scene

if TYPE_CHECKING:
  from guiag.actions import Action
  from guiag.protocol import StepInput


class BaseAgent(ABC):
  """Abstract base class for GUI agents.

  An agent sees only the `StepInput` of the current step and answers with model output text in the
  structured step format. Everything it knows about the episode arrives through that input.
  """

  @abstractmethod
  def act(self, step_input: StepInput) -> str:
    """Return the model output for one step.

    Args:
      step_input: Goal, current observation, history window and action space.

    Returns:
      Structured output with reasoning sections and an action envelope.
    """

  def close(self) -> None:
    """Release any external resources held by the agent."""

  def __str__(self) -> str:
    """Return a string representation of the agent."""
    return self.__class__.__name__


def scripted_reasoning(step_input: StepInput, action: Action) -> ReasoningRecord:
  """Fill every reasoning section with short fixed text around ``action``."""
  reflection = None
  if step_input.t > 0:
    reflection = f"After the previous action the screen shows: {summarize_scene(step_input.observation)}"
  return ReasoningRecord(
    reflection=reflection,
    strategic_summary=f"Working on '{step_input.goal}', {step_input.t} steps taken so far.",
    strategic_planning=f"Next sub-goal: perform {action.name}.",
    tactical=f"Execute {serialize_action(action)}.",
    expectation=f"The screen reflects the effect of {action.name}.",
  )


def scripted_output(step_input: StepInput, action: Action) -> str:
  """Render ``action`` with scripted reasoning in the structured step format."""
  return render_step_output(scripted_reasoning(step_input, action), action)
