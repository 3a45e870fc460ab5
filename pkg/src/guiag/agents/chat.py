"""Agent backed by a chat-completion client."""

from __future__ import annotations

from typing import TYPE_CHECKING

from guiag.agents.base import BaseAgent
from guiag.protocol import render_step_prompt

if TYPE_CHECKING:
  from guiag.protocol import StepInput
  from guiag.synthesis.client import ChatClient, DecodeParams


class ChatAgent(BaseAgent):
  """Sends the rendered step prompt to a chat model and returns its reply verbatim."""

  def __init__(self, client: ChatClient, params: DecodeParams | None = None) -> None:
    """Bind the client and decoding parameters."""
    self.client = client
    self.params = params

  def act(self, step_input: StepInput) -> str:
    """Return the model's reply to the step prompt."""
    return self.client.complete(render_step_prompt(step_input), self.params)

  def __str__(self) -> str:
    """Include the model name."""
    return f"ChatAgent({self.client.info.model})"
