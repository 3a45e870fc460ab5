from __future__ import annotations

from guiag.agents import ChatAgent
from guiag.geometry import NormBox, ScreenDims
from guiag.protocol import Observation, SceneElement, build_step_input, new_episode, render_step_prompt
from guiag.synthesis import StubChatClient

OBSERVATION = Observation(
  "home@0", ScreenDims(1080, 2400), scene=(SceneElement("ok", "button", "OK", NormBox(400, 400, 600, 450)),)
)


def test_chat_agent_sends_the_rendered_prompt() -> None:
  client = StubChatClient(canned={"Press OK": "a reply"})
  step_input = build_step_input(new_episode("Press OK"), OBSERVATION)
  agent = ChatAgent(client)

  reply = agent.act(step_input)

  assert reply == "a reply"
  assert client.calls == [render_step_prompt(step_input)]
  assert str(agent) == "ChatAgent(stub)"
