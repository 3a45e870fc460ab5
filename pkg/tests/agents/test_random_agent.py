from __future__ import annotations

from guiag.actions import MOBILE_SPACE, ActionSpaceConfig, validate_action
from guiag.agents.random import RandomAgent
from guiag.geometry import NormBox, ScreenDims
from guiag.protocol import Observation, SceneElement, build_step_input, new_episode, parse_step_output

OBSERVATION = Observation(
  "home@0", ScreenDims(1080, 2400), scene=(SceneElement("ok", "button", "OK", NormBox(400, 400, 600, 450)),)
)


def test_random_agent_returns_a_valid_action_in_the_space() -> None:
  step_input = build_step_input(new_episode("Press OK", cfg=MOBILE_SPACE), OBSERVATION)
  agent = RandomAgent(seed=0)

  for _ in range(20):
    _, action = parse_step_output(agent.act(step_input), 0)
    assert validate_action(action, MOBILE_SPACE)


def test_random_agent_is_reproducible_from_its_seed() -> None:
  step_input = build_step_input(new_episode("Press OK"), OBSERVATION)

  first = [RandomAgent(seed=[4, 2]).act(step_input) for _ in range(3)]
  second = [RandomAgent(seed=[4, 2]).act(step_input) for _ in range(3)]

  assert first == second


def test_random_agent_draws_only_enabled_names() -> None:
  agent = RandomAgent(seed=1)

  names = {agent.random_action(["back", "home"]).name for _ in range(30)}

  assert names == {"back", "home"}
  assert ActionSpaceConfig.of(["back", "home"]).ordered() == ["home", "back"]
