"""Deterministic scripted GUI environment."""

from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

from numpy.random import default_rng

from guiag.actions import Action, action_from_envelope, require_valid
from guiag.env.checkers import evaluate
from guiag.env.state import EnvState
from guiag.errors import EnvStateError, ScriptError
from guiag.geometry import box_center, point_in_box
from guiag.logging import MORE_INFO, get_logger
from guiag.protocol import Observation, SceneElement

if TYPE_CHECKING:
  from guiag.actions import ActionSpaceConfig
  from guiag.env.script import AppScript, ElementSpec, Rule, Screen, SolutionStep, Task
  from guiag.geometry import NormPoint

logger = get_logger()

# actions whose target element is the one under their (first) point
_HIT_POINT = {
  "tap": "point",
  "click": "point",
  "hover": "point",
  "select": "point",
  "point_input": "point",
  "swipe": "start",
  "select_text": "start",
}
_FOCUSING = frozenset({"tap", "click", "select", "point_input"})


@dataclass(frozen=True, slots=True)
class StepOutcome:
  """Result of one environment step."""

  observation: Observation
  done: bool
  success: bool


def swipe_direction(start: NormPoint, end: NormPoint) -> str:
  """Return the dominant direction of a swipe; ties go to the horizontal axis."""
  dx = end.x - start.x
  dy = end.y - start.y
  if abs(dx) >= abs(dy):
    return "right" if dx >= 0 else "left"
  return "down" if dy > 0 else "up"


class MockEnv:
  """Runs one task of an app script.

  Point actions hit the top-most element whose box contains the point, in normalized space. A
  matching rule fires its effects and moves to its target screen; unmatched actions change nothing
  but still advance the step counter. Without a matching rule, ``back`` returns to the previous
  screen and ``home`` to the initial one.
  """

  def __init__(self, script: AppScript) -> None:
    """Bind the environment to a script; call `reset` before stepping."""
    self.script = script
    self.state: EnvState | None = None
    self.task: Task | None = None

  def reset(self, task_id: str) -> Observation:
    """Start ``task_id`` from the initial screen and return the first observation."""
    self.task = self.script.task(task_id)
    self.state = EnvState(
      task_id=task_id,
      screen=self.script.initial_screen,
      fields=self.script.editable_ids(),
      flags=dict(self.script.initial_flags),
    )
    logger.log(MORE_INFO, "Reset %s/%s at screen %s", self.script.app, task_id, self.state.screen)
    return self.observe()

  def _require_state(self) -> EnvState:
    if self.state is None:
      msg = "environment has not been reset"
      raise EnvStateError(msg)
    return self.state

  @property
  def screen(self) -> Screen:
    """Return the current screen."""
    return self.script.screens[self._require_state().screen]

  def _element_text(self, state: EnvState, element: ElementSpec) -> str:
    if element.flag is not None:
      return "on" if state.flags.get(element.flag, False) else "off"
    if element.editable:
      return state.fields.get(element.element_id, "")
    return element.text

  def observe(self) -> Observation:
    """Return the scene descriptor of the current screen."""
    state = self._require_state()
    screen = self.screen
    scene = tuple(
      SceneElement(
        element_id=element.element_id,
        role=element.role,
        label=element.label,
        box=element.box,
        editable=element.editable,
        text=self._element_text(state, element),
      )
      for element in screen.elements
    )
    return Observation(obs_id=f"{screen.screen_id}@{state.step}", dims=screen.dims, scene=scene, timestamp=state.step)

  def hit_test(self, point: NormPoint) -> ElementSpec | None:
    """Return the top-most element of the current screen containing ``point``."""
    for element in reversed(self.screen.elements):
      if point_in_box(point, element.box):
        return element
    return None

  def _matches(self, rule: Rule, action: Action, hit: ElementSpec | None) -> bool:
    trigger = rule.trigger
    if action.name not in trigger.actions:
      return False
    if trigger.element is not None and (hit is None or hit.element_id != trigger.element):
      return False
    if trigger.direction is not None:
      if action.name == "swipe" and action.start is not None and action.end is not None:
        return swipe_direction(action.start, action.end) == trigger.direction
      return action.direction == trigger.direction
    return True

  def _rule_fires(self, rule: Rule) -> bool:  # noqa: ARG002, PLR6301
    return True

  def _apply_effects(self, state: EnvState, rule: Rule) -> None:
    for effect in rule.effects:
      params = effect.params
      match effect.kind:
        case "set_flag":
          state.flags[params["flag"]] = bool(params.get("value", True))
        case "toggle_flag":
          state.flags[params["flag"]] = not state.flags.get(params["flag"], False)
        case "clear_fields":
          for name in params["fields"]:
            state.fields[name] = ""
        case "set_field":
          state.fields[params["field"]] = str(params["value"])
        case "record":
          state.records[params["name"]] = {name: state.fields.get(name, "") for name in params["fields"]}

  def _apply_builtin(self, state: EnvState, action: Action, hit: ElementSpec | None) -> None:
    if action.name in _FOCUSING and hit is not None and hit.editable:
      state.focus = hit.element_id
    if action.name == "point_input" and hit is not None and hit.editable:
      state.fields[hit.element_id] = action.text or ""
    elif action.name == "input" and state.focus is not None and self.screen.element(state.focus) is not None:
      state.fields[state.focus] = action.text or ""
    elif action.name == "remember" and action.content:
      state.notes.append(action.content)

  def _navigate(self, state: EnvState, target: str | None) -> None:
    if target is None or target == state.screen:
      return
    state.nav_stack.append(state.screen)
    state.screen = target
    state.focus = None

  def _navigate_builtin(self, state: EnvState, action: Action) -> None:
    if action.name == "back" and state.nav_stack:
      state.screen = state.nav_stack.pop()
      state.focus = None
    elif action.name == "home" and state.screen != self.script.initial_screen:
      state.screen = self.script.initial_screen
      state.nav_stack.clear()
      state.focus = None

  def _finish(self, state: EnvState, status: str) -> None:
    assert self.task is not None
    checks = all(evaluate(checker.kind, state, checker.params) for checker in self.task.checkers)
    state.done = True
    state.success = status == self.task.expected_status and checks
    logger.info("Task %s ended as %s (success=%s) after %d steps", state.task_id, status, state.success, state.step)

  def step(self, action: Action) -> StepOutcome:
    """Apply one action.

    Raises:
      EnvStateError: The environment was not reset or the task already ended.
    """
    state = self._require_state()
    if state.done:
      msg = f"task {state.task_id} already ended; reset before stepping"
      raise EnvStateError(msg)
    state.step += 1
    attr = _HIT_POINT.get(action.name)
    point = getattr(action, attr) if attr else None
    hit = self.hit_test(point) if point is not None else None
    self._apply_builtin(state, action, hit)

    rule = next(
      (rule for rule in self.script.rules if rule.screen == state.screen and self._matches(rule, action, hit)),
      None,
    )
    if rule is not None and self._rule_fires(rule):
      self._apply_effects(state, rule)
      self._navigate(state, rule.target)
    elif rule is None:
      self._navigate_builtin(state, action)

    if action.is_terminal:
      self._finish(state, action.status or "")
    logger.log(MORE_INFO, "Step %d: %s -> %s", state.step, action.name, state.screen)
    return StepOutcome(observation=self.observe(), done=state.done, success=state.success)

  def snapshot(self) -> dict[str, Any]:
    """Return a JSON-serializable snapshot of the full runtime state."""
    return self._require_state().as_dict()

  def restore(self, snapshot: dict[str, Any]) -> Observation:
    """Resume from a `snapshot`; future behavior matches the original run."""
    state = EnvState.from_dict(copy.deepcopy(snapshot))
    self.task = self.script.task(state.task_id)
    if state.screen not in self.script.screens:
      msg = f"snapshot screen {state.screen!r} is not part of app {self.script.app}"
      raise EnvStateError(msg)
    self.state = state
    return self.observe()


class StochasticMockEnv(MockEnv):
  """`MockEnv` whose matched rules fail to fire with probability ``failure_rate``."""

  def __init__(self, script: AppScript, failure_rate: float = 0.1, seed: int | None = None) -> None:
    """Seed the rule-failure generator."""
    if not 0.0 <= failure_rate <= 1.0:
      msg = f"failure_rate must be in [0, 1], got {failure_rate}"
      raise ValueError(msg)
    super().__init__(script)
    self.failure_rate = failure_rate
    self.generator = default_rng(seed)

  def _rule_fires(self, rule: Rule) -> bool:
    fires = bool(self.generator.random() >= self.failure_rate)
    if not fires:
      logger.debug("Rule on %s did not fire", rule.screen)
    return fires

  def snapshot(self) -> dict[str, Any]:
    """Include the generator state so resumed runs draw the same failures."""
    data = super().snapshot()
    data["rng"] = copy.deepcopy(self.generator.bit_generator.state)
    return data

  def restore(self, snapshot: dict[str, Any]) -> Observation:
    """Restore runtime state and generator state."""
    observation = super().restore({key: value for key, value in snapshot.items() if key != "rng"})
    if "rng" in snapshot:
      self.generator.bit_generator.state = copy.deepcopy(snapshot["rng"])
    return observation


def resolve_step(screen: Screen, step: SolutionStep, app: str) -> Action:
  """Turn a scripted solution step into an action on the given screen."""
  arguments = dict(step.arguments)
  if step.element is not None:
    element = screen.element(step.element)
    if element is None:
      msg = f"solution of {app} refers to element {step.element!r} missing from screen {screen.screen_id}"
      raise ScriptError(msg)
    arguments["point"] = box_center(element.box).as_dict()
  return action_from_envelope(step.name, arguments)


def oracle_agent(script: AppScript, task_id: str, cfg: ActionSpaceConfig | None = None) -> list[Action]:
  """Return the scripted solution of a task as concrete actions.

  The solution is replayed on a fresh environment so element references resolve against the screen
  that is current at each step, and the result is checked to succeed.

  Raises:
    ScriptError: The task has no solution or the solution does not succeed.
    ActionValidationError: A solution action is outside ``cfg`` (the app's platform space by default).
  """
  cfg = cfg or script.action_space
  task = script.task(task_id)
  if not task.solution:
    msg = f"task {task_id} has no scripted solution"
    raise ScriptError(msg)
  env = MockEnv(script)
  env.reset(task_id)
  actions = []
  outcome = None
  for step in task.solution:
    action = require_valid(resolve_step(env.screen, step, script.app), cfg)
    actions.append(action)
    outcome = env.step(action)
    if outcome.done:
      break
  if outcome is None or not outcome.success:
    msg = f"scripted solution of {task_id} does not succeed"
    raise ScriptError(msg)
  return actions
