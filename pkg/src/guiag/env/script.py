"""App scripts: screens, transition rules and tasks of a scripted GUI application.

Scripts are JSON documents::

  {
    "app": "contacts", "platform": "mobile", "dims": {"width": 1080, "height": 2400},
    "initial_screen": "home", "initial_flags": {"wifi": true},
    "screens": [{"id": "home", "elements": [{"id": "tab_contacts", "role": "tab", "label": "Contacts",
                                             "box": {"x1": 666, "y1": 920, "x2": 1000, "y2": 1000}}]}],
    "rules": [{"screen": "home", "trigger": {"actions": ["tap"], "element": "tab_contacts"},
               "target": "contacts_list", "effects": [{"kind": "set_flag", "flag": "seen"}]}],
    "tasks": [{"id": "open_contacts_tab", "goal": "...", "difficulty": "easy",
               "checkers": [{"kind": "screen_is", "screen": "contacts_list"}],
               "solution": [{"name": "tap", "element": "tab_contacts"},
                            {"name": "set_task_status", "arguments": {"status": "complete"}}],
               "expected_status": "complete"}]
  }

Element boxes are normalized. An element with ``"flag"`` renders its text as ``on``/``off``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cache
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Any

from guiag.actions import CANONICAL_NAMES, DIRECTIONS, PLATFORM_SPACES, ActionSpaceConfig
from guiag.env.checkers import CHECKERS
from guiag.errors import GeometryError, ScriptError, TaskLookupError
from guiag.geometry import NormBox, ScreenDims, box_from_json

if TYPE_CHECKING:
  from collections.abc import Mapping

DIFFICULTIES = ("easy", "middle", "hard")
EFFECT_PARAMS = {
  "set_flag": ("flag",),
  "toggle_flag": ("flag",),
  "clear_fields": ("fields",),
  "set_field": ("field", "value"),
  "record": ("name", "fields"),
}


@dataclass(frozen=True, slots=True)
class ElementSpec:
  """Static description of one on-screen element."""

  element_id: str
  role: str
  label: str
  box: NormBox
  editable: bool = False
  text: str = ""
  flag: str | None = None


@dataclass(frozen=True, slots=True)
class Screen:
  """One screen of the app; later elements are drawn on top of earlier ones."""

  screen_id: str
  dims: ScreenDims
  elements: tuple[ElementSpec, ...]

  def element(self, element_id: str) -> ElementSpec | None:
    """Return the element with this id, if present."""
    return next((element for element in self.elements if element.element_id == element_id), None)


@dataclass(frozen=True, slots=True)
class Trigger:
  """Action pattern a rule reacts to."""

  actions: frozenset[str]
  element: str | None = None
  direction: str | None = None


@dataclass(frozen=True, slots=True)
class Effect:
  """State mutation applied when a rule fires."""

  kind: str
  params: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, slots=True)
class Rule:
  """Transition: on ``screen``, when ``trigger`` matches, apply effects and move to ``target``."""

  screen: str
  trigger: Trigger
  target: str | None = None
  effects: tuple[Effect, ...] = ()


@dataclass(frozen=True, slots=True)
class Checker:
  """Named success predicate with its parameters."""

  kind: str
  params: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, slots=True)
class SolutionStep:
  """One scripted action; ``element`` stands for a point at that element's box center."""

  name: str
  element: str | None = None
  arguments: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, slots=True)
class Task:
  """A goal with its success checkers and a scripted solution path."""

  task_id: str
  goal: str
  difficulty: str
  checkers: tuple[Checker, ...]
  solution: tuple[SolutionStep, ...] = ()
  expected_status: str = "complete"


@dataclass(frozen=True, slots=True)
class AppScript:
  """A complete scripted application."""

  app: str
  platform: str
  dims: ScreenDims
  initial_screen: str
  screens: dict[str, Screen]
  rules: tuple[Rule, ...]
  tasks: dict[str, Task]
  initial_flags: dict[str, bool] = field(default_factory=dict)

  def __post_init__(self) -> None:
    """Check cross references."""
    validate_script(self)

  @property
  def action_space(self) -> ActionSpaceConfig:
    """Return the action space of the app's platform."""
    return PLATFORM_SPACES.get(self.platform, PLATFORM_SPACES["full"])

  def task(self, task_id: str) -> Task:
    """Look up a task by id."""
    try:
      return self.tasks[task_id]
    except KeyError:
      msg = f"unknown task {task_id!r} in app {self.app}; known tasks: {', '.join(sorted(self.tasks))}"
      raise TaskLookupError(msg) from None

  def editable_ids(self) -> dict[str, str]:
    """Return initial text of every editable element, keyed by element id."""
    return {
      element.element_id: element.text
      for screen in self.screens.values()
      for element in screen.elements
      if element.editable
    }


def _validate_screens(script: AppScript) -> None:
  if script.initial_screen not in script.screens:
    msg = f"initial screen {script.initial_screen!r} does not exist"
    raise ScriptError(msg)
  editable_seen: set[str] = set()
  for screen in script.screens.values():
    ids = [element.element_id for element in screen.elements]
    if len(ids) != len(set(ids)):
      msg = f"screen {screen.screen_id} repeats element ids"
      raise ScriptError(msg)
    for element in screen.elements:
      if not element.editable:
        continue
      if element.element_id in editable_seen:
        msg = f"editable element id {element.element_id!r} is used on more than one screen"
        raise ScriptError(msg)
      editable_seen.add(element.element_id)


def _validate_rules(script: AppScript) -> None:
  for rule in script.rules:
    screen = script.screens.get(rule.screen)
    if screen is None:
      msg = f"rule refers to unknown screen {rule.screen!r}"
      raise ScriptError(msg)
    if rule.target is not None and rule.target not in script.screens:
      msg = f"rule on {rule.screen} targets unknown screen {rule.target!r}"
      raise ScriptError(msg)
    if rule.trigger.element is not None and screen.element(rule.trigger.element) is None:
      msg = f"rule on {rule.screen} triggers on unknown element {rule.trigger.element!r}"
      raise ScriptError(msg)
    unknown = sorted(rule.trigger.actions - set(CANONICAL_NAMES))
    if unknown or not rule.trigger.actions:
      msg = f"rule on {rule.screen} has invalid trigger actions {unknown or '[]'}"
      raise ScriptError(msg)
    if rule.trigger.direction is not None and rule.trigger.direction not in DIRECTIONS:
      msg = f"rule on {rule.screen} has invalid direction {rule.trigger.direction!r}"
      raise ScriptError(msg)
    for effect in rule.effects:
      if effect.kind not in EFFECT_PARAMS:
        msg = f"unknown rule effect {effect.kind!r}"
        raise ScriptError(msg)
      missing = [name for name in EFFECT_PARAMS[effect.kind] if name not in effect.params]
      if missing:
        msg = f"{effect.kind} effect is missing {', '.join(missing)}"
        raise ScriptError(msg)


def _validate_tasks(script: AppScript) -> None:
  for task in script.tasks.values():
    if not task.checkers:
      msg = f"task {task.task_id} needs at least one checker"
      raise ScriptError(msg)
    if task.difficulty not in DIFFICULTIES:
      msg = f"task {task.task_id} has unknown difficulty {task.difficulty!r}"
      raise ScriptError(msg)
    if task.expected_status not in {"complete", "infeasible"}:
      msg = f"task {task.task_id} has invalid expected status {task.expected_status!r}"
      raise ScriptError(msg)
    for checker in task.checkers:
      if checker.kind not in CHECKERS:
        msg = f"task {task.task_id} uses unknown checker {checker.kind!r}"
        raise ScriptError(msg)
      missing = [name for name in CHECKERS[checker.kind][1] if name not in checker.params]
      if missing:
        msg = f"{checker.kind} checker of {task.task_id} is missing {', '.join(missing)}"
        raise ScriptError(msg)


def validate_script(script: AppScript) -> None:
  """Raise `ScriptError` on dangling references or malformed rules and tasks."""
  _validate_screens(script)
  _validate_rules(script)
  _validate_tasks(script)


def _element_from_dict(data: Mapping[str, Any]) -> ElementSpec:
  return ElementSpec(
    element_id=str(data["id"]),
    role=str(data.get("role", "element")),
    label=str(data.get("label", "")),
    box=box_from_json(data["box"]),
    editable=bool(data.get("editable", False)),
    text=str(data.get("text", "")),
    flag=data.get("flag"),
  )


def _rule_from_dict(data: Mapping[str, Any]) -> Rule:
  trigger = data["trigger"]
  effects = []
  for raw in data.get("effects", []):
    params = {key: value for key, value in raw.items() if key != "kind"}
    effects.append(Effect(kind=raw["kind"], params=params))
  return Rule(
    screen=data["screen"],
    trigger=Trigger(
      actions=frozenset(trigger["actions"]),
      element=trigger.get("element"),
      direction=trigger.get("direction"),
    ),
    target=data.get("target"),
    effects=tuple(effects),
  )


def _task_from_dict(data: Mapping[str, Any]) -> Task:
  checkers = tuple(
    Checker(kind=raw["kind"], params={key: value for key, value in raw.items() if key != "kind"})
    for raw in data.get("checkers", [])
  )
  solution = tuple(
    SolutionStep(name=raw["name"], element=raw.get("element"), arguments=dict(raw.get("arguments", {})))
    for raw in data.get("solution", [])
  )
  return Task(
    task_id=data["id"],
    goal=data["goal"],
    difficulty=data.get("difficulty", "easy"),
    checkers=checkers,
    solution=solution,
    expected_status=data.get("expected_status", "complete"),
  )


def script_from_dict(data: Mapping[str, Any]) -> AppScript:
  """Decode and validate an app script."""
  try:
    dims = ScreenDims.from_dict(data["dims"])
    screens = {
      raw["id"]: Screen(raw["id"], dims, tuple(_element_from_dict(element) for element in raw.get("elements", [])))
      for raw in data["screens"]
    }
    tasks = [_task_from_dict(raw) for raw in data.get("tasks", [])]
    task_map = {task.task_id: task for task in tasks}
    if len(task_map) != len(tasks):
      msg = "task ids must be unique"
      raise ScriptError(msg)
    return AppScript(
      app=data["app"],
      platform=data.get("platform", "mobile"),
      dims=dims,
      initial_screen=data["initial_screen"],
      screens=screens,
      rules=tuple(_rule_from_dict(raw) for raw in data.get("rules", [])),
      tasks=task_map,
      initial_flags={name: bool(value) for name, value in data.get("initial_flags", {}).items()},
    )
  except (KeyError, TypeError, AttributeError, GeometryError) as err:
    msg = f"malformed app script: {err!r}"
    raise ScriptError(msg) from err


def load_script(path: str | Path) -> AppScript:
  """Load an app script from a JSON file."""
  with Path(path).open(encoding="utf-8") as f:
    return script_from_dict(json.load(f))


@cache
def bundled_scripts() -> dict[str, AppScript]:
  """Return the scripts shipped with the package, keyed by app name."""
  scripts = {}
  apps = resources.files("guiag.data").joinpath("apps")
  for entry in sorted(apps.iterdir(), key=lambda item: item.name):
    if entry.name.endswith(".json"):
      script = script_from_dict(json.loads(entry.read_text(encoding="utf-8")))
      scripts[script.app] = script
  return scripts


def find_task(task_id: str, scripts: Mapping[str, AppScript] | None = None) -> tuple[AppScript, Task]:
  """Locate a task among scripts (the bundled ones by default)."""
  scripts = bundled_scripts() if scripts is None else scripts
  for script in scripts.values():
    if task_id in script.tasks:
      return script, script.tasks[task_id]
  msg = f"unknown task {task_id!r}"
  raise TaskLookupError(msg)


def all_tasks(scripts: Mapping[str, AppScript] | None = None) -> list[tuple[AppScript, Task]]:
  """Return every task with its script, ordered by app then task id."""
  scripts = bundled_scripts() if scripts is None else scripts
  return [(script, script.tasks[task_id]) for _, script in sorted(scripts.items()) for task_id in sorted(script.tasks)]
