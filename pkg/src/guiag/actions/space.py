"""Canonical modular action space: names, categories, argument schemas and validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

from guiag.errors import ActionValidationError, UnknownActionError
from guiag.geometry import NormPoint

if TYPE_CHECKING:
  from collections.abc import Iterable


class Category(Enum):
  """Action categories; every canonical name belongs to exactly one."""

  SINGLE_POINT = "Single-point operations"
  TWO_POINT = "Two-point operations"
  DIRECTIONAL = "Directional operations"
  TEXT_INPUT = "Text input"
  PARAMETERLESS = "Parameterless operations"
  STATE_SETTING = "State settings"


class ArgKind(Enum):
  """Value type of a single function-call argument."""

  POINT = "point"
  DIRECTION = "direction"
  TEXT = "text"
  STATUS = "status"


DIRECTIONS = ("up", "down", "left", "right")
TASK_STATUSES = ("continue", "complete", "infeasible")
TERMINAL_STATUSES = ("complete", "infeasible")


@dataclass(frozen=True, slots=True)
class ArgSpec:
  """One argument of a function-call envelope and the Action field that stores it."""

  key: str
  attr: str
  kind: ArgKind
  required: bool = True


@dataclass(frozen=True, slots=True)
class ActionSchema:
  """Category and argument list of one canonical action."""

  category: Category
  args: tuple[ArgSpec, ...] = ()

  @property
  def keys(self) -> frozenset[str]:
    """Return every accepted argument key."""
    return frozenset(arg.key for arg in self.args)


_POINT = (ArgSpec("point", "point", ArgKind.POINT),)

ACTION_SCHEMAS: dict[str, ActionSchema] = {
  "tap": ActionSchema(Category.SINGLE_POINT, _POINT),
  "click": ActionSchema(Category.SINGLE_POINT, _POINT),
  "hover": ActionSchema(Category.SINGLE_POINT, _POINT),
  "select": ActionSchema(Category.SINGLE_POINT, _POINT),
  "swipe": ActionSchema(
    Category.TWO_POINT,
    (ArgSpec("from", "start", ArgKind.POINT), ArgSpec("to", "end", ArgKind.POINT)),
  ),
  "select_text": ActionSchema(
    Category.TWO_POINT,
    (ArgSpec("start", "start", ArgKind.POINT), ArgSpec("end", "end", ArgKind.POINT)),
  ),
  "scroll": ActionSchema(Category.DIRECTIONAL, (ArgSpec("direction", "direction", ArgKind.DIRECTION),)),
  "input": ActionSchema(Category.TEXT_INPUT, (ArgSpec("text", "text", ArgKind.TEXT),)),
  "point_input": ActionSchema(
    Category.TEXT_INPUT,
    (ArgSpec("point", "point", ArgKind.POINT), ArgSpec("text", "text", ArgKind.TEXT)),
  ),
  # remember optionally carries the content to store
  "remember": ActionSchema(Category.PARAMETERLESS, (ArgSpec("content", "content", ArgKind.TEXT, required=False),)),
  "enter": ActionSchema(Category.PARAMETERLESS),
  "home": ActionSchema(Category.PARAMETERLESS),
  "back": ActionSchema(Category.PARAMETERLESS),
  "set_task_status": ActionSchema(Category.STATE_SETTING, (ArgSpec("status", "status", ArgKind.STATUS),)),
}

CANONICAL_NAMES: tuple[str, ...] = tuple(ACTION_SCHEMAS)
POINT_ACTIONS = frozenset(name for name, schema in ACTION_SCHEMAS.items() if schema.category is Category.SINGLE_POINT)
_ACTION_ATTRS = ("point", "start", "end", "direction", "text", "status", "content")


@dataclass(frozen=True, slots=True)
class Action:
  """A canonical GUI action.

  Only the fields named by the action's schema carry values; the rest stay ``None``. Instances are
  not validated on construction so that malformed actions can be reported by `validate_action`.
  """

  name: str
  point: NormPoint | None = None
  start: NormPoint | None = None
  end: NormPoint | None = None
  direction: str | None = None
  text: str | None = None
  status: str | None = None
  content: str | None = None

  @property
  def schema(self) -> ActionSchema:
    """Return the schema for this action's name."""
    return schema_for(self.name)

  @property
  def is_terminal(self) -> bool:
    """Return whether this action ends an episode."""
    return self.name == "set_task_status" and self.status in TERMINAL_STATUSES


def schema_for(name: str) -> ActionSchema:
  """Look up a canonical schema, raising an error that lists the canonical names."""
  try:
    return ACTION_SCHEMAS[name]
  except KeyError:
    msg = f"unknown action {name!r}; canonical actions are: {', '.join(CANONICAL_NAMES)}"
    raise UnknownActionError(msg) from None


@dataclass(frozen=True, slots=True)
class ActionSpaceConfig:
  """A platform-specific subset of the canonical action space."""

  enabled: frozenset[str]
  platform: str = "custom"

  def __post_init__(self) -> None:
    """Check the subset is non-empty and canonical."""
    if not self.enabled:
      msg = "action space must enable at least one action"
      raise ActionValidationError(msg)
    unknown = sorted(set(self.enabled) - set(CANONICAL_NAMES))
    if unknown:
      msg = f"action space enables unknown actions: {', '.join(unknown)}"
      raise ActionValidationError(msg, unknown)

  @classmethod
  def of(cls, names: Iterable[str], platform: str = "custom") -> ActionSpaceConfig:
    """Build a config from any iterable of names."""
    return cls(enabled=frozenset(names), platform=platform)

  def ordered(self) -> list[str]:
    """Return enabled names in canonical order."""
    return [name for name in CANONICAL_NAMES if name in self.enabled]


_MOBILE = ("tap", "swipe", "scroll", "input", "point_input", "enter", "home", "back", "remember", "set_task_status")
_POINTER = ("click", "hover", "select", "select_text")

FULL_SPACE = ActionSpaceConfig.of(CANONICAL_NAMES, platform="full")
MOBILE_SPACE = ActionSpaceConfig.of(_MOBILE, platform="mobile")
DESKTOP_SPACE = ActionSpaceConfig.of(_MOBILE + _POINTER, platform="desktop")
WEB_SPACE = ActionSpaceConfig.of(_MOBILE + _POINTER, platform="web")

PLATFORM_SPACES = {
  "full": FULL_SPACE,
  "mobile": MOBILE_SPACE,
  "desktop": DESKTOP_SPACE,
  "web": WEB_SPACE,
}


@dataclass(frozen=True, slots=True)
class ValidationReport:
  """Outcome of validating one action."""

  violations: tuple[str, ...] = field(default=())

  @property
  def ok(self) -> bool:
    """Return whether no violation was found."""
    return not self.violations

  def __bool__(self) -> bool:
    """Truthiness follows `ok`."""
    return self.ok


def _check_value(spec: ArgSpec, value: object) -> str | None:
  if spec.kind is ArgKind.POINT:
    return None if isinstance(value, NormPoint) else f"{spec.key} must be a normalized point"
  if not isinstance(value, str):
    return f"{spec.key} must be a string"
  if spec.kind is ArgKind.DIRECTION and value not in DIRECTIONS:
    return f"direction must be one of {', '.join(DIRECTIONS)}, got {value!r}"
  if spec.kind is ArgKind.STATUS and value not in TASK_STATUSES:
    return f"status must be one of {', '.join(TASK_STATUSES)}, got {value!r}"
  return None


def shape_violations(action: Action) -> list[str]:
  """Return every way the action's parameters disagree with its category's schema."""
  if action.name not in ACTION_SCHEMAS:
    return [f"unknown action {action.name!r}"]
  schema = ACTION_SCHEMAS[action.name]
  expected = f"{action.name} expects {schema.category.value.lower()} parameters"
  violations = []
  used = set()
  for spec in schema.args:
    used.add(spec.attr)
    value = getattr(action, spec.attr)
    if value is None:
      if spec.required:
        violations.append(f"{expected}: missing {spec.key}")
      continue
    problem = _check_value(spec, value)
    if problem:
      violations.append(f"{expected}: {problem}")
  violations.extend(
    f"{expected}: unexpected {attr}"
    for attr in _ACTION_ATTRS
    if attr not in used and getattr(action, attr) is not None
  )
  return violations


def validate_action(action: Action, cfg: ActionSpaceConfig) -> ValidationReport:
  """Check membership in the configured space and the parameter shape."""
  violations = []
  if action.name in ACTION_SCHEMAS and action.name not in cfg.enabled:
    violations.append(f"{action.name} is not in configured space ({cfg.platform})")
  violations.extend(shape_violations(action))
  return ValidationReport(tuple(violations))


def require_valid(action: Action, cfg: ActionSpaceConfig) -> Action:
  """Return the action unchanged, or raise `ActionValidationError`."""
  report = validate_action(action, cfg)
  if not report.ok:
    msg = "; ".join(report.violations)
    raise ActionValidationError(msg, report.violations)
  return action


def describe_action_space(cfg: ActionSpaceConfig) -> str:
  """Render the enabled actions and their argument schemas, one per line."""
  lines = []
  for name in cfg.ordered():
    schema = ACTION_SCHEMAS[name]
    args = ", ".join(f"{arg.key}: {arg.kind.value}{'' if arg.required else '?'}" for arg in schema.args)
    lines.append(f"- {name}({args}) [{schema.category.value}]")
  return "\n".join(lines)
