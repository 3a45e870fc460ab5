"""Task success predicates over environment state."""

from __future__ import annotations

from collections.abc import Callable, Mapping
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
  from guiag.env.state import EnvState

CheckerFn = Callable[["EnvState", Mapping[str, Any]], bool]


def screen_is(state: EnvState, params: Mapping[str, Any]) -> bool:
  """Current screen equals ``screen``."""
  return state.screen == params["screen"]


def flag_set(state: EnvState, params: Mapping[str, Any]) -> bool:
  """Flag ``flag`` is on."""
  return state.flags.get(params["flag"], False)


def flag_unset(state: EnvState, params: Mapping[str, Any]) -> bool:
  """Flag ``flag`` is off or was never set."""
  return not state.flags.get(params["flag"], False)


def field_equals(state: EnvState, params: Mapping[str, Any]) -> bool:
  """Editable field ``field`` currently holds ``value``."""
  return state.fields.get(params["field"]) == params["value"]


def record_equals(state: EnvState, params: Mapping[str, Any]) -> bool:
  """Record ``record`` exists and every listed field matches (extra record fields are ignored)."""
  record = state.records.get(params["record"])
  if record is None:
    return False
  return all(record.get(name) == value for name, value in params["values"].items())


def note_contains(state: EnvState, params: Mapping[str, Any]) -> bool:
  """Some remembered note contains ``text``, ignoring case."""
  needle = params["text"].casefold()
  return any(needle in note.casefold() for note in state.notes)


# required parameters per checker kind
CHECKERS: dict[str, tuple[CheckerFn, tuple[str, ...]]] = {
  "screen_is": (screen_is, ("screen",)),
  "flag_set": (flag_set, ("flag",)),
  "flag_unset": (flag_unset, ("flag",)),
  "field_equals": (field_equals, ("field", "value")),
  "record_equals": (record_equals, ("record", "values")),
  "note_contains": (note_contains, ("text",)),
}


def evaluate(kind: str, state: EnvState, params: Mapping[str, Any]) -> bool:
  """Run one registered checker."""
  fn, _ = CHECKERS[kind]
  return fn(state, params)
