"""Mutable runtime state of a scripted environment."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(slots=True)
class EnvState:
  """Everything that changes while an episode runs.

  Field contents are keyed by editable element id. ``records`` hold snapshots of field values taken
  by ``record`` rule effects (a sent message, a saved contact). ``notes`` collect remembered text.
  """

  task_id: str
  screen: str
  fields: dict[str, str] = field(default_factory=dict)
  flags: dict[str, bool] = field(default_factory=dict)
  records: dict[str, dict[str, str]] = field(default_factory=dict)
  notes: list[str] = field(default_factory=list)
  nav_stack: list[str] = field(default_factory=list)
  focus: str | None = None
  step: int = 0
  done: bool = False
  success: bool = False

  def as_dict(self) -> dict[str, Any]:
    """Return a JSON-ready snapshot."""
    return {
      "task_id": self.task_id,
      "screen": self.screen,
      "fields": dict(self.fields),
      "flags": dict(self.flags),
      "records": {name: dict(values) for name, values in self.records.items()},
      "notes": list(self.notes),
      "nav_stack": list(self.nav_stack),
      "focus": self.focus,
      "step": self.step,
      "done": self.done,
      "success": self.success,
    }

  @classmethod
  def from_dict(cls, data: dict[str, Any]) -> EnvState:
    """Rebuild a state from `as_dict` output."""
    return cls(
      task_id=data["task_id"],
      screen=data["screen"],
      fields=dict(data.get("fields", {})),
      flags={name: bool(value) for name, value in data.get("flags", {}).items()},
      records={name: dict(values) for name, values in data.get("records", {}).items()},
      notes=list(data.get("notes", [])),
      nav_stack=list(data.get("nav_stack", [])),
      focus=data.get("focus"),
      step=int(data.get("step", 0)),
      done=bool(data.get("done", False)),
      success=bool(data.get("success", False)),
    )
