"""Episode result modeling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
  from collections.abc import Mapping


@dataclass(frozen=True, slots=True)
class EpisodeResult:
  """Represents the outcome of one episode of one task."""

  task_id: str
  difficulty: str
  success: bool
  steps: int
  status: str  # final EpisodeStatus value
  agent: str = ""
  parse_misses: int = 0

  def as_dict(self) -> dict[str, Any]:
    """Return the report encoding."""
    return {
      "task_id": self.task_id,
      "difficulty": self.difficulty,
      "success": self.success,
      "steps": self.steps,
      "status": self.status,
      "agent": self.agent,
      "parse_misses": self.parse_misses,
    }

  @classmethod
  def from_dict(cls, data: Mapping[str, Any]) -> EpisodeResult:
    """Decode the report encoding."""
    return cls(**data)

  def __str__(self) -> str:
    """Print the result of a single episode."""
    outcome = "success" if self.success else "failure"
    return f"{self.task_id} ({self.difficulty}): {outcome}, {self.status} after {self.steps} steps - {self.agent}"
