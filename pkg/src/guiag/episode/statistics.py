"""Episode statistics reporting."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

from guiag.env.script import DIFFICULTIES

if TYPE_CHECKING:
  from collections.abc import Iterable, Sequence

  from guiag.episode.results import EpisodeResult

OVERALL = "overall"


def success_rate(results: Iterable[EpisodeResult], group_by: str = "difficulty") -> dict[str, float | None]:
  """Return the success fraction per group and overall.

  Grouping by difficulty always reports ``easy``, ``middle`` and ``hard``; a group without results
  is ``None`` rather than zero. Other attributes report the groups that occur, sorted.
  """
  counts: defaultdict[str, list[int]] = defaultdict(lambda: [0, 0])
  total = [0, 0]
  for result in results:
    key = str(getattr(result, group_by))
    counts[key][0] += int(result.success)
    counts[key][1] += 1
    total[0] += int(result.success)
    total[1] += 1
  groups = list(DIFFICULTIES) if group_by == "difficulty" else sorted(counts)
  rates: dict[str, float | None] = {}
  for group in groups:
    wins, n = counts.get(group, (0, 0))
    rates[group] = wins / n if n else None
  rates[OVERALL] = total[0] / total[1] if total[1] else None
  return rates


@dataclass(frozen=True, slots=True)
class EpisodeStatistics:
  """Statistics for a series of episodes of one agent."""

  results: tuple[EpisodeResult, ...]

  @property
  def total_episodes(self) -> int:
    """Count the episodes."""
    return len(self.results)

  @property
  def successes(self) -> int:
    """Count the successful episodes."""
    return sum(1 for result in self.results if result.success)

  @property
  def avg_steps(self) -> float:
    """Calculate the average number of steps per episode."""
    return sum(result.steps for result in self.results) / self.total_episodes if self.results else 0.0

  @property
  def status_counts(self) -> dict[str, int]:
    """Count the final statuses."""
    counts: dict[str, int] = {}
    for result in self.results:
      counts[result.status] = counts.get(result.status, 0) + 1
    return dict(sorted(counts.items()))

  def as_dict(self) -> dict[str, Any]:
    """Return the report encoding, with results ordered by task id."""
    return {
      "success_rate": success_rate(self.results),
      "episodes": self.total_episodes,
      "successes": self.successes,
      "avg_steps": round(self.avg_steps, 4),
      "status_counts": self.status_counts,
      "results": [result.as_dict() for result in sorted(self.results, key=lambda r: r.task_id)],
    }


def _cell(rate: float | None) -> str:
  return "-" if rate is None else f"{rate:.2f}"


def format_success_table(rows: Sequence[tuple[str, dict[str, float | None]]]) -> str:
  """Render one row of Easy/Middle/Hard/Overall rates per agent as an aligned text table."""
  header = ["Agent", "Easy", "Middle", "Hard", "Overall"]
  body = [[name, *(_cell(rates.get(key)) for key in (*DIFFICULTIES, OVERALL))] for name, rates in rows]
  widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
  return "\n".join(
    "  ".join(cell.ljust(width) for cell, width in zip(row, widths, strict=True)).rstrip() for row in [header, *body]
  )
