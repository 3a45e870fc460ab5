"""Grounding evaluation: does the predicted point land inside the gold element?"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import partial
from typing import TYPE_CHECKING, Any

from guiag.actions import PLATFORM_SPACES, parse_action
from guiag.errors import EvaluationError, GuiagError
from guiag.geometry import NormBox, NormPoint, box_center, box_from_json, point_in_box
from guiag.logging import get_logger
from guiag.parallel import ParallelWorkerManager
from guiag.protocol import Observation, StepInput
from guiag.raa import parse_raa, references
from guiag.synthesis.records import load_rows, write_ndjson

if TYPE_CHECKING:
  from collections.abc import Iterable, Mapping, Sequence
  from pathlib import Path

  from guiag.agents import BaseAgent

logger = get_logger()

PLATFORMS = ("mobile", "desktop", "web")
ELEMENT_TYPES = ("text", "icon")
_ACTION_BLOCK = re.compile(r"```action[ \t]*\n(.*?)\n[ \t]*```", re.DOTALL)


@dataclass(frozen=True, slots=True)
class GroundingCase:
  """One instruction to ground on one screen."""

  case_id: str
  platform: str
  element_type: str
  instruction: str
  observation: Observation
  gold: NormBox

  def __post_init__(self) -> None:
    """Check the platform and element type tags."""
    if self.platform not in PLATFORMS:
      msg = f"unknown platform {self.platform!r}"
      raise EvaluationError(msg)
    if self.element_type not in ELEMENT_TYPES:
      msg = f"unknown element type {self.element_type!r}"
      raise EvaluationError(msg)

  def as_dict(self) -> dict[str, Any]:
    """Return the suite encoding."""
    return {
      "id": self.case_id,
      "platform": self.platform,
      "element_type": self.element_type,
      "instruction": self.instruction,
      "observation": self.observation.as_dict(),
      "gold": self.gold.as_dict(),
    }

  @classmethod
  def from_dict(cls, data: Mapping[str, Any]) -> GroundingCase:
    """Decode the suite encoding."""
    return cls(
      case_id=str(data["id"]),
      platform=data["platform"],
      element_type=data["element_type"],
      instruction=data["instruction"],
      observation=Observation.from_dict(data["observation"]),
      gold=box_from_json(data["gold"]),
    )


def write_suite(path: str | Path, cases: Iterable[GroundingCase]) -> int:
  """Write a grounding suite as NDJSON."""
  return write_ndjson(path, (case.as_dict() for case in cases))


def load_suite(path: str | Path) -> list[GroundingCase]:
  """Read a grounding suite.

  Raises:
    EvaluationError: A case is missing fields or holds invalid coordinates.
  """
  return load_rows(path, GroundingCase.from_dict, "grounding case", EvaluationError)


def extract_grounding_point(output: str) -> NormPoint | None:
  """Reduce agent output to a single predicted point.

  The output may be a bare action envelope or structured step output with an action section; a
  point-carrying action yields its point. Failing that, the first reference marker is used, a box
  reduced to its center. Returns None when no point can be found.
  """
  candidates = [output.strip()]
  block = _ACTION_BLOCK.search(output)
  if block:
    candidates.append(block.group(1).strip())
  for candidate in candidates:
    try:
      action = parse_action(candidate)
    except GuiagError:
      continue
    if action.point is not None:
      return action.point
  try:
    first = next(references(parse_raa(output, strict=False)), None)
  except GuiagError:
    first = None
  if first is None:
    return None
  coords = first.coords
  return coords if isinstance(coords, NormPoint) or coords is None else box_center(coords)


@dataclass(frozen=True, slots=True)
class CaseOutcome:
  """Prediction for one case."""

  case_id: str
  platform: str
  element_type: str
  point: NormPoint | None
  hit: bool


def grounding_input(case: GroundingCase) -> StepInput:
  """Return the agent input for a case: the instruction as goal, no history."""
  return StepInput(
    goal=case.instruction,
    observation=case.observation,
    history=(),
    action_space=PLATFORM_SPACES[case.platform],
    t=0,
  )


def evaluate_case(case: GroundingCase, agent: BaseAgent) -> CaseOutcome:
  """Ask the agent about one case; output without a point counts as a miss."""
  output = agent.act(grounding_input(case))
  point = extract_grounding_point(output)
  if point is None:
    logger.warning("No point in answer to %s: %r", case.case_id, output[:80])
  hit = point is not None and point_in_box(point, case.gold)
  return CaseOutcome(case.case_id, case.platform, case.element_type, point, hit)


@dataclass(frozen=True, slots=True)
class GroundingReport:
  """Accuracy per platform and element type, plus the case-weighted average."""

  cells: dict[tuple[str, str], tuple[int, int]] = field(default_factory=dict)
  misses: int = 0

  def accuracy(self, platform: str, element_type: str) -> float | None:
    """Return the accuracy of one cell, or None when it has no cases."""
    hits, total = self.cells.get((platform, element_type), (0, 0))
    return hits / total if total else None

  @property
  def average(self) -> float | None:
    """Return the fraction of hits over all cases."""
    hits = sum(h for h, _ in self.cells.values())
    total = sum(n for _, n in self.cells.values())
    return hits / total if total else None

  def as_dict(self) -> dict[str, Any]:
    """Return the report encoding."""
    return {
      "accuracy": {
        platform: {element_type: self.accuracy(platform, element_type) for element_type in ELEMENT_TYPES}
        for platform in PLATFORMS
      },
      "average": self.average,
      "cases": {
        f"{platform}/{element_type}": self.cells.get((platform, element_type), (0, 0))[1]
        for platform in PLATFORMS
        for element_type in ELEMENT_TYPES
      },
      "parse_misses": self.misses,
    }

  def format_table(self, name: str = "agent") -> str:
    """Render the report as an aligned text table, one column per platform and element type."""
    header = ["Model", *(f"{p.capitalize()} {t.capitalize()}" for p in PLATFORMS for t in ELEMENT_TYPES), "Avg."]
    cells = [self.accuracy(p, t) for p in PLATFORMS for t in ELEMENT_TYPES]
    row = [name, *("-" if rate is None else f"{100 * rate:.1f}" for rate in [*cells, self.average])]
    widths = [max(len(a), len(b)) for a, b in zip(header, row, strict=True)]
    return "\n".join(
      "  ".join(cell.rjust(width) for cell, width in zip(line, widths, strict=True)) for line in (header, row)
    )


def summarize_outcomes(outcomes: Iterable[CaseOutcome]) -> GroundingReport:
  """Aggregate outcomes in any order into a report."""
  cells: dict[tuple[str, str], tuple[int, int]] = {}
  misses = 0
  for outcome in outcomes:
    hits, total = cells.get((outcome.platform, outcome.element_type), (0, 0))
    cells[outcome.platform, outcome.element_type] = (hits + int(outcome.hit), total + 1)
    misses += outcome.point is None
  return GroundingReport(cells=dict(sorted(cells.items())), misses=misses)


def eval_grounding(cases: Sequence[GroundingCase], agent: BaseAgent, max_workers: int | None = 1) -> GroundingReport:
  """Score an agent on a grounding suite.

  Raises:
    EvaluationError: ``cases`` is empty.
  """
  if not cases:
    msg = "grounding evaluation needs at least one case"
    raise EvaluationError(msg)
  outcomes = ParallelWorkerManager.execute_parallel_work(partial(evaluate_case, agent=agent), list(cases), max_workers)
  report = summarize_outcomes(outcomes)
  logger.info(
    "Grounding accuracy %.3f over %d cases (%d parse misses)", report.average or 0.0, len(cases), report.misses
  )
  return report
