"""End-to-end corpus building and validation."""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from functools import partial
from typing import TYPE_CHECKING

from numpy.random import default_rng
from tqdm import tqdm

from guiag.errors import GuiagError, RaaParseError, StandardizationError
from guiag.logging import get_logger
from guiag.parallel import ParallelWorkerManager
from guiag.protocol import parse_step_output
from guiag.raa import parse_raa, references
from guiag.synthesis.client import OpenAIChatClient, StubChatClient
from guiag.synthesis.reasoning import ReasoningSynthesizer
from guiag.synthesis.records import SFTSample, iter_ndjson, sample_sort_key, write_ndjson
from guiag.synthesis.standardize import apply_refinement, refine_response, standardize_record
from guiag.synthesis.templates import load_templates

if TYPE_CHECKING:
  from collections.abc import Iterable, Mapping, Sequence
  from pathlib import Path

  from guiag.config import SynthesisManifest
  from guiag.synthesis.client import ChatClient
  from guiag.synthesis.records import RawTrajectory
  from guiag.synthesis.standardize import RawRecord, RecordDialect
  from guiag.synthesis.templates import PromptTemplates

logger = get_logger()

_MARKER_OPEN = re.compile(r"<ref(?=[\s>/])")


def make_client(manifest: SynthesisManifest) -> ChatClient:
  """Return the offline stub without an endpoint, otherwise an OpenAI-compatible client."""
  if manifest.endpoint is None:
    return StubChatClient()
  return OpenAIChatClient(
    manifest.model, base_url=manifest.endpoint, timeout=manifest.timeout, max_retries=manifest.max_retries
  )


def trajectory_seed(seed: int, trajectory_id: str) -> list[int]:
  """Return a generator seed that depends only on the run seed and the trajectory id."""
  digest = hashlib.sha256(trajectory_id.encode("utf-8")).digest()
  return [seed, int.from_bytes(digest[:8], "big")]


def run_stage1(
  records: Iterable[RawRecord],
  *,
  client: ChatClient | None = None,
  templates: PromptTemplates | None = None,
  dialects: Mapping[str, RecordDialect] | None = None,
) -> list[SFTSample]:
  """Standardize raw records, refining responses when a client is given.

  Records that cannot be standardized are skipped with a warning.
  """
  templates = templates or load_templates()
  samples = []
  for raw in records:
    try:
      sample = standardize_record(raw, dialects=dialects, templates=templates)
    except StandardizationError as err:
      logger.warning("Skipping record %s/%s: %s", raw.dialect, raw.record_id, err)
      continue
    if client is not None:
      sample = apply_refinement(sample, refine_response(sample, client, templates=templates))
    samples.append(sample)
  logger.info("Standardized %d records", len(samples))
  return sorted(samples, key=sample_sort_key)


def synthesize_trajectory(
  trajectory: RawTrajectory, synthesizer: ReasoningSynthesizer, manifest: SynthesisManifest
) -> list[SFTSample]:
  """Build the samples of one trajectory.

  Each step is kept for each enabled task kind with the manifest's ratio; the draws come from a
  generator seeded by the trajectory, so the result does not depend on scheduling.
  """
  try:
    actions = trajectory.canonical_actions()
  except GuiagError as err:
    logger.warning("Skipping trajectory %s: %s", trajectory.trajectory_id, err)
    return []
  generator = default_rng(trajectory_seed(manifest.seed, trajectory.trajectory_id))
  keep_step = generator.random(len(trajectory)) < manifest.ratio("stage2_step")
  keep_next = generator.random(len(trajectory)) < manifest.ratio("next_state_prediction")

  samples = []
  if keep_step.any():
    samples.extend(
      sample for sample in synthesizer.iter_step_samples(trajectory, actions) if keep_step[sample.source.step]
    )
  for t in range(len(trajectory) - 1):
    if not keep_next[t]:
      continue
    try:
      samples.append(synthesizer.build_next_state_sample(trajectory, t, actions))
    except GuiagError as err:
      logger.warning("Skipping next-state sample %s step %d: %s", trajectory.trajectory_id, t, err)
  return samples


def run_stage2(
  trajectories: Sequence[RawTrajectory],
  client: ChatClient,
  manifest: SynthesisManifest,
  *,
  templates: PromptTemplates | None = None,
) -> list[SFTSample]:
  """Synthesize reasoning and next-state samples for every trajectory, in parallel.

  All workers share one synthesizer and thus one description cache. The result is sorted by
  provenance, so it is byte-identical across runs with a deterministic client.
  """
  synthesizer = ReasoningSynthesizer(
    client,
    templates or load_templates(manifest.templates_version),
    window_size=manifest.window_size,
    max_chars=manifest.max_chars,
  )
  worker = partial(synthesize_trajectory, synthesizer=synthesizer, manifest=manifest)
  per_trajectory = ParallelWorkerManager.execute_parallel_work(worker, list(trajectories), manifest.max_workers)
  samples = sorted((sample for batch in per_trajectory for sample in batch), key=sample_sort_key)
  logger.info("Synthesized %d samples from %d trajectories", len(samples), len(trajectories))
  return samples


def write_corpus(path: str | Path, samples: Iterable[SFTSample]) -> int:
  """Write samples as key-sorted NDJSON, ordered by provenance."""
  return write_ndjson(path, (sample.as_dict() for sample in sorted(samples, key=sample_sort_key)))


@dataclass(slots=True)
class CorpusReport:
  """Result of `validate_corpus`."""

  total: int = 0
  by_kind: dict[str, int] = field(default_factory=dict)
  problems: list[str] = field(default_factory=list)

  @property
  def ok(self) -> bool:
    """Return whether every sample passed its checks."""
    return not self.problems

  def as_dict(self) -> dict[str, object]:
    """Return the JSON encoding."""
    return {
      "total": self.total,
      "by_kind": dict(sorted(self.by_kind.items())),
      "problems": self.problems,
      "ok": self.ok,
    }


def _sample_problems(sample: SFTSample) -> list[str]:
  problems = []
  if not (sample.source.dataset and sample.source.trajectory) or sample.source.step < 0:
    problems.append("incomplete provenance")
  if sample.task_kind == "stage2_step":
    try:
      parse_step_output(sample.response, sample.source.step)
    except GuiagError as err:
      problems.append(f"assistant turn does not parse: {err}")
  for message in sample.messages:
    try:
      doc = parse_raa(message.content, strict=False)
    except RaaParseError as err:
      problems.append(f"{message.role} turn: {err}")
      continue
    if len(_MARKER_OPEN.findall(message.content)) != sum(1 for _ in references(doc)):
      problems.append(f"{message.role} turn has malformed reference markers")
  return problems


def validate_corpus(path: str | Path) -> CorpusReport:
  """Check every sample of an NDJSON corpus.

  Samples must decode (which checks the assistant turn comes last), stage-2 steps must re-parse,
  provenance must be complete, and every reference marker must parse, which bounds its coordinates
  to the 0-1000 grid.
  """
  report = CorpusReport()
  for line, row in tqdm(iter_ndjson(path), desc="Validating", unit="sample"):
    report.total += 1
    try:
      sample = SFTSample.from_dict(row)
    except GuiagError as err:
      report.problems.append(f"line {line}: {err}")
      continue
    report.by_kind[sample.task_kind] = report.by_kind.get(sample.task_kind, 0) + 1
    report.problems.extend(f"line {line}: {problem}" for problem in _sample_problems(sample))
  logger.info("Validated %d samples, %d problems", report.total, len(report.problems))
  return report
