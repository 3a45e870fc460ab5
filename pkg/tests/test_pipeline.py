from __future__ import annotations

import json
from pathlib import Path

import pytest

from guiag.config import SynthesisManifest
from guiag.errors import SynthesisError
from guiag.fixtures import make_stage1_records
from guiag.protocol import ChatMessage
from guiag.synthesis import (
  OpenAIChatClient,
  RawRecord,
  RawTrajectory,
  SampleSource,
  SFTSample,
  StubChatClient,
  make_client,
  run_stage1,
  run_stage2,
  validate_corpus,
  write_corpus,
)
from guiag.synthesis.pipeline import trajectory_seed
from guiag.synthesis.records import STAGE1_KINDS, load_trajectories, write_ndjson


def _sample(response: str, task_kind: str = "stage1_grounding", step: int = 0) -> SFTSample:
  return SFTSample(
    messages=(ChatMessage("user", "Where is OK?"), ChatMessage("assistant", response)),
    source=SampleSource("toy", "t1", step),
    task_kind=task_kind,
  )


def test_make_client_picks_stub_without_endpoint() -> None:
  assert isinstance(make_client(SynthesisManifest()), StubChatClient)
  assert isinstance(make_client(SynthesisManifest(endpoint="http://localhost:8000/v1", model="m")), OpenAIChatClient)


def test_trajectory_seed_depends_on_seed_and_id() -> None:
  assert trajectory_seed(0, "a") == trajectory_seed(0, "a")
  assert trajectory_seed(0, "a") != trajectory_seed(0, "b")
  assert trajectory_seed(0, "a") != trajectory_seed(1, "a")


def test_stage1_skips_unmappable_records_and_sorts() -> None:
  records = [*make_stage1_records(), RawRecord("rico_sca", "broken", {"instruction": "open it"})]

  samples = run_stage1(records)

  assert len(samples) == len(records) - 1
  assert {sample.task_kind for sample in samples} == set(STAGE1_KINDS)
  assert [sample.source for sample in samples] == sorted(sample.source for sample in samples)


def test_stage1_refinement_with_echo_client_keeps_responses() -> None:
  records = make_stage1_records()[:10]

  refined = run_stage1(records, client=StubChatClient(mode="echo"))

  assert refined == run_stage1(records)


def test_stage2_is_deterministic_across_worker_counts(trajectories: list[RawTrajectory]) -> None:
  subset = trajectories[:6]

  serial = run_stage2(subset, StubChatClient(), SynthesisManifest(max_workers=1))
  parallel = run_stage2(subset, StubChatClient(), SynthesisManifest(max_workers=4))

  assert [sample.as_dict() for sample in serial] == [sample.as_dict() for sample in parallel]
  kinds = {sample.task_kind for sample in serial}
  assert kinds == {"stage2_step", "next_state_prediction"}


def test_stage2_respects_enabled_task_kinds(trajectories: list[RawTrajectory]) -> None:
  manifest = SynthesisManifest(task_kinds=("stage2_step",))

  samples = run_stage2(trajectories[:2], StubChatClient(), manifest)

  assert samples
  assert {sample.task_kind for sample in samples} == {"stage2_step"}
  assert len(samples) == len(trajectories[0]) + len(trajectories[1])


def test_stage2_ratio_zero_keeps_nothing(trajectories: list[RawTrajectory]) -> None:
  manifest = SynthesisManifest(ratios={"stage2_step": 0.0, "next_state_prediction": 0.0})

  assert run_stage2(trajectories[:2], StubChatClient(), manifest) == []


def test_written_corpus_validates(tmp_path: Path, trajectories: list[RawTrajectory]) -> None:
  samples = run_stage2(trajectories[:4], StubChatClient(), SynthesisManifest()) + run_stage1(make_stage1_records())
  path = tmp_path / "corpus.ndjson"

  written = write_corpus(path, samples)
  report = validate_corpus(path)

  assert written == len(samples)
  assert report.ok
  assert report.total == len(samples)
  assert sum(report.by_kind.values()) == len(samples)


def test_corpus_lines_are_key_sorted(tmp_path: Path) -> None:
  path = tmp_path / "corpus.ndjson"

  write_corpus(path, [_sample("It is here.")])
  line = path.read_text(encoding="utf-8").splitlines()[0]

  assert line == json.dumps(json.loads(line), sort_keys=True, ensure_ascii=False)


def test_validation_reports_each_broken_sample(tmp_path: Path) -> None:
  path = tmp_path / "corpus.ndjson"
  user_last = _sample("hi").as_dict()
  user_last["messages"].reverse()
  rows = [
    _sample('<ref type="point" x="10" y="20">OK</ref>').as_dict(),
    _sample('<ref type="point" x="1001" y="20">OK</ref>').as_dict(),
    _sample("Tap OK.", task_kind="stage2_step", step=1).as_dict(),
    user_last,
  ]
  write_ndjson(path, rows)

  report = validate_corpus(path)

  assert not report.ok
  assert report.total == 4
  assert [problem.split(":")[0] for problem in report.problems] == ["line 2", "line 3", "line 4"]
  assert "malformed reference markers" in report.problems[0]
  assert "does not parse" in report.problems[1]


def test_trajectories_survive_a_file_round_trip(tmp_path: Path, trajectories: list[RawTrajectory]) -> None:
  path = tmp_path / "trajectories.ndjson"

  write_ndjson(path, (trajectory.as_dict() for trajectory in trajectories))

  assert load_trajectories(path) == trajectories


def test_loading_names_the_line_of_a_malformed_trajectory(tmp_path: Path, trajectories: list[RawTrajectory]) -> None:
  path = tmp_path / "trajectories.ndjson"
  rows = [trajectory.as_dict() for trajectory in trajectories[:2]]
  del rows[1]["goal"]
  write_ndjson(path, rows)

  with pytest.raises(SynthesisError, match=r"trajectories\.ndjson:2: malformed trajectory"):
    load_trajectories(path)


def test_loading_names_the_line_that_is_not_json(tmp_path: Path) -> None:
  path = tmp_path / "trajectories.ndjson"
  path.write_text('\n{"id": \n', encoding="utf-8")

  with pytest.raises(SynthesisError, match=r":2: not valid JSON"):
    load_trajectories(path)


def test_validation_numbers_lines_as_they_appear_in_the_file(tmp_path: Path) -> None:
  path = tmp_path / "corpus.ndjson"
  broken = json.dumps(_sample('<ref type="point" x="1001" y="20">OK</ref>').as_dict())
  path.write_text(f"\n\n{broken}\n", encoding="utf-8")

  report = validate_corpus(path)

  assert report.total == 1
  assert report.problems[0].startswith("line 3:")
