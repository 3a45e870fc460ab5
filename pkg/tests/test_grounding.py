from __future__ import annotations

from pathlib import Path

import pytest

from guiag.actions import Action, serialize_action
from guiag.agents import BaseAgent, GroundingOracleAgent
from guiag.agents.base import scripted_output
from guiag.errors import EvaluationError
from guiag.fixtures import make_grounding_suite
from guiag.geometry import NormPoint, point_in_box
from guiag.grounding import (
  GroundingCase,
  GroundingReport,
  eval_grounding,
  extract_grounding_point,
  grounding_input,
  load_suite,
  write_suite,
)
from guiag.protocol import StepInput
from guiag.synthesis.records import write_ndjson


class CornerAgent(BaseAgent):
  def act(self, step_input: StepInput) -> str:
    return "The answer is in the corner."


class OriginAgent(BaseAgent):
  def act(self, step_input: StepInput) -> str:
    return serialize_action(Action("tap", point=NormPoint(0, 0)))


def test_oracle_hits_every_case() -> None:
  cases = make_grounding_suite(seed=1, per_cell=3)
  agent = GroundingOracleAgent({case.case_id: case.gold for case in cases})

  report = eval_grounding(cases, agent, max_workers=4)

  assert report.average == 1.0
  assert report.misses == 0
  assert all(report.accuracy(case.platform, case.element_type) == 1.0 for case in cases)
  assert report.as_dict()["cases"]["web/icon"] == 3


def test_output_without_a_point_is_a_miss() -> None:
  cases = make_grounding_suite(seed=2, per_cell=1)

  report = eval_grounding(cases, CornerAgent())

  assert report.average == 0.0
  assert report.misses == len(cases)


def test_empty_suite_is_an_error() -> None:
  with pytest.raises(EvaluationError):
    eval_grounding([], CornerAgent())


def test_extract_point_from_a_bare_envelope() -> None:
  assert extract_grounding_point('{"name":"click","arguments":{"point":{"x":10,"y":20}}}') == NormPoint(10, 20)


def test_extract_point_from_structured_output() -> None:
  cases = make_grounding_suite(seed=0, per_cell=1)
  step_input = grounding_input(cases[0])

  output = scripted_output(step_input, Action("tap", point=NormPoint(321, 654)))

  assert extract_grounding_point(output) == NormPoint(321, 654)


def test_extract_point_falls_back_to_the_first_reference() -> None:
  text = (
    'It is <ref type="box" x1="100" y1="100" x2="200" y2="201">here</ref> '
    'or <ref type="point" x="1" y="1">there</ref>'
  )

  assert extract_grounding_point(text) == NormPoint(150, 151)


def test_extract_point_ignores_actions_without_points() -> None:
  assert extract_grounding_point(serialize_action(Action("back"))) is None
  assert extract_grounding_point("") is None


def test_suite_round_trip(tmp_path: Path) -> None:
  cases = make_grounding_suite(seed=5, per_cell=2)
  path = tmp_path / "suite.ndjson"

  assert write_suite(path, cases) == len(cases)
  assert load_suite(path) == cases


def test_grounding_case_rejects_unknown_tags() -> None:
  case = make_grounding_suite(seed=0, per_cell=1)[0]

  with pytest.raises(EvaluationError, match="platform"):
    GroundingCase(case.case_id, "watch", "text", case.instruction, case.observation, case.gold)
  with pytest.raises(EvaluationError, match="element type"):
    GroundingCase(case.case_id, "mobile", "widget", case.instruction, case.observation, case.gold)


def test_format_table_marks_empty_cells() -> None:
  report = GroundingReport(cells={("mobile", "text"): (1, 2)})

  header, row = report.format_table("oracle").splitlines()

  assert header.split()[0] == "Model"
  assert header.endswith("Avg.")
  assert row.split() == ["oracle", "50.0", "-", "-", "-", "-", "-", "50.0"]


def test_report_average_is_case_weighted() -> None:
  report = GroundingReport(cells={("mobile", "text"): (3, 3), ("web", "icon"): (0, 1)}, misses=1)

  assert report.average == 0.75
  assert report.accuracy("desktop", "icon") is None
  assert report.as_dict()["parse_misses"] == 1


def test_grounding_input_has_no_history() -> None:
  case = make_grounding_suite(seed=0, per_cell=1)[0]

  step_input = grounding_input(case)

  assert step_input.history == ()
  assert step_input.goal == case.instruction
  assert step_input.observation.obs_id == case.case_id


def test_constant_corner_agent_scores_the_share_of_boxes_at_the_origin() -> None:
  cases = make_grounding_suite(seed=0, per_cell=10)
  origin = NormPoint(0, 0)
  expected = sum(point_in_box(origin, case.gold) for case in cases) / len(cases)

  report = eval_grounding(cases, OriginAgent())

  assert report.average == pytest.approx(expected)
  assert report.misses == 0


def test_loading_a_suite_names_the_malformed_case(tmp_path: Path) -> None:
  path = tmp_path / "suite.ndjson"
  rows = [case.as_dict() for case in make_grounding_suite(seed=5, per_cell=1)[:3]]
  rows[2]["gold"]["x2"] = 5000
  write_ndjson(path, rows)

  with pytest.raises(EvaluationError, match=r"suite\.ndjson:3: malformed grounding case"):
    load_suite(path)
