"""Bundled corpora for tests and calibration runs.

Everything here is generated deterministically: trajectories come from scripted solutions played in
the mock environment, the grounding suite and stage-1 records from a seeded generator.
"""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Any

from numpy.random import default_rng

from guiag.actions import to_envelope
from guiag.env import MockEnv, all_tasks, bundled_scripts, oracle_agent
from guiag.geometry import SCALE, NormBox, ScreenDims, box_center
from guiag.grounding import ELEMENT_TYPES, PLATFORMS, GroundingCase, write_suite
from guiag.logging import get_logger
from guiag.protocol import Observation, SceneElement
from guiag.raa import RaaSegment, emit_segment
from guiag.synthesis.records import RawStep, RawTrajectory, write_ndjson
from guiag.synthesis.standardize import RawRecord

if TYPE_CHECKING:
  from collections.abc import Mapping

  from numpy.random import Generator

  from guiag.actions import Action
  from guiag.env import AppScript

logger = get_logger()

PLATFORM_DIMS = {
  "mobile": ScreenDims(1080, 2400),
  "desktop": ScreenDims(1920, 1080),
  "web": ScreenDims(1280, 800),
}
TEXT_LABELS = (
  "Sign in", "Settings", "Save", "Cancel", "Search", "Next", "Contacts", "Messages", "Profile", "Downloads",
  "Privacy", "Help", "Send", "Share", "Edit", "Delete", "Open", "Archive", "Calendar", "Notes",
)
ICON_LABELS = (
  "gear", "magnifier", "trash can", "pencil", "star", "bell", "house", "camera", "microphone", "heart",
  "paper plane", "plus", "back arrow", "menu", "lock", "cloud", "download arrow", "share", "bookmark", "globe",
)
ELEMENTS_PER_SCREEN = 6
TRAJECTORY_FILE = "trajectories.ndjson"
SUITE_FILE = "grounding_suite.ndjson"
RECORDS_FILE = "stage1_records.ndjson"


def to_aitz(action: Action) -> tuple[str, dict[str, Any]]:
  """Encode a canonical action in the ``aitz`` dialect, with coordinates as [0, 1] floats."""

  def unit(point: Any) -> dict[str, float]:
    return {"x": point.x / SCALE, "y": point.y / SCALE}

  match action.name:
    case "tap":
      return "click", unit(action.point)
    case "swipe":
      start, end = unit(action.start), unit(action.end)
      return "swipe", {"touch_point": [start["x"], start["y"]], "lift_point": [end["x"], end["y"]]}
    case "scroll":
      return "scroll", {"direction": action.direction}
    case "input":
      return "type", {"text": action.text}
    case "point_input":
      return "type_at", {**unit(action.point), "text": action.text}
    case "enter" | "home" | "back":
      return f"press_{action.name}", {}
    case "remember":
      return "memorize", {} if action.content is None else {"text": action.content}
    case "set_task_status" if action.status == "complete":
      return "complete", {}
    case "set_task_status" if action.status == "infeasible":
      return "impossible", {}
    case "set_task_status":
      return "status", {"goal_status": "in_progress"}
  msg = f"action {action.name} has no aitz encoding"
  raise ValueError(msg)


def trajectory_from_oracle(script: AppScript, task_id: str, dialect: str = "canonical") -> RawTrajectory:
  """Record the scripted solution of a task as a trajectory in ``dialect`` (canonical or aitz)."""
  task = script.task(task_id)
  env = MockEnv(script)
  observation = env.reset(task_id)
  steps = []
  for action in oracle_agent(script, task_id):
    if dialect == "aitz":
      name, arguments = to_aitz(action)
    else:
      envelope = to_envelope(action)
      name, arguments = envelope.name, envelope.arguments
    steps.append(RawStep(observation, name, arguments, annotation=f"{script.app}: {action.name}"))
    observation = env.step(action).observation
  suffix = "" if dialect == "canonical" else f"-{dialect}"
  return RawTrajectory(dialect, f"{script.app}.{task_id}{suffix}", task.goal, tuple(steps), app=script.app)


def make_trajectories(scripts: Mapping[str, AppScript] | None = None) -> list[RawTrajectory]:
  """Return every bundled task's solution, once canonical and once in the aitz dialect."""
  trajectories = []
  for script, task in all_tasks(scripts):
    for dialect in ("canonical", "aitz"):
      trajectories.append(trajectory_from_oracle(script, task.task_id, dialect))
  return trajectories


def _random_box(generator: Generator, element_type: str) -> NormBox:
  if element_type == "icon":
    width, height = (int(v) for v in generator.integers(20, 80, size=2))
  else:
    width, height = int(generator.integers(80, 400)), int(generator.integers(25, 90))
  x1 = int(generator.integers(0, SCALE - width + 1))
  y1 = int(generator.integers(0, SCALE - height + 1))
  return NormBox(x1, y1, x1 + width, y1 + height)


def _instruction(element_type: str, label: str, platform: str) -> str:
  verb = "Tap" if platform == "mobile" else "Click"
  if element_type == "icon":
    return f"{verb} the {label} icon"
  return f"{verb} the '{label}' button"


def make_grounding_case(generator: Generator, case_id: str, platform: str, element_type: str) -> GroundingCase:
  """Generate one screen of random elements and an instruction naming one of them."""
  elements = []
  for idx in range(ELEMENTS_PER_SCREEN):
    kind = element_type if idx == 0 else ELEMENT_TYPES[int(generator.integers(0, len(ELEMENT_TYPES)))]
    labels = ICON_LABELS if kind == "icon" else TEXT_LABELS
    label = labels[int(generator.integers(0, len(labels)))]
    role = "icon" if kind == "icon" else "button"
    elements.append(SceneElement(f"e{idx}", role, label, _random_box(generator, kind)))
  target = elements[0]
  order = generator.permutation(len(elements))
  scene = tuple(elements[int(i)] for i in order)
  observation = Observation(obs_id=case_id, dims=PLATFORM_DIMS[platform], scene=scene)
  return GroundingCase(
    case_id=case_id,
    platform=platform,
    element_type=element_type,
    instruction=_instruction(element_type, target.label, platform),
    observation=observation,
    gold=target.box,
  )


def make_grounding_suite(seed: int = 0, per_cell: int = 40) -> list[GroundingCase]:
  """Return ``per_cell`` cases for every platform and element type."""
  generator = default_rng(seed)
  return [
    make_grounding_case(generator, f"{platform}-{element_type}-{idx:03d}", platform, element_type)
    for platform in PLATFORMS
    for element_type in ELEMENT_TYPES
    for idx in range(per_cell)
  ]


def _pixel_corners(box: NormBox, dims: ScreenDims) -> list[int]:
  return [
    round(box.x1 * dims.width / SCALE),
    round(box.y1 * dims.height / SCALE),
    round(box.x2 * dims.width / SCALE),
    round(box.y2 * dims.height / SCALE),
  ]


def make_stage1_records(scripts: Mapping[str, AppScript] | None = None) -> list[RawRecord]:
  """Return stage-1 records in every built-in record dialect, built from the bundled app screens."""
  scripts = bundled_scripts() if scripts is None else scripts
  records = []
  for script in scripts.values():
    for screen in script.screens.values():
      dims = screen.dims
      labeled = [element for element in screen.elements if element.label]
      for element in labeled:
        key = f"{script.app}.{screen.screen_id}.{element.element_id}"
        corners = _pixel_corners(element.box, dims)
        records.append(
          RawRecord(
            "rico_sca",
            key,
            {
              "instruction": f"open {element.label}",
              "element_text": element.label,
              "bbox": corners,
              "image_size": [dims.width, dims.height],
            },
          )
        )
        unit_box = [element.box.x1 / SCALE, element.box.y1 / SCALE, element.box.x2 / SCALE, element.box.y2 / SCALE]
        records.append(RawRecord("seeclick_web", key, {"goal": "click", "text": element.label, "bbox": unit_box}))
      if labeled:
        first = labeled[0]
        x1, y1, x2, y2 = _pixel_corners(first.box, dims)
        records.append(
          RawRecord(
            "screenqa",
            f"{script.app}.{screen.screen_id}",
            {
              "question": f"Which element comes first on the {screen.screen_id.replace('_', ' ')} screen?",
              "answer": f"The first element is {first.label}.",
              "evidence": [{"label": first.label, "bbox": [x1, y1, x2 - x1, y2 - y1]}],
              "image_size": [dims.width, dims.height],
            },
          )
        )
      names = ", ".join(element.label for element in labeled) or "nothing"
      records.append(
        RawRecord(
          "screen2words",
          f"{script.app}.{screen.screen_id}",
          {"summaries": [f"{script.app} screen showing {names}"]},
        )
      )
      center = box_center(labeled[0].box) if labeled else None
      if center is not None:
        records.append(
          RawRecord(
            "canonical",
            f"{script.app}.{screen.screen_id}",
            {
              "dataset": "mockenv",
              "task_kind": "stage1_grounding",
              "instruction": f"Where is {labeled[0].label} on the {script.app} screen?",
              "response": emit_segment(RaaSegment.reference(center, labeled[0].label)),
            },
          )
        )
  return records


def write_fixtures(out_dir: str | Path, seed: int = 0) -> dict[str, int]:
  """Write the trajectory corpus, grounding suite and stage-1 records into ``out_dir``."""
  target = Path(out_dir)
  counts = {
    TRAJECTORY_FILE: write_ndjson(target / TRAJECTORY_FILE, (t.as_dict() for t in make_trajectories())),
    SUITE_FILE: write_suite(target / SUITE_FILE, make_grounding_suite(seed)),
    RECORDS_FILE: write_ndjson(target / RECORDS_FILE, (r.as_dict() for r in make_stage1_records())),
  }
  for name, count in counts.items():
    logger.info("Wrote %d rows to %s", count, target / name)
  return counts
