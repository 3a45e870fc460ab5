"""Versioned prompt and instruction templates."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cache
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Any

from guiag.errors import SynthesisError
from guiag.protocol import ChatMessage

if TYPE_CHECKING:
  from collections.abc import Mapping

DEFAULT_VERSION = "v1"
MIN_INSTRUCTION_WORDS = 2
PROMPT_NAMES = ("describe", "reflection", "summary", "planning", "tactical", "expectation", "next_state", "refine")


class _Strict(dict):
  def __missing__(self, key: str) -> str:
    msg = f"template placeholder {{{key}}} has no value"
    raise SynthesisError(msg)


def fill(template: str, values: Mapping[str, Any]) -> str:
  """Format ``template``; a missing placeholder raises `SynthesisError`."""
  return template.format_map(_Strict(values))


def pick_index(key: str, count: int) -> int:
  """Choose one of ``count`` alternatives from a stable hash of ``key``."""
  digest = hashlib.sha256(key.encode("utf-8")).digest()
  return int.from_bytes(digest[:8], "big") % count


@dataclass(frozen=True, slots=True)
class InstructionTemplates:
  """How one stage-1 task kind phrases its instruction."""

  wrap: str
  rewrite: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class PromptTemplates:
  """All prompts of one template version."""

  version: int
  stage1_system: str
  prompts: dict[str, tuple[str, str]]
  instructions: dict[str, InstructionTemplates]
  ambiguous: frozenset[str] = field(default_factory=frozenset)

  def __post_init__(self) -> None:
    """Check every prompt the pipeline needs is present."""
    missing = [name for name in PROMPT_NAMES if name not in self.prompts]
    if missing:
      msg = f"prompt templates are missing {', '.join(missing)}"
      raise SynthesisError(msg)

  def messages(self, name: str, **values: Any) -> list[ChatMessage]:
    """Render a system and user message pair for prompt ``name``."""
    system, user = self.prompts[name]
    return [ChatMessage("system", fill(system, values)), ChatMessage("user", fill(user, values))]

  def is_ambiguous(self, instruction: str) -> bool:
    """Return whether an instruction is too vague to keep as is."""
    text = " ".join(instruction.split()).strip(" .!?").casefold()
    return len(text.split()) < MIN_INSTRUCTION_WORDS or text in self.ambiguous

  def instruction(self, task_kind: str, instruction: str, *, target: str, key: str) -> str:
    """Return the templated instruction, rewriting ambiguous ones deterministically from ``key``."""
    try:
      templates = self.instructions[task_kind]
    except KeyError:
      msg = f"no instruction templates for task kind {task_kind!r}"
      raise SynthesisError(msg) from None
    if self.is_ambiguous(instruction):
      return fill(templates.rewrite[pick_index(key, len(templates.rewrite))], {"target": target})
    return fill(templates.wrap, {"instruction": " ".join(instruction.split())})

  @classmethod
  def from_dict(cls, data: Mapping[str, Any]) -> PromptTemplates:
    """Decode a template file."""
    try:
      return cls(
        version=int(data["version"]),
        stage1_system=data["stage1_system"],
        prompts={name: (raw["system"], raw["user"]) for name, raw in data["prompts"].items()},
        instructions={
          kind: InstructionTemplates(wrap=raw["wrap"], rewrite=tuple(raw["rewrite"]))
          for kind, raw in data["instructions"].items()
        },
        ambiguous=frozenset(word.casefold() for word in data.get("ambiguous", [])),
      )
    except (KeyError, TypeError, ValueError) as err:
      msg = f"malformed prompt templates: {err!r}"
      raise SynthesisError(msg) from err

  @classmethod
  def from_file(cls, path: str | Path) -> PromptTemplates:
    """Load templates from a JSON file."""
    with Path(path).open(encoding="utf-8") as f:
      return cls.from_dict(json.load(f))


@cache
def load_templates(version: str = DEFAULT_VERSION) -> PromptTemplates:
  """Load a bundled template version, e.g. ``"v1"``."""
  name = f"prompts_{version}.json"
  target = resources.files("guiag.data").joinpath(name)
  if not target.is_file():
    msg = f"unknown template version {version!r}"
    raise SynthesisError(msg)
  return PromptTemplates.from_dict(json.loads(target.read_text(encoding="utf-8")))
