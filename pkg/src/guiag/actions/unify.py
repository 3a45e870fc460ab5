"""Unification of dataset-specific action dialects onto the canonical action space.

The mapping lives in a versioned JSON table shipped with the package. Each entry maps one
``(dialect, source_name)`` pair onto a canonical action name, renames source arguments onto
canonical argument paths (``"point"`` or ``"point.x"``), and declares the coordinate convention
used by the dialect.
"""

from __future__ import annotations

import copy
import json
from collections import defaultdict
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import cache
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Any

from guiag.actions.codec import action_from_envelope
from guiag.actions.space import ACTION_SCHEMAS, ArgKind
from guiag.errors import ActionError, ActionSchemaError, GeometryError, UnificationError
from guiag.geometry import PixelPoint, ScreenDims, normalize_point, unit_to_norm
from guiag.logging import get_logger

if TYPE_CHECKING:
  from guiag.actions.space import Action

logger = get_logger()

CONVENTIONS = ("norm1000", "pixel", "unit_float")
DEFAULT_TABLE = "unification_v1.json"


@dataclass(frozen=True, slots=True)
class UnificationEntry:
  """One row of the unification table."""

  dialect: str
  source_name: str
  canonical_name: str
  argument_rename_map: dict[str, str] = field(default_factory=dict)
  coordinate_convention: str = "norm1000"
  fixed_arguments: dict[str, Any] = field(default_factory=dict)
  value_map: dict[str, dict[str, str]] = field(default_factory=dict)

  def __post_init__(self) -> None:
    """Check the entry targets a canonical action with a known convention."""
    if self.canonical_name not in ACTION_SCHEMAS:
      msg = f"table entry {self.dialect}/{self.source_name} targets unknown action {self.canonical_name!r}"
      raise UnificationError(msg, self.dialect, self.source_name)
    if self.coordinate_convention not in CONVENTIONS:
      msg = f"unknown coordinate convention {self.coordinate_convention!r}"
      raise UnificationError(msg, self.dialect, self.source_name)

  @classmethod
  def from_dict(cls, data: Mapping[str, Any]) -> UnificationEntry:
    """Decode one table row."""
    return cls(
      dialect=data["dialect"],
      source_name=data["source_name"],
      canonical_name=data["canonical_name"],
      argument_rename_map=dict(data.get("argument_rename_map", {})),
      coordinate_convention=data.get("coordinate_convention", "norm1000"),
      fixed_arguments=dict(data.get("fixed_arguments", {})),
      value_map={key: dict(mapping) for key, mapping in data.get("value_map", {}).items()},
    )


def _point_keys(canonical_name: str) -> set[str]:
  return {spec.key for spec in ACTION_SCHEMAS[canonical_name].args if spec.kind is ArgKind.POINT}


def _convert_point(value: object, convention: str, dims: ScreenDims | None) -> object:
  """Turn a dialect point (object or ``[x, y]`` pair) into a canonical point dict."""
  if isinstance(value, list | tuple) and len(value) == 2:  # noqa: PLR2004
    value = {"x": value[0], "y": value[1]}
  if not isinstance(value, dict) or set(value) != {"x", "y"}:
    msg = f"point must be an {{x, y}} object or [x, y] pair, got {value!r}"
    raise GeometryError(msg)
  if convention == "pixel":
    if dims is None:
      msg = "pixel coordinates need screen dimensions"
      raise GeometryError(msg)
    return normalize_point(PixelPoint(value["x"], value["y"]), dims).as_dict()
  if convention == "unit_float":
    return {axis: unit_to_norm(value[axis], axis) for axis in ("x", "y")}
  # norm1000 values are checked when the canonical point is decoded
  return dict(value)


class UnificationTable:
  """Lookup structure over unification entries, read-only after construction."""

  def __init__(self, entries: list[UnificationEntry], version: int = 1) -> None:
    """Index entries by ``(dialect, source_name)``."""
    self.version = version
    self._index: dict[tuple[str, str], list[UnificationEntry]] = defaultdict(list)
    for entry in entries:
      self._index[entry.dialect, entry.source_name].append(entry)
    self.dialects = frozenset(entry.dialect for entry in entries)

  @classmethod
  def from_dict(cls, data: Mapping[str, Any]) -> UnificationTable:
    """Decode ``{"version": n, "entries": [...]}``."""
    try:
      entries = [UnificationEntry.from_dict(row) for row in data["entries"]]
    except (KeyError, TypeError, AttributeError) as err:
      msg = f"malformed unification table: {err}"
      raise UnificationError(msg, "*", "*") from err
    return cls(entries, version=int(data.get("version", 1)))

  @classmethod
  def from_file(cls, path: str | Path) -> UnificationTable:
    """Load a table from a JSON file."""
    with Path(path).open(encoding="utf-8") as f:
      return cls.from_dict(json.load(f))

  def entries_for(self, dialect: str, source_name: str) -> list[UnificationEntry]:
    """Return candidate entries; raises if the dialect or name is not mapped."""
    if dialect not in self.dialects:
      msg = f"dialect {dialect!r} is not registered; known dialects: {', '.join(sorted(self.dialects))}"
      raise UnificationError(msg, dialect, source_name)
    entries = self._index.get((dialect, source_name))
    if not entries:
      msg = f"{dialect} action {source_name!r} has no canonical mapping"
      raise UnificationError(msg, dialect, source_name)
    return entries

  def apply(self, entry: UnificationEntry, source_args: Mapping[str, Any], dims: ScreenDims | None) -> Action:
    """Translate source arguments through one entry."""
    if not isinstance(source_args, Mapping):
      msg = f"{entry.dialect} {entry.source_name!r} arguments must be an object, not {type(source_args).__name__}"
      raise ActionSchemaError(msg)
    unknown = sorted(key for key in source_args if key not in entry.argument_rename_map)
    if unknown:
      msg = f"unmapped arguments {', '.join(unknown)}"
      raise UnificationError(msg, entry.dialect, entry.source_name)
    arguments: dict[str, Any] = copy.deepcopy(entry.fixed_arguments)
    for source_key, value in source_args.items():
      target = entry.argument_rename_map[source_key]
      value = entry.value_map.get(source_key, {}).get(value, value) if isinstance(value, str) else value
      head, _, axis = target.partition(".")
      if axis:
        arguments.setdefault(head, {})[axis] = value
      else:
        arguments[head] = value
    for key in _point_keys(entry.canonical_name) & arguments.keys():
      arguments[key] = _convert_point(arguments[key], entry.coordinate_convention, dims)
    return action_from_envelope(entry.canonical_name, arguments)


@cache
def default_table() -> UnificationTable:
  """Load the bundled table once."""
  with resources.files("guiag.data").joinpath(DEFAULT_TABLE).open(encoding="utf-8") as f:
    return UnificationTable.from_dict(json.load(f))


def unify_action(
  source_name: str,
  source_args: Mapping[str, Any],
  dialect: str,
  *,
  dims: ScreenDims | None = None,
  table: UnificationTable | None = None,
) -> Action:
  """Map a dialect action onto the canonical space.

  Every entry registered for ``(dialect, source_name)`` is tried. Exactly one must produce a valid
  action; several distinct results are reported as ambiguous rather than guessed.
  """
  table = table or default_table()
  candidates = table.entries_for(dialect, source_name)
  results: list[Action] = []
  failures: list[str] = []
  for entry in candidates:
    try:
      action = table.apply(entry, source_args, dims)
    except (ActionError, GeometryError) as err:
      failures.append(str(err))
      continue
    if action not in results:
      results.append(action)
  if len(results) > 1:
    names = ", ".join(action.name for action in results)
    msg = f"{dialect} action {source_name!r} is ambiguous between: {names}"
    raise UnificationError(msg, dialect, source_name)
  if not results:
    if len(failures) == 1:
      msg = f"{dialect} action {source_name!r} could not be unified: {failures[0]}"
    else:
      msg = f"{dialect} action {source_name!r} matches no table entry ({'; '.join(failures)})"
    raise UnificationError(msg, dialect, source_name)
  logger.debug("Unified %s/%s -> %s", dialect, source_name, results[0].name)
  return results[0]
