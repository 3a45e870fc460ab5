from __future__ import annotations

import importlib
import inspect
import pkgutil
import re

import guiag

UNDERLINED_SECTION = re.compile(r"^\s*(Parameters|Returns|Raises|Yields)\s*\n\s*-{3,}\s*$", re.MULTILINE)


def _docstrings() -> list[tuple[str, str]]:
  out = []
  for info in pkgutil.walk_packages(guiag.__path__, "guiag."):
    module = importlib.import_module(info.name)
    for name, obj in vars(module).items():
      if getattr(obj, "__module__", None) != info.name:
        continue
      members = [obj, *filter(inspect.isroutine, vars(obj).values())] if inspect.isclass(obj) else [obj]
      out.extend((f"{info.name}.{name}", member.__doc__) for member in members)
  return [(where, doc) for where, doc in out if isinstance(doc, str)]


def test_docstrings_use_google_sections() -> None:
  offenders = [where for where, doc in _docstrings() if UNDERLINED_SECTION.search(doc)]

  assert _docstrings()
  assert offenders == []
