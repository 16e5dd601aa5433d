"""Bundled example problems.

Two production-planning models ship with the package, each in two forms:

* ``example1_fuzzy`` / ``example2_fuzzy`` — coefficients as trapezoidal
  interval type-2 fuzzy numbers.
* ``example1_crisp`` / ``example2_crisp`` — the corresponding crisp
  models with the coefficient values the original studies actually
  solved. These are NOT bit-identical to ``defuzzify_program`` of the
  fuzzy forms: the source data carries a handful of internally
  inconsistent coefficients (documented per-file), and the crisp
  fixtures exist precisely so the downstream pipeline can be tested
  against the published end-to-end numbers.
"""

from __future__ import annotations

import json
from importlib import resources

from .errors import FileFormatError
from .sigmodel import Program, program_from_json

FIXTURE_NAMES = (
    "example1_fuzzy",
    "example1_crisp",
    "example2_fuzzy",
    "example2_crisp",
)


def load_fixture(name: str) -> Program:
    """Load a bundled problem by name.

    Raises FileFormatError for unknown names.
    """
    if name not in FIXTURE_NAMES:
        raise FileFormatError(
            f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}"
        )
    path = resources.files("it2fgp.data").joinpath(f"{name}.json")
    with path.open("r", encoding="utf-8") as fh:
        return program_from_json(json.load(fh))


def fixture_index() -> list[dict]:
    """Short descriptions of the bundled problems, for CLI/API listings."""
    out = []
    for name in FIXTURE_NAMES:
        p = load_fixture(name)
        out.append({
            "name": name,
            "kind": "crisp" if p.is_crisp() else "fuzzy",
            "variables": list(p.variables),
            "objectives": [o.sense for o in p.objectives],
            "constraints": len(p.constraints),
        })
    return out
