"""Comparison baselines and published reference rows.

The reference tables store, verbatim, the solutions reported for the
bundled examples by the interactive method and by three earlier
goal-programming formulations. They are display-only fixtures: the
earlier methods' models are not reproduced here (their formulations are
not fully specified in the source material). A weighted-additive solver
is provided to exercise the goal-weight machinery; it is labeled
distinctly and is NOT one of the stored reference methods.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import DegenerateGoalError, StructuralError
from .goalmem import LinearFn, MembershipSpec
from .lpsolve import LpSolution, assemble_weighted, simplex_solve
from .nlpcore import Box


@dataclass(frozen=True)
class ReferenceRow:
    """One published result row: method label, solution, values."""

    method: str
    x: Optional[tuple[float, ...]]
    f: tuple[float, ...]
    mu: tuple[float, ...]

    @property
    def membership_sum(self) -> float:
        return sum(self.mu)


_REFERENCE: dict[int, tuple[ReferenceRow, ...]] = {
    1: (
        ReferenceRow("interactive-taylor", (0.458, 12.710, 1.946),
                     (74.938, 54.699), (0.963, 1.00)),
        ReferenceRow("mohamed-fgp", (0.348, 13.677, 1.549),
                     (68.894, 56.342), (0.834, 0.928)),
        ReferenceRow("weighted-fgp-model-1", (0.341, 13.782, 1.418),
                     (67.404, 56.191), (0.801, 0.935)),
        ReferenceRow("weighted-fgp-model-2", (0.315, 12.607, 2.334),
                     (75.950, 55.443), (0.984, 0.968)),
    ),
    2: (
        ReferenceRow("interactive-taylor", (1.051, 3.209, 1.697),
                     (279.275, 21.471), (0.986, 0.935)),
        ReferenceRow("mohamed-fgp", None, (263.617, 22.876), (0.944, 0.795)),
        ReferenceRow("weighted-fgp-model-1", None, (257.515, 21.355),
                     (0.851, 0.947)),
        ReferenceRow("weighted-fgp-model-2", None, (280.011, 21.683),
                     (0.990, 0.914)),
    ),
}


def reference_table(example_id: int) -> list[ReferenceRow]:
    """Stored comparison rows for example 1 or 2."""
    try:
        return list(_REFERENCE[example_id])
    except KeyError:
        raise StructuralError(f"unknown example id {example_id!r}") from None


def goal_weights(specs: Sequence[MembershipSpec]) -> list[float]:
    """Relative goal weights: reciprocal of each tolerance interval."""
    weights = []
    for s in specs:
        if s.width <= 0:
            raise DegenerateGoalError(f"goal {s.objective} has zero width")
        weights.append(1.0 / s.width)
    return weights


def solve_weighted_additive(goals: Sequence[LinearFn], box: Box,
                            weights: Sequence[float],
                            allow_overshoot: bool = True) -> LpSolution:
    """Minimize the weighted sum of goal shortfalls over the same goal
    rows as the flagship model, without the max-shortfall machinery."""
    model = assemble_weighted(goals, box, weights, allow_overshoot)
    return simplex_solve(model)


def comparison_csv(example_id: int) -> str:
    """Reference rows as CSV: method,x1..xn,f1..fl,mu1..mul."""
    rows = reference_table(example_id)
    nx = max(len(r.x) if r.x else 0 for r in rows)
    nf = max(len(r.f) for r in rows)
    nm = max(len(r.mu) for r in rows)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["method"] + [f"x{i+1}" for i in range(nx)]
                    + [f"f{i+1}" for i in range(nf)]
                    + [f"mu{i+1}" for i in range(nm)])
    for r in rows:
        xs = list(r.x) if r.x else [""] * nx
        writer.writerow([r.method] + xs + list(r.f) + list(r.mu))
    return buf.getvalue()
