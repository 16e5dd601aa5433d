"""Fuzzy-goal memberships and their first-order linearization.

A maximize objective with aspiration s and lower tolerance limit L gets
the ramp (f - L)/(s - L), clamped to [0, 1] outside [L, s]; a minimize
objective with aspiration s and upper limit U gets (U - f)/(U - s).
The unclamped middle branch is itself a signomial (coefficients divided
by the interval width plus a constant term), which is what gets
maximized over the variable box and Taylor-expanded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateGoalError
from .it2num import TrapIT2FN
from .nlpcore import PayoffTable
from .sigmodel import MAXIMIZE, MINIMIZE, Monomial, SignomialFn, eval_fn, grad_fn

MAX_GOAL = "max-goal"
MIN_GOAL = "min-goal"


def min_width(aspiration: float) -> float:
    """Smallest admissible tolerance interval for a goal at this level."""
    return 1e-6 * (1.0 + abs(aspiration))


@dataclass(frozen=True)
class MembershipSpec:
    """One fuzzy goal: target level plus worst-acceptable level."""

    kind: str
    aspiration: float
    limit: float
    objective: int

    def __post_init__(self):
        if self.kind not in (MAX_GOAL, MIN_GOAL):
            raise ValueError(f"unknown goal kind {self.kind!r}")
        if self.width < min_width(self.aspiration):
            raise DegenerateGoalError(
                f"goal {self.objective}: interval [{min(self.aspiration, self.limit)}, "
                f"{max(self.aspiration, self.limit)}] is degenerate")
        if self.kind == MAX_GOAL and not self.limit < self.aspiration:
            raise DegenerateGoalError(
                f"max-goal needs limit < aspiration, got {self.limit} >= {self.aspiration}")
        if self.kind == MIN_GOAL and not self.aspiration < self.limit:
            raise DegenerateGoalError(
                f"min-goal needs aspiration < limit, got {self.aspiration} >= {self.limit}")

    @property
    def width(self) -> float:
        return abs(self.aspiration - self.limit)

    def to_json(self) -> dict:
        return {"kind": self.kind, "aspiration": self.aspiration,
                "limit": self.limit, "objective": self.objective}


@dataclass(frozen=True)
class LinearFn:
    """Affine function: coefficients . x + constant."""

    coefficients: tuple[float, ...]
    constant: float

    def __post_init__(self):
        vals = (*self.coefficients, self.constant)
        if not all(np.isfinite(vals)):
            raise ValueError("non-finite linear function")

    def __call__(self, x: Sequence[float]) -> float:
        return float(np.dot(self.coefficients, np.asarray(x, dtype=float))
                     + self.constant)

    def as_signomial(self) -> SignomialFn:
        n = len(self.coefficients)
        terms = [
            Monomial(c, tuple(1.0 if j == l else 0.0 for j in range(n)))
            for l, c in enumerate(self.coefficients)
        ]
        terms.append(Monomial(self.constant, (0.0,) * n))
        return SignomialFn(tuple(terms))

    def to_json(self) -> dict:
        return {"coeffs": list(self.coefficients), "constant": self.constant}


def build_goals(t: PayoffTable, senses: Sequence[str]) -> list[MembershipSpec]:
    """Goals from a payoff table: aspiration at each objective's own
    optimum, tolerance limit at its pessimum."""
    if len(senses) != len(t.entries):
        raise ValueError("payoff table and sense list disagree")
    goals = []
    for k, (entry, sense) in enumerate(zip(t.entries, senses)):
        if sense == MAXIMIZE:
            goals.append(MembershipSpec(MAX_GOAL, entry.max_value,
                                        entry.min_value, k))
        elif sense == MINIMIZE:
            goals.append(MembershipSpec(MIN_GOAL, entry.min_value,
                                        entry.max_value, k))
        else:
            raise ValueError(f"unknown sense {sense!r}")
    return goals


def membership_value(spec: MembershipSpec, value: float) -> float:
    """Clamped membership of an objective value."""
    if spec.kind == MAX_GOAL:
        raw = (value - spec.limit) / (spec.aspiration - spec.limit)
    else:
        raw = (spec.limit - value) / (spec.limit - spec.aspiration)
    return min(1.0, max(0.0, raw))


def eval_membership(spec: MembershipSpec, f: SignomialFn,
                    x: Sequence[float]) -> float:
    """Clamped membership of f at x."""
    return membership_value(spec, eval_fn(f, x))


def unclamped_membership(spec: MembershipSpec, f: SignomialFn) -> SignomialFn:
    """The middle ramp as an explicit signomial (no clamping).

    Max-goal: every coefficient of f divided by (s - L), constant term
    -L/(s - L) appended; min-goal symmetric with flipped signs.
    """
    if spec.kind == MAX_GOAL:
        scale = 1.0 / (spec.aspiration - spec.limit)
        shift = -spec.limit * scale
    else:
        scale = -1.0 / (spec.limit - spec.aspiration)
        shift = spec.limit * -scale
    n = f.dimension
    terms = [Monomial(float(t.coeff) * scale, t.exponents) for t in f.terms]
    terms.append(Monomial(shift, (0.0,) * n))
    return SignomialFn(tuple(terms))


def taylor_linearize(spec: MembershipSpec, f: SignomialFn,
                     x_star: Sequence[float]) -> LinearFn:
    """First-order expansion of the unclamped membership around x_star:
    mu(x*) + grad mu(x*) . (x - x*), returned as coefficients + constant.
    Exact for affine memberships."""
    mu = unclamped_membership(spec, f)
    g = grad_fn(mu, x_star)
    value = eval_fn(mu, x_star)
    const = value - float(np.dot(g, np.asarray(x_star, dtype=float)))
    return LinearFn(tuple(float(v) for v in g), const)
