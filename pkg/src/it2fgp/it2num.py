"""Trapezoidal interval type-2 fuzzy numbers.

A value is a pair of trapezoids (upper and lower membership function),
each carrying four abscissae and two height marks. Arithmetic is exact
componentwise on the abscissae with min-combined heights; defuzzification
is the expected value: mean of the eight abscissae times mean of the
four heights. Ranking compares expected values.

All values are immutable; every operation is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import DivisionByZeroError, InvalidHeightError, InvalidNumberError

#: absolute tolerance for expected-value equality in ranking
RANK_TOL = 1e-12


@dataclass(frozen=True)
class Trapezoid:
    """One trapezoidal membership function: abscissae a1..a4, heights h1, h2.

    Heights must lie in (0, 1]. The ordering a1 <= a2 <= a3 <= a4 is
    expected but only warned about: published data sets violate it and
    no operation here depends on it.
    """

    a1: float
    a2: float
    a3: float
    a4: float
    h1: float
    h2: float

    @property
    def abscissae(self) -> tuple[float, float, float, float]:
        return (self.a1, self.a2, self.a3, self.a4)

    @property
    def heights(self) -> tuple[float, float]:
        return (self.h1, self.h2)

    def ordering_violations(self) -> list[tuple[int, float, float]]:
        """Adjacent abscissa pairs that are out of order.

        Returns a list of (position, left, right) with left > right,
        position being the 1-based index of the left abscissa.
        """
        a = self.abscissae
        return [(i + 1, a[i], a[i + 1]) for i in range(3) if a[i] > a[i + 1]]


@dataclass(frozen=True)
class TrapIT2FN:
    """Interval type-2 fuzzy number: upper and lower trapezoid.

    Footprint containment (lower inside upper) is deliberately not
    required; the bundled example data violates it.
    """

    upper: Trapezoid
    lower: Trapezoid

    def to_json(self) -> dict:
        return {
            "upper": [*self.upper.abscissae, *self.upper.heights],
            "lower": [*self.lower.abscissae, *self.lower.heights],
        }

    @staticmethod
    def from_json(obj: dict) -> "TrapIT2FN":
        try:
            u = [float(v) for v in obj["upper"]]
            l = [float(v) for v in obj["lower"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidNumberError(f"malformed IT2 record: {obj!r}") from exc
        if len(u) != 6 or len(l) != 6:
            raise InvalidNumberError(
                "IT2 record needs 6 numbers per trapezoid (a1..a4, h1, h2)"
            )
        value, _ = make_it2(Trapezoid(*u), Trapezoid(*l))
        return value


@dataclass(frozen=True)
class ValidationWarning:
    """Non-fatal finding attached to a constructed value."""

    part: str  # "upper" | "lower"
    message: str


def _check_trapezoid(t: Trapezoid, part: str) -> list[ValidationWarning]:
    for name, v in zip(("a1", "a2", "a3", "a4", "h1", "h2"),
                       (*t.abscissae, *t.heights)):
        if not math.isfinite(v):
            raise InvalidNumberError(f"{part}.{name} is not finite: {v!r}")
    for name, h in zip(("h1", "h2"), t.heights):
        if not 0.0 < h <= 1.0:
            raise InvalidHeightError(
                f"{part}.{name} = {h} outside (0, 1]"
            )
    return [
        ValidationWarning(part, f"ordering violated at position {i}: {x} > {y}")
        for i, x, y in t.ordering_violations()
    ]


def make_it2(upper: Trapezoid, lower: Trapezoid) -> tuple[TrapIT2FN, list[ValidationWarning]]:
    """Construct a value, validating heights/finiteness and collecting
    ordering warnings.

    Raises:
        InvalidHeightError: a height is outside (0, 1].
        InvalidNumberError: a field is not finite.
    """
    warnings = _check_trapezoid(upper, "upper") + _check_trapezoid(lower, "lower")
    return TrapIT2FN(upper=upper, lower=lower), warnings


def it2(upper: Iterable[float], lower: Iterable[float]) -> TrapIT2FN:
    """Shorthand constructor from two 6-tuples, discarding warnings."""
    value, _ = make_it2(Trapezoid(*upper), Trapezoid(*lower))
    return value


def _combine(a: Trapezoid, b: Trapezoid, op) -> Trapezoid:
    return Trapezoid(
        op(a.a1, b.a1), op(a.a2, b.a2), op(a.a3, b.a3), op(a.a4, b.a4),
        min(a.h1, b.h1), min(a.h2, b.h2),
    )


def it2_add(a: TrapIT2FN, b: TrapIT2FN) -> TrapIT2FN:
    """Componentwise sum; each result height is the min of the operands'."""
    return TrapIT2FN(
        _combine(a.upper, b.upper, lambda x, y: x + y),
        _combine(a.lower, b.lower, lambda x, y: x + y),
    )


def it2_sub(a: TrapIT2FN, b: TrapIT2FN) -> TrapIT2FN:
    """Componentwise difference (index-wise, not reversed); min heights."""
    return TrapIT2FN(
        _combine(a.upper, b.upper, lambda x, y: x - y),
        _combine(a.lower, b.lower, lambda x, y: x - y),
    )


def it2_mul(a: TrapIT2FN, b: TrapIT2FN) -> TrapIT2FN:
    """Componentwise product (no interval product); min heights."""
    return TrapIT2FN(
        _combine(a.upper, b.upper, lambda x, y: x * y),
        _combine(a.lower, b.lower, lambda x, y: x * y),
    )


def it2_scale(k: float, a: TrapIT2FN, reciprocal: bool = False) -> TrapIT2FN:
    """Scale all abscissae by k (or 1/k), keeping a's own heights.

    Raises:
        InvalidNumberError: k not finite.
        DivisionByZeroError: reciprocal form with k = 0.
    """
    if not math.isfinite(k):
        raise InvalidNumberError(f"scale factor not finite: {k!r}")
    if reciprocal:
        if k == 0.0:
            raise DivisionByZeroError("reciprocal scaling by k = 0")
        k = 1.0 / k

    def scale(t: Trapezoid) -> Trapezoid:
        return Trapezoid(k * t.a1, k * t.a2, k * t.a3, k * t.a4, t.h1, t.h2)

    return TrapIT2FN(scale(a.upper), scale(a.lower))


def expected_value(a: TrapIT2FN) -> float:
    """Defuzzified scalar: (1/8) sum of all abscissae times (1/4) sum of
    the four height marks."""
    abs_sum = sum(a.upper.abscissae) + sum(a.lower.abscissae)
    h_sum = sum(a.upper.heights) + sum(a.lower.heights)
    return (abs_sum / 8.0) * (h_sum / 4.0)


def it2_rank(a: TrapIT2FN, b: TrapIT2FN) -> int:
    """Order by expected value: +1 if a > b, -1 if a < b, 0 if equal
    within RANK_TOL."""
    diff = expected_value(a) - expected_value(b)
    if diff > RANK_TOL:
        return 1
    if diff < -RANK_TOL:
        return -1
    return 0


def reduce_to_type1(a: TrapIT2FN) -> Optional[Trapezoid]:
    """The common trapezoid when upper == lower and all four heights are
    equal; None otherwise."""
    u, l = a.upper, a.lower
    if u.abscissae != l.abscissae:
        return None
    hs = set(u.heights) | set(l.heights)
    if len(hs) != 1:
        return None
    return u


def crisp(value: float) -> TrapIT2FN:
    """Degenerate singleton (all abscissae = value, heights 1)."""
    t = Trapezoid(value, value, value, value, 1.0, 1.0)
    return TrapIT2FN(t, t)
