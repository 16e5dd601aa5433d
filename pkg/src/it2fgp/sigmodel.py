"""Signomial program model: fuzzy and crisp variants.

A signomial is a signed sum of monomials c * prod(x_l ** a_l) with real
exponents. Programs hold maximize/minimize objectives and relational
constraints over nonnegative variables; coefficients are either
trapezoidal interval type-2 fuzzy numbers or plain reals. The fuzzy
variant defuzzifies coefficientwise via the expected value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .errors import (
    EvalDomainError,
    FileFormatError,
    SingularGradientError,
    StructuralError,
)
from .it2num import TrapIT2FN, expected_value

#: below this, a variable counts as "at zero" for gradient singularities
EPS_GRAD = 1e-9

Coefficient = Union[float, TrapIT2FN]

MAXIMIZE = "maximize"
MINIMIZE = "minimize"
RELATIONS = ("<=", ">=", "=")


@dataclass(frozen=True)
class Monomial:
    """One signed term: coeff * prod(x_l ** exponents[l])."""

    coeff: Coefficient
    exponents: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(float(e) for e in self.exponents))
        for e in self.exponents:
            if not math.isfinite(e):
                raise StructuralError(f"non-finite exponent {e!r}")


@dataclass(frozen=True)
class SignomialFn:
    """Sum of monomials sharing one variable dimension."""

    terms: tuple[Monomial, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise StructuralError("signomial needs at least one term")
        n = len(self.terms[0].exponents)
        if any(len(t.exponents) != n for t in self.terms):
            raise StructuralError("terms disagree on variable count")

    @property
    def dimension(self) -> int:
        return len(self.terms[0].exponents)

    def is_crisp(self) -> bool:
        return all(isinstance(t.coeff, (int, float)) for t in self.terms)

    def coefficients(self) -> list[Coefficient]:
        return [t.coeff for t in self.terms]


@dataclass(frozen=True)
class Objective:
    sense: str
    fn: SignomialFn
    name: str = ""

    def __post_init__(self):
        if self.sense not in (MAXIMIZE, MINIMIZE):
            raise StructuralError(f"unknown sense {self.sense!r}")


@dataclass(frozen=True)
class Constraint:
    fn: SignomialFn
    relation: str
    rhs: Coefficient
    name: str = ""

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise StructuralError(f"unknown relation {self.relation!r}")


@dataclass(frozen=True)
class Program:
    """Objectives plus constraints over nonnegative variables.

    The same shape serves the fuzzy and the crisp model; FuzzyProgram /
    CrispProgram below are thin aliases fixing the coefficient kind.
    """

    variables: tuple[str, ...]
    objectives: tuple[Objective, ...]
    constraints: tuple[Constraint, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "objectives", tuple(self.objectives))
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def n(self) -> int:
        return len(self.variables)

    def is_crisp(self) -> bool:
        return all(o.fn.is_crisp() for o in self.objectives) and all(
            c.fn.is_crisp() and isinstance(c.rhs, (int, float))
            for c in self.constraints
        )


FuzzyProgram = Program
CrispProgram = Program


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning"
    where: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors


def defuzzify_program(p: Program) -> Program:
    """Replace every fuzzy coefficient by its expected value, preserving
    structure, senses and relations. Crisp coefficients pass through."""

    def conv(c: Coefficient) -> float:
        if isinstance(c, TrapIT2FN):
            return expected_value(c)
        return float(c)

    def conv_fn(f: SignomialFn) -> SignomialFn:
        return SignomialFn(tuple(Monomial(conv(t.coeff), t.exponents) for t in f.terms))

    return Program(
        variables=p.variables,
        objectives=tuple(
            Objective(o.sense, conv_fn(o.fn), o.name) for o in p.objectives
        ),
        constraints=tuple(
            Constraint(conv_fn(c.fn), c.relation, conv(c.rhs), c.name)
            for c in p.constraints
        ),
        name=p.name,
    )


def _pow(base: float, exp: float) -> float:
    """x**a with 0**0 = 1 and 0**a = 0 for a > 0; errors otherwise."""
    if exp == 0.0:
        return 1.0
    if base == 0.0:
        if exp > 0.0:
            return 0.0
        raise EvalDomainError("0 raised to a negative exponent")
    if base < 0.0 and exp != round(exp):
        raise EvalDomainError(
            f"negative base {base} with fractional exponent {exp}"
        )
    return float(base) ** exp


def eval_fn(f: SignomialFn, x: Sequence[float]) -> float:
    """Evaluate a crisp signomial at a point."""
    if not f.is_crisp():
        raise StructuralError("eval_fn needs crisp coefficients")
    if len(x) != f.dimension:
        raise StructuralError(
            f"point has dimension {len(x)}, function expects {f.dimension}"
        )
    total = 0.0
    for t in f.terms:
        prod = float(t.coeff)
        for xl, a in zip(x, t.exponents):
            if prod == 0.0:
                break
            prod *= _pow(float(xl), a)
        total += prod
    return total


def eval_batch(f: SignomialFn, X: np.ndarray) -> np.ndarray:
    """Vectorised evaluation over rows of X (assumes X >= 0 and no
    negative exponents; used by the grid oracle)."""
    X = np.asarray(X, dtype=float)
    out = np.zeros(X.shape[0])
    for t in f.terms:
        prod = np.full(X.shape[0], float(t.coeff))
        for l, a in enumerate(t.exponents):
            if a == 0.0:
                continue
            prod = prod * np.power(X[:, l], a)
        out += prod
    return out


def grad_fn(f: SignomialFn, x: Sequence[float], eps_grad: float = EPS_GRAD) -> np.ndarray:
    """Analytic gradient of a crisp signomial.

    Raises SingularGradientError when some x_l <= eps_grad while a term
    exponent on variable l lies in (0, 1) or below 0.
    """
    if not f.is_crisp():
        raise StructuralError("grad_fn needs crisp coefficients")
    n = f.dimension
    if len(x) != n:
        raise StructuralError("dimension mismatch")
    x = [float(v) for v in x]
    g = np.zeros(n)
    for t in f.terms:
        c = float(t.coeff)
        if c == 0.0:
            continue
        for l, al in enumerate(t.exponents):
            if al == 0.0:
                continue
            if x[l] <= eps_grad and (al < 0.0 or 0.0 < al < 1.0):
                raise SingularGradientError(
                    f"gradient singular in variable {l} (exponent {al} at "
                    f"x[{l}] = {x[l]})",
                    var_index=l,
                )
            part = c * al * _pow(x[l], al - 1.0)
            for j, aj in enumerate(t.exponents):
                if j == l or aj == 0.0:
                    continue
                part *= _pow(x[j], aj)
            g[l] += part
    return g


def validate_program(p: Program) -> ValidationReport:
    """Structural errors plus data warnings, without raising."""
    findings: list[Finding] = []

    if len(p.objectives) < 2:
        findings.append(Finding("error", "objectives",
                                "multiobjective model needs at least 2 objectives"))
    if not p.constraints:
        findings.append(Finding("error", "constraints",
                                "model needs at least 1 constraint"))

    def check_fn(fn: SignomialFn, where: str):
        if fn.dimension != p.n:
            findings.append(Finding(
                "error", where,
                f"exponent vectors have length {fn.dimension}, expected {p.n}"))

    def check_coeff(c: Coefficient, where: str):
        if isinstance(c, TrapIT2FN):
            viols = (c.upper.ordering_violations(), c.lower.ordering_violations())
            parts = [name for name, v in zip(("upper", "lower"), viols) if v]
            if parts:
                detail = "; ".join(
                    f"{name}: " + ", ".join(f"a{i} = {a} > a{i+1} = {b}"
                                            for i, a, b in v)
                    for name, v in zip(("upper", "lower"), viols) if v
                )
                findings.append(Finding("warning", where,
                                        f"trapezoid ordering violated ({detail})"))
        elif not math.isfinite(float(c)):
            findings.append(Finding("error", where, f"non-finite coefficient {c!r}"))

    for i, o in enumerate(p.objectives):
        where = f"objective[{i}]"
        check_fn(o.fn, where)
        for t in o.fn.terms:
            check_coeff(t.coeff, where)
    for i, c in enumerate(p.constraints):
        where = f"constraint[{i}]"
        check_fn(c.fn, where)
        for t in c.fn.terms:
            check_coeff(t.coeff, where)
        check_coeff(c.rhs, where + ".rhs")

    # A maximize objective growing in a variable no <=-constraint caps
    # makes the model look unbounded.
    if p.constraints and p.objectives:
        capped = set()
        for c in p.constraints:
            if c.relation != "<=":
                continue
            for t in c.fn.terms:
                coeff = expected_value(t.coeff) if isinstance(t.coeff, TrapIT2FN) \
                    else float(t.coeff)
                if coeff <= 0.0:
                    continue
                for l, a in enumerate(t.exponents):
                    if a > 0.0:
                        capped.add(l)
        for i, o in enumerate(p.objectives):
            if o.sense != MAXIMIZE:
                continue
            for t in o.fn.terms:
                coeff = expected_value(t.coeff) if isinstance(t.coeff, TrapIT2FN) \
                    else float(t.coeff)
                for l, a in enumerate(t.exponents):
                    if a > 0.0 and coeff > 0.0 and l not in capped and l < p.n:
                        findings.append(Finding(
                            "warning", f"objective[{i}]",
                            f"variable {p.variables[l]} uncapped by any "
                            "<=-constraint; model may be unbounded"))
                        capped.add(l)  # one warning per variable
    return ValidationReport(tuple(findings))


# ---------------------------------------------------------------------------
# Problem file format
# ---------------------------------------------------------------------------

def _coeff_to_json(c: Coefficient):
    if isinstance(c, TrapIT2FN):
        return c.to_json()
    return float(c)


def _coeff_from_json(obj) -> Coefficient:
    if isinstance(obj, dict):
        return TrapIT2FN.from_json(obj)
    if isinstance(obj, (int, float)):
        return float(obj)
    raise FileFormatError(f"coefficient must be a number or an IT2 record: {obj!r}")


def _fn_to_json(f: SignomialFn) -> list[dict]:
    return [
        {"coeff": _coeff_to_json(t.coeff), "exponents": list(t.exponents)}
        for t in f.terms
    ]


def _fn_from_json(terms, where: str) -> SignomialFn:
    if not isinstance(terms, list) or not terms:
        raise FileFormatError(f"{where}: 'terms' must be a non-empty list")
    out = []
    for t in terms:
        try:
            out.append(Monomial(_coeff_from_json(t["coeff"]),
                                tuple(float(e) for e in t["exponents"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise FileFormatError(f"{where}: malformed term {t!r}") from exc
    return SignomialFn(tuple(out))


def program_to_json(p: Program) -> dict:
    return {
        "name": p.name,
        "variables": list(p.variables),
        "objectives": [
            {"sense": o.sense, "name": o.name, "terms": _fn_to_json(o.fn)}
            for o in p.objectives
        ],
        "constraints": [
            {
                "name": c.name,
                "terms": _fn_to_json(c.fn),
                "relation": c.relation,
                "rhs": _coeff_to_json(c.rhs),
            }
            for c in p.constraints
        ],
    }


def program_from_json(obj: dict) -> Program:
    if not isinstance(obj, dict):
        raise FileFormatError("problem file must hold a JSON object")
    try:
        variables = tuple(str(v) for v in obj["variables"])
        objs = obj["objectives"]
        cons = obj["constraints"]
    except KeyError as exc:
        raise FileFormatError(f"problem file missing key: {exc}") from exc
    if not isinstance(objs, list) or not isinstance(cons, list):
        raise FileFormatError("'objectives' and 'constraints' must be lists")

    objectives = []
    for i, o in enumerate(objs):
        try:
            sense = o["sense"]
        except (KeyError, TypeError) as exc:
            raise FileFormatError(f"objective[{i}] missing 'sense'") from exc
        if sense not in (MAXIMIZE, MINIMIZE):
            raise FileFormatError(f"objective[{i}]: unknown sense {sense!r}")
        objectives.append(Objective(
            sense, _fn_from_json(o.get("terms"), f"objective[{i}]"),
            str(o.get("name", ""))))

    constraints = []
    for i, c in enumerate(cons):
        try:
            relation = c["relation"]
            rhs = _coeff_from_json(c["rhs"])
        except (KeyError, TypeError) as exc:
            raise FileFormatError(f"constraint[{i}] malformed") from exc
        if relation not in RELATIONS:
            raise FileFormatError(f"constraint[{i}]: unknown relation {relation!r}")
        constraints.append(Constraint(
            _fn_from_json(c.get("terms"), f"constraint[{i}]"),
            relation, rhs, str(c.get("name", ""))))

    p = Program(variables, tuple(objectives), tuple(constraints),
                name=str(obj.get("name", "")))
    for o in p.objectives:
        if o.fn.dimension != p.n:
            raise FileFormatError("objective dimension does not match variables")
    for c in p.constraints:
        if c.fn.dimension != p.n:
            raise FileFormatError("constraint dimension does not match variables")
    return p
