"""Linear goal-program assembly and a self-contained simplex.

The flagship model minimizes the largest shortfall beta subject to one
equality row per linearized membership goal (goal value + d- [- d+] = 1),
beta >= d- rows, and the variable box. A bounded-variable two-phase
primal simplex with Bland's rule solves it; an exhaustive basic-solution
enumerator provides the independent optimum for tests and powers a
deterministic refinement across alternate optima.

The nonlinear max-min / min-max companions of the same goals solve the
aggregate membership directly over the original constraints via the
multistart machinery.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DegeneratePivotError,
    It2FgpError,
    StructuralError,
    UnsupportedError,
)
from .goalmem import LinearFn, MembershipSpec, unclamped_membership
from .nlpcore import Box, NlpConfig, SolveResult, solve_callable
from .sigmodel import MAXIMIZE, Program, SignomialFn, eval_fn

#: pivot magnitude below which the simplex reports numerical breakdown
PIVOT_TOL = 1e-11
#: row-satisfaction tolerance for optimal solutions
ROW_TOL = 1e-9
#: largest column count the enumerator accepts
ORACLE_CAP = 12


@dataclass(frozen=True)
class LpModel:
    """min c.v subject to A v = b, lo <= v <= up.

    <=-rows are already standardized with slack columns at build time.
    meta carries the goal-program column layout when applicable.
    """

    col_names: tuple[str, ...]
    lo: tuple[float, ...]
    up: tuple[float, ...]
    A: tuple[tuple[float, ...], ...]
    b: tuple[float, ...]
    c: tuple[float, ...]
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def ncols(self) -> int:
        return len(self.col_names)

    @property
    def nrows(self) -> int:
        return len(self.b)

    def arrays(self):
        return (np.asarray(self.A, dtype=float), np.asarray(self.b, dtype=float),
                np.asarray(self.c, dtype=float), np.asarray(self.lo, dtype=float),
                np.asarray(self.up, dtype=float))


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    columns: tuple[float, ...] = ()
    x: tuple[float, ...] = ()
    d_minus: tuple[float, ...] = ()
    d_plus: tuple[float, ...] = ()
    beta: Optional[float] = None
    objective: Optional[float] = None


def _extract(m: LpModel, v: np.ndarray, status="optimal") -> LpSolution:
    meta = m.meta
    c = np.asarray(m.c)
    xs = tuple(float(v[i]) for i in meta.get("idx_x", ()))
    dm = tuple(float(v[i]) for i in meta.get("idx_dm", ()))
    dp = tuple(float(v[i]) for i in meta.get("idx_dp", ()))
    beta = float(v[meta["idx_beta"]]) if "idx_beta" in meta else None
    return LpSolution(status=status, columns=tuple(float(w) for w in v),
                      x=xs, d_minus=dm, d_plus=dp, beta=beta,
                      objective=float(c @ v))


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

def assemble_fgp(goals: Sequence[LinearFn], box: Box,
                 allow_overshoot: bool = True) -> LpModel:
    """Linear goal program: min beta, goal rows equal 1, beta >= d-.

    allow_overshoot adds zero-cost d+ columns so rows stay feasible where
    a linearized membership exceeds 1 on the box (which happens: the box
    relaxes the original constraints). Without them the equality rows
    force every goal value <= 1.
    """
    goals = list(goals)
    if not goals:
        raise StructuralError("assemble_fgp needs at least one goal")
    n = box.n
    l = len(goals)
    for g in goals:
        if len(g.coefficients) != n:
            raise StructuralError("goal dimension does not match box")

    names = [f"x{i+1}" for i in range(n)]
    lo = list(box.lower)
    up = list(box.upper)
    idx_x = list(range(n))

    idx_dm = list(range(n, n + l))
    names += [f"d{k+1}-" for k in range(l)]
    lo += [0.0] * l
    up += [math.inf] * l

    idx_dp: list[int] = []
    if allow_overshoot:
        idx_dp = list(range(len(names), len(names) + l))
        names += [f"d{k+1}+" for k in range(l)]
        lo += [0.0] * l
        up += [math.inf] * l

    idx_beta = len(names)
    names.append("beta")
    lo.append(0.0)
    up.append(1.0)

    idx_slack = list(range(len(names), len(names) + l))
    names += [f"s{k+1}" for k in range(l)]
    lo += [0.0] * l
    up += [math.inf] * l

    ncols = len(names)
    A = np.zeros((2 * l, ncols))
    b = np.zeros(2 * l)
    for k, g in enumerate(goals):
        A[k, idx_x] = g.coefficients
        A[k, idx_dm[k]] = 1.0
        if allow_overshoot:
            A[k, idx_dp[k]] = -1.0
        b[k] = 1.0 - g.constant
        # d_k- - beta + s_k = 0  (beta >= d_k-)
        A[l + k, idx_dm[k]] = 1.0
        A[l + k, idx_beta] = -1.0
        A[l + k, idx_slack[k]] = 1.0
        b[l + k] = 0.0

    c = np.zeros(ncols)
    c[idx_beta] = 1.0
    return LpModel(tuple(names), tuple(lo), tuple(up),
                   tuple(map(tuple, A)), tuple(b), tuple(c),
                   meta={"idx_x": idx_x, "idx_dm": idx_dm, "idx_dp": idx_dp,
                         "idx_beta": idx_beta, "goals": l})


def assemble_weighted(goals: Sequence[LinearFn], box: Box,
                      weights: Sequence[float],
                      allow_overshoot: bool = True) -> LpModel:
    """Weighted-additive variant: min sum(w_k d_k-), same goal rows,
    no beta machinery."""
    goals = list(goals)
    if len(weights) != len(goals):
        raise StructuralError("one weight per goal required")
    n = box.n
    l = len(goals)
    names = [f"x{i+1}" for i in range(n)]
    lo = list(box.lower)
    up = list(box.upper)
    idx_x = list(range(n))
    idx_dm = list(range(n, n + l))
    names += [f"d{k+1}-" for k in range(l)]
    lo += [0.0] * l
    up += [math.inf] * l
    idx_dp: list[int] = []
    if allow_overshoot:
        idx_dp = list(range(len(names), len(names) + l))
        names += [f"d{k+1}+" for k in range(l)]
        lo += [0.0] * l
        up += [math.inf] * l
    ncols = len(names)
    A = np.zeros((l, ncols))
    b = np.zeros(l)
    for k, g in enumerate(goals):
        A[k, idx_x] = g.coefficients
        A[k, idx_dm[k]] = 1.0
        if allow_overshoot:
            A[k, idx_dp[k]] = -1.0
        b[k] = 1.0 - g.constant
    c = np.zeros(ncols)
    for k, w in enumerate(weights):
        c[idx_dm[k]] = float(w)
    return LpModel(tuple(names), tuple(lo), tuple(up),
                   tuple(map(tuple, A)), tuple(b), tuple(c),
                   meta={"idx_x": idx_x, "idx_dm": idx_dm, "idx_dp": idx_dp,
                         "goals": l})


def dump_lp(m: LpModel) -> str:
    """Plain-text tableau: one row per line, fixed 12-char columns."""
    w = 12

    def cell(v) -> str:
        if isinstance(v, str):
            return v[:w - 1].rjust(w)
        return f"{v:11.5g}".rjust(w)

    lines = ["".join(cell(nm) for nm in ("row", *m.col_names, "rhs"))]
    for i, row in enumerate(m.A):
        lines.append("".join(cell(v) for v in (f"r{i+1}=", *row, m.b[i])))
    lines.append("".join(cell(v) for v in ("min", *m.c, 0.0)))
    lines.append("".join(cell(v) for v in ("lo", *m.lo, 0.0)))
    lines.append("".join(cell(v) for v in ("up", *m.up, 0.0)))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Bounded-variable two-phase simplex, Bland's rule
# ---------------------------------------------------------------------------

AT_LO, AT_UP, BASIC = 0, 1, 2


class _Simplex:
    def __init__(self, A, b, c, lo, up):
        self.A, self.b, self.c = A, b, c
        self.lo, self.up = lo, up
        self.m, self.n = A.shape

    def _values(self, basis, status):
        v = np.where(np.asarray(status) == AT_UP, self.up, self.lo).astype(float)
        v[~np.isfinite(v)] = 0.0
        nb_contrib = self.A @ v - self.A[:, basis] @ v[basis]
        B = self.A[:, basis]
        v[basis] = np.linalg.solve(B, self.b - nb_contrib)
        return v

    def run(self, basis, status, cost, maxiter=20000):
        """Minimize cost over the current standard form. Returns
        (kind, basis, status, values) with kind in optimal/unbounded."""
        A, b = self.A, self.b
        lo, up = self.lo, self.up
        for _ in range(maxiter):
            B = A[:, basis]
            try:
                Binv_b = self._values(basis, status)
            except np.linalg.LinAlgError as exc:
                raise DegeneratePivotError(f"singular basis: {exc}") from exc
            v = Binv_b
            lam = np.linalg.solve(B.T, cost[basis])
            red = cost - A.T @ lam
            entering = -1
            direction = 0.0
            for j in range(self.n):
                if status[j] == BASIC:
                    continue
                if status[j] == AT_LO and red[j] < -1e-10:
                    entering, direction = j, 1.0
                    break
                if status[j] == AT_UP and red[j] > 1e-10:
                    entering, direction = j, -1.0
                    break
            if entering < 0:
                return "optimal", basis, status, v
            dcol = np.linalg.solve(B, A[:, entering])
            # largest step before a bound is hit
            t_best = up[entering] - lo[entering]  # entering flips bound
            leave_row = -1
            leave_to = AT_LO
            for i in range(self.m):
                delta = direction * dcol[i]
                bi = basis[i]
                if delta > PIVOT_TOL:
                    t = (v[bi] - lo[bi]) / delta
                    to = AT_LO
                elif delta < -PIVOT_TOL:
                    if not math.isfinite(up[bi]):
                        continue
                    t = (up[bi] - v[bi]) / (-delta)
                    to = AT_UP
                else:
                    continue
                if t < t_best - 1e-12 or (
                        abs(t - t_best) <= 1e-12 and
                        (leave_row < 0 or basis[i] < basis[leave_row])):
                    t_best, leave_row, leave_to = t, i, to
            if not math.isfinite(t_best):
                return "unbounded", basis, status, v
            if leave_row < 0:
                # bound flip, no basis change
                status[entering] = AT_UP if status[entering] == AT_LO else AT_LO
                continue
            if abs(dcol[leave_row]) < PIVOT_TOL:
                raise DegeneratePivotError(
                    f"pivot {dcol[leave_row]:.3e} below threshold")
            status[basis[leave_row]] = leave_to
            status[entering] = BASIC
            basis[leave_row] = entering
        raise It2FgpError("simplex iteration cap exceeded")


def _simplex_core(m: LpModel):
    A, b, c, lo, up = m.arrays()
    nrows, ncols = A.shape
    if nrows == 0:
        v = np.where(np.isfinite(lo), lo, 0.0)
        return "optimal", v
    # Phase 1: artificial start from all columns at a finite bound
    start_status = [AT_LO if math.isfinite(lo[j]) else AT_UP for j in range(ncols)]
    v0 = np.array([lo[j] if s == AT_LO else up[j]
                   for j, s in enumerate(start_status)])
    resid = b - A @ v0
    art_sign = np.where(resid >= 0, 1.0, -1.0)
    A1 = np.hstack([A, np.diag(art_sign)])
    lo1 = np.concatenate([lo, np.zeros(nrows)])
    up1 = np.concatenate([up, np.full(nrows, math.inf)])
    c1 = np.concatenate([np.zeros(ncols), np.ones(nrows)])
    sx = _Simplex(A1, b, c1, lo1, up1)
    basis = list(range(ncols, ncols + nrows))
    status = start_status + [BASIC] * nrows
    kind, basis, status, v = sx.run(basis, status, c1)
    if kind != "optimal" or float(c1 @ v) > 1e-8:
        return "infeasible", None
    # Freeze artificials at zero and run phase 2 on the real objective
    lo1[ncols:] = 0.0
    up1[ncols:] = 0.0
    for j in range(ncols, ncols + nrows):
        if status[j] == AT_UP:
            status[j] = AT_LO
    c2 = np.concatenate([c, np.zeros(nrows)])
    sx2 = _Simplex(A1, b, c2, lo1, up1)
    kind, basis, status, v = sx2.run(basis, status, c2)
    if kind == "unbounded":
        return "unbounded", None
    return "optimal", v[:ncols]


def _deviation_sum(m: LpModel, v: np.ndarray) -> float:
    meta = m.meta
    idx = list(meta.get("idx_dm", ())) + list(meta.get("idx_dp", ()))
    return float(sum(v[i] for i in idx))


def _prefer(m: LpModel, a: np.ndarray, b: np.ndarray) -> bool:
    """True when candidate a beats incumbent b among equal-objective
    solutions: smaller total deviation, then lexicographically larger x."""
    da, db = _deviation_sum(m, a), _deviation_sum(m, b)
    if da < db - 1e-9:
        return True
    if da > db + 1e-9:
        return False
    for i in m.meta.get("idx_x", ()):
        if a[i] > b[i] + 1e-9:
            return True
        if a[i] < b[i] - 1e-9:
            return False
    return False


def _enumerate_basic_solutions(m: LpModel):
    """Yield every basic feasible solution (vertex) of the model."""
    A, b, c, lo, up = m.arrays()
    nrows, ncols = A.shape
    if ncols > ORACLE_CAP:
        raise UnsupportedError(
            f"enumeration supports <= {ORACLE_CAP} columns, got {ncols}")
    cols = range(ncols)
    for basis in itertools.combinations(cols, nrows):
        B = A[:, basis]
        if abs(np.linalg.det(B)) < 1e-10:
            continue
        nonbasic = [j for j in cols if j not in basis]
        choices = []
        for j in nonbasic:
            opts = []
            if math.isfinite(lo[j]):
                opts.append(lo[j])
            if math.isfinite(up[j]) and up[j] != lo[j]:
                opts.append(up[j])
            if not opts:
                opts = [0.0]
            choices.append(opts)
        for assign in itertools.product(*choices):
            v = np.zeros(ncols)
            v[nonbasic] = assign
            rhs = b - A[:, nonbasic] @ v[nonbasic]
            try:
                v[list(basis)] = np.linalg.solve(B, rhs)
            except np.linalg.LinAlgError:
                continue
            if np.all(v >= lo - 1e-9) and np.all(v <= up + 1e-9):
                yield np.clip(v, lo, up)


def vertex_oracle(m: LpModel) -> LpSolution:
    """Exhaustive enumeration of basic feasible solutions; exact optimum
    for verification. Supports models up to ORACLE_CAP columns."""
    best = None
    cvec = np.asarray(m.c)
    for v in _enumerate_basic_solutions(m):
        obj = float(cvec @ v)
        if best is None or obj < best[0] - 1e-11 or (
                abs(obj - best[0]) <= 1e-11 and _prefer(m, v, best[1])):
            best = (obj, v)
    if best is None:
        return LpSolution(status="infeasible")
    return _extract(m, best[1])


def simplex_solve(m: LpModel, refine: bool = True) -> LpSolution:
    """Two-phase bounded-variable primal simplex with Bland's rule.

    With refine (default), alternate optima of goal-program models are
    resolved deterministically: minimal total deviation, then
    lexicographically largest x. The refinement enumerates optimal
    vertices, so it is exact; it is skipped for models beyond the
    enumeration cap or without goal-program metadata.
    """
    kind, v = _simplex_core(m)
    if kind != "optimal":
        return LpSolution(status=kind)
    sol = _extract(m, v)
    if refine and "idx_x" in m.meta and m.ncols <= ORACLE_CAP:
        cvec = np.asarray(m.c)
        best = v
        for w in _enumerate_basic_solutions(m):
            if float(cvec @ w) <= sol.objective + 1e-9 and _prefer(m, w, best):
                best = w
        sol = _extract(m, best)
    return sol


def check_rows(m: LpModel, sol: LpSolution, tol: float = ROW_TOL) -> float:
    """Largest absolute row residual of a solution (diagnostics)."""
    A, b, _, _, _ = m.arrays()
    v = np.asarray(sol.columns)
    return float(np.max(np.abs(A @ v - b))) if len(b) else 0.0


# ---------------------------------------------------------------------------
# Nonlinear max-min / min-max companions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AggregateModel:
    """Max-min or min-max membership model over the original constraints."""

    form: str  # "max-min" | "min-max"
    program: Program
    specs: tuple[MembershipSpec, ...]


@dataclass(frozen=True)
class AggregateResult:
    x: tuple[float, ...]
    lam: float
    memberships: tuple[float, ...]


def assemble_maxmin(specs: Sequence[MembershipSpec], p: Program) -> AggregateModel:
    return AggregateModel("max-min", p, tuple(specs))


def assemble_minmax(specs: Sequence[MembershipSpec], p: Program) -> AggregateModel:
    return AggregateModel("min-max", p, tuple(specs))


def solve_aggregate(model: AggregateModel,
                    cfg: NlpConfig = NlpConfig()) -> AggregateResult:
    """Solve the aggregate membership model with the multistart engine.

    Both forms optimize the same quantity (beta = 1 - lambda), so their
    optima agree up to solver tolerance; they are kept separate for
    methodological comparison.
    """
    ratios = [unclamped_membership(s, model.program.objectives[s.objective].fn)
              for s in model.specs]

    def min_ratio(x) -> float:
        return min(eval_fn(r, x) for r in ratios)

    if model.form == "max-min":
        res = solve_callable(lambda x: min(1.0, min_ratio(x)),
                             model.program, MAXIMIZE, cfg, salt=515151)
        lam = min(1.0, max(0.0, res.value))
    else:
        res = solve_callable(lambda x: min(1.0, max(0.0, 1.0 - min_ratio(x))),
                             model.program, "minimize", cfg, salt=616161)
        lam = min(1.0, max(0.0, 1.0 - res.value))
    mus = tuple(min(1.0, max(0.0, eval_fn(r, res.x))) for r in ratios)
    return AggregateResult(res.x, lam, mus)
