"""Single-objective nonlinear solves over the crisp constraint region.

Individual optima feed the payoff table, the variable box, and the
membership maximizations. The solver is a deterministic multistart:
quadratic-penalty outer loop, Nelder-Mead simplex reflection inner
search, projected-gradient polish, and a final active-set Newton
refinement of the karush-kuhn-tucker system for high-precision optima.

Resource-floor semantics: when MINIMIZING, >=-rows are treated as met
with equality (NlpConfig.min_sense_floor, default on). Every published
individual minimum this package reproduces sits exactly on its >=
boundary, including one case where the plain >=-region minimum is
strictly lower; the equality reading is what regenerates those tables.
Maximization always keeps >= as an inequality.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize
from scipy.stats import qmc

from .errors import InfeasibleError, NonConvergenceError, UnsupportedError
from .sigmodel import (
    MAXIMIZE,
    MINIMIZE,
    Program,
    SignomialFn,
    eval_batch,
    eval_fn,
    grad_fn,
)

#: scaled constraint violation below which a point counts as feasible
FEAS_TOL = 1e-6


@dataclass(frozen=True)
class NlpConfig:
    """Knobs for the multistart search. Defaults reproduce the bundled
    examples; results are bitwise-deterministic given (program, cfg)."""

    restarts: int = 64
    seed: int = 42
    penalty_weights: tuple[float, ...] = (1e2, 1e4, 1e6, 1e8)
    tol: float = 1e-8
    max_iter: int = 2000
    var_upper_guess: Optional[float] = None
    min_sense_floor: bool = True
    log_path: Optional[str] = None

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class PayoffEntry:
    """Individual optima of one objective: both senses."""

    max_x: tuple[float, ...]
    max_value: float
    min_x: tuple[float, ...]
    min_value: float


@dataclass(frozen=True)
class PayoffTable:
    entries: tuple[PayoffEntry, ...]

    def solutions(self) -> list[tuple[float, ...]]:
        out = []
        for e in self.entries:
            out.extend([e.max_x, e.min_x])
        return out

    def to_json(self) -> list[dict]:
        return [
            {"max_x": list(e.max_x), "max_value": e.max_value,
             "min_x": list(e.min_x), "min_value": e.min_value}
            for e in self.entries
        ]


@dataclass(frozen=True)
class Box:
    """Per-variable bounds, all lower >= 0."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("bound vectors disagree")
        for lo, hi in zip(self.lower, self.upper):
            if lo > hi or lo < 0:
                raise ValueError(f"bad bound pair ({lo}, {hi})")

    @property
    def n(self) -> int:
        return len(self.lower)

    def contains(self, x: Sequence[float], tol: float = 1e-9) -> bool:
        return all(lo - tol <= v <= hi + tol
                   for v, lo, hi in zip(x, self.lower, self.upper))

    def to_json(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper)}


# ---------------------------------------------------------------------------
# Feasible region
# ---------------------------------------------------------------------------

class _Region:
    """Constraint set of a crisp program, with optional >=-as-equality."""

    def __init__(self, p: Program, floor_equality: bool):
        self.rows = []
        for c in p.constraints:
            rel = c.relation
            if floor_equality and rel == ">=":
                rel = "="
            self.rows.append((c.fn, rel, float(c.rhs)))

    def residuals(self, x) -> np.ndarray:
        """Raw one-sided residuals (0 when satisfied)."""
        out = np.zeros(len(self.rows))
        for i, (fn, rel, b) in enumerate(self.rows):
            try:
                g = eval_fn(fn, x)
            except Exception:
                out[i] = math.inf
                continue
            if rel == "<=":
                out[i] = max(0.0, g - b)
            elif rel == ">=":
                out[i] = max(0.0, b - g)
            else:
                out[i] = abs(g - b)
        return out

    def violation(self, x) -> float:
        """Largest residual scaled by 1 + |rhs|."""
        res = self.residuals(x)
        scales = np.array([1.0 + abs(b) for _, _, b in self.rows])
        return float(np.max(res / scales)) if len(self.rows) else 0.0

    def penalty(self, x) -> float:
        res = self.residuals(x)
        if not np.all(np.isfinite(res)):
            return math.inf
        return float(np.dot(res, res))


def derive_search_bounds(p: Program, cfg: NlpConfig) -> np.ndarray:
    """Per-variable search upper bounds.

    From each <=-constraint with all-nonnegative coefficients, a term
    that is a monomial in a single variable with positive coefficient
    and exponent caps that variable at (rhs/coeff)**(1/exponent); the
    tightest cap wins. Variables no constraint caps fall back to
    cfg.var_upper_guess or 10 x the largest <=-rhs.
    """
    n = p.n
    ub = np.full(n, math.inf)
    max_rhs = 0.0
    for c in p.constraints:
        if c.relation != "<=":
            continue
        b = float(c.rhs)
        max_rhs = max(max_rhs, abs(b))
        if any(float(t.coeff) < 0 for t in c.fn.terms) or b <= 0:
            continue
        for t in c.fn.terms:
            nz = [(l, a) for l, a in enumerate(t.exponents) if a != 0.0]
            if len(nz) != 1:
                continue
            l, a = nz[0]
            coeff = float(t.coeff)
            if coeff <= 0 or a <= 0:
                continue
            ub[l] = min(ub[l], (b / coeff) ** (1.0 / a))
    fallback = cfg.var_upper_guess if cfg.var_upper_guess is not None \
        else (10.0 * max_rhs if max_rhs > 0 else 10.0)
    ub[~np.isfinite(ub)] = fallback
    return ub


# ---------------------------------------------------------------------------
# Inner machinery
# ---------------------------------------------------------------------------

def _nelder_mead(fun, x0, lo, hi, maxiter, xatol=1e-10, fatol=1e-12):
    res = _scipy_minimize(
        fun, x0, method="Nelder-Mead",
        bounds=list(zip(lo, hi)),
        options={"maxiter": maxiter, "xatol": xatol, "fatol": fatol},
    )
    return np.clip(res.x, lo, hi), res.fun, res.nit


def _safe_grad(fn: SignomialFn, x, eps=1e-8):
    """Gradient with variables clamped away from sqrt-type singularities."""
    xs = np.maximum(np.asarray(x, dtype=float), eps)
    return grad_fn(fn, xs)


def _projected_gradient(phi, grad_phi, x, lo, hi, iters=60):
    x = np.clip(np.asarray(x, dtype=float), lo, hi)
    fx = phi(x)
    for _ in range(iters):
        g = grad_phi(x)
        if not np.all(np.isfinite(g)):
            break
        step = 1.0
        improved = False
        while step > 1e-14:
            xn = np.clip(x - step * g, lo, hi)
            fn_ = phi(xn)
            if fn_ < fx - 1e-15:
                x, fx = xn, fn_
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return x, fx


def _kkt_newton(obj_fn: SignomialFn, sgn: float, region: _Region, x0,
                lo, hi, iters=40):
    """Active-set Newton refinement of the stationarity system.

    Detects active rows and active lower bounds at x0, then Newton-solves
      grad(sgn*f) + sum(lam_i * grad(g_i)) = 0  over inactive coordinates
      g_i(x) = b_i                              for active rows
      x_l = bound                               for active bounds
    with a finite-difference Jacobian. Returns None when the refinement
    fails or wanders; caller keeps the unrefined point then.
    """
    x0 = np.asarray(x0, dtype=float)
    n = len(x0)
    act_rows = [i for i, (fn, rel, b) in enumerate(region.rows)
                if rel == "=" or abs(eval_fn(fn, x0) - b) <= 1e-4 * (1 + abs(b))]
    act_lo = [l for l in range(n) if x0[l] - lo[l] <= 1e-6]
    act_hi = [l for l in range(n) if hi[l] - x0[l] <= 1e-6]
    free = [l for l in range(n) if l not in act_lo and l not in act_hi]
    m = len(act_rows)
    if not free and m == 0:
        return None

    def residual(z):
        x = x0.copy()
        x[free] = z[:len(free)]
        x[act_lo] = np.asarray(lo)[act_lo]
        x[act_hi] = np.asarray(hi)[act_hi]
        lam = z[len(free):]
        try:
            gf = sgn * _safe_grad(obj_fn, x)
            rows = []
            for j, i in enumerate(act_rows):
                fn, _, b = region.rows[i]
                gf = gf + lam[j] * _safe_grad(fn, x)
                rows.append(eval_fn(fn, x) - b)
        except Exception:
            return None
        return np.concatenate([gf[free], rows])

    z = np.concatenate([x0[free], np.zeros(m)])
    for _ in range(iters):
        r = residual(z)
        if r is None or not np.all(np.isfinite(r)):
            return None
        if np.max(np.abs(r)) < 1e-11:
            break
        J = np.zeros((len(r), len(z)))
        for k in range(len(z)):
            h = 1e-6 * (1 + abs(z[k]))
            zp = z.copy(); zp[k] += h
            zm = z.copy(); zm[k] -= h
            rp, rm = residual(zp), residual(zm)
            if rp is None or rm is None:
                return None
            J[:, k] = (rp - rm) / (2 * h)
        try:
            dz = np.linalg.lstsq(J, -r, rcond=None)[0]
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(dz)) or np.max(np.abs(dz)) > 10.0:
            return None
        z = z + dz
    x = x0.copy()
    x[free] = z[:len(free)]
    x[act_lo] = np.asarray(lo)[act_lo]
    x[act_hi] = np.asarray(hi)[act_hi]
    x = np.clip(x, lo, hi)
    if np.linalg.norm(x - x0) > 0.5 * (1 + np.linalg.norm(x0)):
        return None
    return x


def _sobol_starts(lo, hi, count, seed, salt):
    import warnings

    sampler = qmc.Sobol(d=len(lo), scramble=True, seed=int(seed) + salt)
    with warnings.catch_warnings():
        # balance warning for non-power-of-two counts is irrelevant here
        warnings.simplefilter("ignore", UserWarning)
        u = sampler.random(count)
    return lo + u * (np.asarray(hi) - np.asarray(lo))


@dataclass(frozen=True)
class SolveResult:
    x: tuple[float, ...]
    value: float


def _lex_less(a, b, tol=1e-12) -> bool:
    for ai, bi in zip(a, b):
        if ai < bi - tol:
            return True
        if ai > bi + tol:
            return False
    return False


def _solve_over(obj_fn, sense: str, region: _Region,
                lo: np.ndarray, hi: np.ndarray, cfg: NlpConfig,
                salt: int, log: Optional[list] = None) -> SolveResult:
    """Shared multistart driver for constrained and box-only solves.

    obj_fn is a SignomialFn or any callable x -> float; gradient-based
    polish stages run only for signomials.
    """
    sgn = -1.0 if sense == MAXIMIZE else 1.0
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    is_sig = isinstance(obj_fn, SignomialFn)
    value_of = (lambda x: eval_fn(obj_fn, x)) if is_sig else obj_fn

    def phi(x, rho):
        try:
            base = sgn * value_of(x)
        except Exception:
            return math.inf
        return base + rho * region.penalty(x)

    rho_final = cfg.penalty_weights[-1]
    starts = _sobol_starts(lo, hi, cfg.restarts, cfg.seed, salt)

    # Exploration pass over every restart with a light budget, then a
    # full-budget refinement of the most promising distinct basins.
    explore_budget = max(40, cfg.max_iter // 16)
    refine_budget = max(80, cfg.max_iter // max(1, len(cfg.penalty_weights)))
    rho_explore = cfg.penalty_weights[: max(1, len(cfg.penalty_weights) - 2)]

    explored = []  # (rank_value, start_index, x, iterations)
    for si in range(cfg.restarts):
        x = np.clip(starts[si], lo, hi)
        iters = 0
        for rho in rho_explore:
            x, _, nit = _nelder_mead(lambda v: phi(v, rho), x, lo, hi,
                                     explore_budget, xatol=1e-6, fatol=1e-9)
            iters += nit
        explored.append((phi(x, rho_final), si, x, iters))
        if log is not None:
            try:
                logged = float(value_of(x))
            except Exception:
                logged = math.nan
            log.append({"start": [float(v) for v in starts[si]],
                        "iterations": int(iters),
                        "value": logged,
                        "violation": float(region.violation(x))})

    explored.sort(key=lambda e: (e[0], e[1]))
    chosen, seen = [], []
    for rank, si, x, _ in explored:
        if not math.isfinite(rank):
            continue
        key = tuple(np.round(x, 3))
        if key in seen:
            continue
        seen.append(key)
        chosen.append(x)
        if len(chosen) >= 8:
            break
    if not chosen:
        chosen = [e[2] for e in explored[:4]]

    best = None  # (value, x, violation)
    best_any = None
    xatol = min(1e-10, cfg.tol * 1e-2)
    fatol = min(1e-12, cfg.tol * 1e-4)
    for x in chosen:
        for rho in cfg.penalty_weights:
            x, _, _ = _nelder_mead(lambda v: phi(v, rho), x, lo, hi,
                                   refine_budget, xatol=xatol, fatol=fatol)
        if is_sig:
            x, _ = _projected_gradient(
                lambda v: phi(v, rho_final),
                lambda v: sgn * _safe_grad(obj_fn, v)
                + rho_final * _penalty_grad(region, v),
                x, lo, hi)
            xr = _kkt_newton(obj_fn, sgn, region, x, lo, hi)
            if xr is not None and region.violation(xr) <= max(FEAS_TOL,
                                                              region.violation(x)):
                if sgn * eval_fn(obj_fn, xr) <= sgn * eval_fn(obj_fn, x) + 1e-9:
                    x = xr
        viol = region.violation(x)
        try:
            val = float(value_of(x))
        except Exception:
            continue
        if best_any is None or viol < best_any[2]:
            best_any = (val, x.copy(), viol)
        if viol <= FEAS_TOL:
            cand = (val, x.copy(), viol)
            if best is None:
                best = cand
            else:
                better = sgn * val < sgn * best[0] - 1e-10
                tie = abs(val - best[0]) <= 1e-10
                if better or (tie and _lex_less(x, best[1])):
                    best = cand
    if best is None:
        if best_any is not None and best_any[2] < 1e-2:
            raise NonConvergenceError(
                f"violation {best_any[2]:.3g} above tolerance after "
                f"{cfg.restarts} restarts",
                best_x=tuple(float(v) for v in best_any[1]),
                violation=best_any[2])
        raise InfeasibleError(
            f"no feasible point found across {cfg.restarts} restarts")
    return SolveResult(tuple(float(v) for v in best[1]), float(best[0]))


def _penalty_grad(region: _Region, x) -> np.ndarray:
    """Gradient of the squared-residual penalty (one-sided where needed)."""
    n = len(x)
    g = np.zeros(n)
    for fn, rel, b in region.rows:
        try:
            v = eval_fn(fn, x)
        except Exception:
            continue
        if rel == "<=":
            r = v - b
            if r <= 0:
                continue
        elif rel == ">=":
            r = v - b
            if r >= 0:
                continue
        else:
            r = v - b
        g += 2.0 * r * _safe_grad(fn, x)
    return g


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def solve_single(p: Program, objective: int, sense: str,
                 cfg: NlpConfig = NlpConfig()) -> SolveResult:
    """Optimize one objective of a crisp program, ignoring the others.

    Deterministic given (program, cfg). The returned point is feasible
    within FEAS_TOL (scaled); see the module docstring for the
    >=-row floor semantics under minimization.
    """
    if not p.is_crisp():
        raise InfeasibleError("solve_single needs a crisp program")
    if not 0 <= objective < len(p.objectives):
        raise IndexError(f"objective index {objective} out of range")
    if cfg.log_path is None:
        return _solve_single_cached(p, objective, sense, cfg)
    return _solve_single_impl(p, objective, sense, cfg)


def _solve_single_impl(p: Program, objective: int, sense: str,
                       cfg: NlpConfig) -> SolveResult:
    floor_eq = cfg.min_sense_floor and sense == MINIMIZE
    region = _Region(p, floor_equality=floor_eq)
    lo = np.zeros(p.n)
    hi = derive_search_bounds(p, cfg)
    salt = 1000003 * (objective + 1) + (1 if sense == MAXIMIZE else 2)
    log: Optional[list] = [] if cfg.log_path else None
    result = _solve_over(p.objectives[objective].fn, sense, region,
                         lo, hi, cfg, salt, log)
    if cfg.log_path and log is not None:
        with open(cfg.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"objective": objective, "sense": sense,
                                 "search_upper": [float(v) for v in hi]}) + "\n")
            for rec in log:
                fh.write(json.dumps(rec) + "\n")
    return result


@lru_cache(maxsize=64)
def _solve_single_cached(p: Program, objective: int, sense: str,
                         cfg: NlpConfig) -> SolveResult:
    # solve_single is pure and deterministic; repeated pipeline stages
    # (payoff tables, sessions, tests) reuse identical solves.
    return _solve_single_impl(p, objective, sense, cfg)


def payoff_table(p: Program, cfg: NlpConfig = NlpConfig()) -> PayoffTable:
    """Individual max and min of every objective via solve_single."""
    entries = []
    for k in range(len(p.objectives)):
        try:
            mx = solve_single(p, k, MAXIMIZE, cfg)
            mn = solve_single(p, k, MINIMIZE, cfg)
        except (InfeasibleError, NonConvergenceError) as exc:
            raise type(exc)(f"objective {k}: {exc}") from exc
        entries.append(PayoffEntry(mx.x, mx.value, mn.x, mn.value))
    return PayoffTable(tuple(entries))


def variable_box(t: PayoffTable) -> Box:
    """Componentwise hull of all payoff solutions."""
    pts = np.array(t.solutions(), dtype=float)
    if pts.size == 0:
        raise ValueError("empty payoff table")
    return Box(tuple(np.min(pts, axis=0)), tuple(np.max(pts, axis=0)))


def maximize_over_box(fn: SignomialFn, sense: str, box: Box,
                      cfg: NlpConfig = NlpConfig()) -> SolveResult:
    """Optimize a signomial over a plain box (no other constraints)."""
    region = _Region(Program(tuple(f"x{i}" for i in range(box.n)), (), ()), False)
    lo = np.asarray(box.lower, dtype=float)
    hi = np.asarray(box.upper, dtype=float)
    if np.all(lo == hi):
        return SolveResult(tuple(float(v) for v in lo),
                           float(eval_fn(fn, lo)))
    res = _solve_over(fn, sense, region, lo, hi, cfg, salt=7777777)
    # monotone objectives attain box faces; snap near-bound coordinates
    x = np.asarray(res.x, dtype=float)
    snapped = x.copy()
    span = np.maximum(hi - lo, 1e-30)
    snapped[np.abs(x - lo) / span < 1e-7] = lo[np.abs(x - lo) / span < 1e-7]
    snapped[np.abs(hi - x) / span < 1e-7] = hi[np.abs(hi - x) / span < 1e-7]
    sgn = -1.0 if sense == MAXIMIZE else 1.0
    if sgn * eval_fn(fn, snapped) <= sgn * res.value + 1e-12:
        return SolveResult(tuple(float(v) for v in snapped),
                           float(eval_fn(fn, snapped)))
    return res


def solve_callable(fun, p: Program, sense: str,
                   cfg: NlpConfig = NlpConfig(), salt: int = 424243) -> SolveResult:
    """Optimize an arbitrary scalar function of x over a crisp program's
    constraint region (derivative-free path only). Used for the
    max-min / min-max aggregate models."""
    if not p.is_crisp():
        raise InfeasibleError("solve_callable needs crisp constraints")
    region = _Region(p, floor_equality=False)
    lo = np.zeros(p.n)
    hi = derive_search_bounds(p, cfg)
    return _solve_over(fun, sense, region, lo, hi, cfg, salt)


def grid_oracle(p: Program, objective: int, sense: str, resolution: int,
                cfg: NlpConfig = NlpConfig(),
                bounds: Optional[np.ndarray] = None) -> SolveResult:
    """Exhaustive grid search; brute-force verification only.

    Floor-equality rows accept a band of half the largest single-step
    change of the row value, so the thin equality set stays populated
    on the grid.
    """
    if p.n > 4:
        raise UnsupportedError(f"grid oracle supports n <= 4, got {p.n}")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    lo = np.zeros(p.n)
    hi = np.asarray(bounds, dtype=float) if bounds is not None \
        else derive_search_bounds(p, cfg)
    axes = [np.linspace(lo[l], hi[l], resolution + 1) for l in range(p.n)]
    steps = (hi - lo) / np.maximum(resolution, 1)
    floor_eq = cfg.min_sense_floor and sense == MINIMIZE

    # per-row relation and acceptance band (floor rows accept a band of
    # the largest single-step change so the thin set stays populated)
    rows = []
    for c in p.constraints:
        b = float(c.rhs)
        tol = FEAS_TOL * (1 + abs(b))
        rel = c.relation
        if floor_eq and rel == ">=":
            rel = "="
        band = tol
        if rel == "=":
            probe = np.zeros((2 * p.n, p.n))
            center = (lo + hi) / 2
            for l in range(p.n):
                probe[2 * l] = center
                probe[2 * l + 1] = center
                probe[2 * l + 1, l] = min(center[l] + steps[l], hi[l])
            pv = eval_batch(c.fn, probe)
            band = 0.55 * max(abs(pv[2 * l + 1] - pv[2 * l])
                              for l in range(p.n)) + tol
        rows.append((c.fn, rel, b, band))

    obj_fn = p.objectives[objective].fn
    sgn = -1.0 if sense == MAXIMIZE else 1.0
    best_val, best_x = math.inf, None
    total = (resolution + 1) ** p.n
    chunk = max(1, min(total, 2_000_000 // max(1, p.n)))
    shape = tuple(len(ax) for ax in axes)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        coords = np.unravel_index(idx, shape)
        X = np.stack([axes[l][coords[l]] for l in range(p.n)], axis=1)
        feasible = np.ones(X.shape[0], dtype=bool)
        for fn, rel, b, band in rows:
            g = eval_batch(fn, X)
            if rel == "<=":
                feasible &= g <= b + band
            elif rel == ">=":
                feasible &= g >= b - band
            else:
                feasible &= np.abs(g - b) <= band
        if not np.any(feasible):
            continue
        vals = sgn * eval_batch(obj_fn, X[feasible])
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val = float(vals[j])
            best_x = X[feasible][j]
    if best_x is None:
        raise InfeasibleError("no feasible grid point at this resolution")
    return SolveResult(tuple(float(v) for v in best_x), sgn * best_val)
