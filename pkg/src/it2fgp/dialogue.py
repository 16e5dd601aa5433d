"""Interactive solution loop: propose, ask the decision maker, tighten.

A session runs the full pipeline once (defuzzify if needed, payoff
table, variable box, goals, membership maximization, Taylor rows, goal
LP) and then alternates with the decision maker: "satisfied" freezes the
incumbent proposal; "revise" names objectives whose achieved values
become their new tolerance limits, the nonlinear memberships are
re-linearized around the incumbent solution, and the LP is re-solved.

Reported membership values are always measured against the session's
ORIGINAL goals (clamped, from the original crisp objectives), which is
the scale a decision maker can compare across iterations; each
iteration's goal records still carry the current tightened limits.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DegenerateGoalError,
    InfeasibleError,
    InvalidStateError,
    It2FgpError,
    NoProgressError,
    StructuralError,
)
from .goalmem import (
    LinearFn,
    MembershipSpec,
    MAX_GOAL,
    build_goals,
    membership_value,
    min_width,
    taylor_linearize,
    unclamped_membership,
)
from .lpsolve import LpModel, LpSolution, assemble_fgp, simplex_solve
from .nlpcore import (
    Box,
    NlpConfig,
    PayoffTable,
    SolveResult,
    maximize_over_box,
    payoff_table,
    variable_box,
)
from .sigmodel import (
    MAXIMIZE,
    Program,
    defuzzify_program,
    eval_fn,
    program_to_json,
    validate_program,
)

SATISFIED = "satisfied"
REVISE = "revise"

AWAITING = "awaiting-decision"
FINISHED = "finished"
FAILED = "failed"


@dataclass(frozen=True)
class SessionConfig:
    nlp: NlpConfig = NlpConfig()
    relinearize_at_incumbent: bool = True
    allow_overshoot: bool = True
    strict_validation: bool = False

    def to_json(self) -> dict:
        return {
            "seed": self.nlp.seed,
            "restarts": self.nlp.restarts,
            "min_sense_floor": self.nlp.min_sense_floor,
            "relinearize_at_incumbent": self.relinearize_at_incumbent,
            "allow_overshoot": self.allow_overshoot,
            "strict_validation": self.strict_validation,
        }


@dataclass(frozen=True)
class Proposal:
    iteration: int
    x: tuple[float, ...]
    objectives: tuple[float, ...]
    memberships: tuple[float, ...]
    beta: float
    deviations: tuple[float, ...]
    linearization_points: tuple[tuple[float, ...], ...]

    def to_json(self) -> dict:
        return {
            "iteration": self.iteration,
            "x": list(self.x),
            "objectives": list(self.objectives),
            "memberships": list(self.memberships),
            "beta": self.beta,
            "deviations": list(self.deviations),
            "linearization_points": [list(p) for p in self.linearization_points],
        }


@dataclass(frozen=True)
class Decision:
    verdict: str
    targets: tuple[int, ...] = ()

    def __post_init__(self):
        if self.verdict not in (SATISFIED, REVISE):
            raise StructuralError(f"unknown verdict {self.verdict!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if self.verdict == REVISE and not self.targets:
            raise StructuralError("revise needs at least one target objective")

    def to_json(self) -> dict:
        out = {"verdict": self.verdict}
        if self.verdict == REVISE:
            out["targets"] = list(self.targets)
        return out


@dataclass(frozen=True)
class IterationRecord:
    goals: tuple[MembershipSpec, ...]
    linearizations: tuple[LinearFn, ...]
    proposal: Proposal
    decision: Optional[Decision] = None


@dataclass
class SessionState:
    source_program: Program
    crisp_program: Program
    config: SessionConfig
    payoff: Optional[PayoffTable] = None
    box: Optional[Box] = None
    original_goals: tuple[MembershipSpec, ...] = ()
    goals: tuple[MembershipSpec, ...] = ()
    iterations: list[IterationRecord] = field(default_factory=list)
    status: str = AWAITING
    failure_stage: Optional[str] = None
    failure_message: Optional[str] = None

    @property
    def proposals(self) -> list[Proposal]:
        return [it.proposal for it in self.iterations]

    @property
    def decisions(self) -> list[Decision]:
        return [it.decision for it in self.iterations if it.decision is not None]

    @property
    def incumbent(self) -> Optional[Proposal]:
        return self.iterations[-1].proposal if self.iterations else None


def _is_affine(fn) -> bool:
    return all(a in (0.0, 1.0) and True for t in fn.terms for a in t.exponents) and \
        all(sum(1 for a in t.exponents if a != 0.0) <= 1 for t in fn.terms)


def _linearize_all(s: SessionState, points: Optional[Sequence[Sequence[float]]] = None
                   ) -> tuple[list[LinearFn], list[tuple[float, ...]]]:
    """Taylor rows for every goal. Nonlinear memberships expand around
    the supplied per-goal points (or the fresh box argmax when None);
    affine ones are exact everywhere and use the box midpoint."""
    rows: list[LinearFn] = []
    used: list[tuple[float, ...]] = []
    mid = tuple((lo + hi) / 2.0 for lo, hi in zip(s.box.lower, s.box.upper))
    for i, spec in enumerate(s.goals):
        fn = s.crisp_program.objectives[spec.objective].fn
        if _is_affine(fn):
            point = mid
        elif points is not None:
            point = tuple(float(v) for v in points[i])
        else:
            mu = unclamped_membership(spec, fn)
            res = maximize_over_box(mu, MAXIMIZE, s.box, s.config.nlp)
            point = res.x
        rows.append(taylor_linearize(spec, fn, point))
        used.append(point)
    return rows, used


def _propose(s: SessionState, rows: Sequence[LinearFn],
             points: Sequence[tuple[float, ...]]) -> None:
    model = assemble_fgp(rows, s.box, allow_overshoot=s.config.allow_overshoot)
    sol = simplex_solve(model)
    if sol.status != "optimal":
        raise InfeasibleError(f"goal LP is {sol.status}")
    fvals = tuple(eval_fn(o.fn, sol.x) for o in s.crisp_program.objectives)
    mus = tuple(membership_value(g, fvals[g.objective]) for g in s.original_goals)
    prop = Proposal(
        iteration=len(s.iterations) + 1,
        x=sol.x,
        objectives=fvals,
        memberships=mus,
        beta=float(sol.beta),
        deviations=sol.d_minus,
        linearization_points=tuple(points),
    )
    s.iterations.append(IterationRecord(
        goals=tuple(s.goals), linearizations=tuple(rows), proposal=prop))


def open_session(p: Program, config: SessionConfig = SessionConfig()) -> SessionState:
    """Run the pipeline to the first proposal.

    Any stage failure leaves a session with status "failed" and the
    stage tag instead of raising.
    """
    s = SessionState(source_program=p, crisp_program=p, config=config)
    stage = "validate"
    try:
        report = validate_program(p)
        if not report.ok:
            raise StructuralError("; ".join(f.message for f in report.errors))
        if config.strict_validation and report.warnings:
            raise StructuralError(
                "strict validation: " + "; ".join(f.message for f in report.warnings))
        stage = "defuzzify"
        s.crisp_program = p if p.is_crisp() else defuzzify_program(p)
        stage = "payoff"
        s.payoff = payoff_table(s.crisp_program, config.nlp)
        stage = "box"
        s.box = variable_box(s.payoff)
        stage = "goals"
        senses = [o.sense for o in s.crisp_program.objectives]
        s.goals = tuple(build_goals(s.payoff, senses))
        s.original_goals = s.goals
        stage = "linearize"
        rows, points = _linearize_all(s)
        stage = "solve"
        _propose(s, rows, points)
    except It2FgpError as exc:
        s.status = FAILED
        s.failure_stage = stage
        s.failure_message = str(exc)
        return s
    s.status = AWAITING
    return s


def decide(s: SessionState, d: Decision) -> SessionState:
    """Apply a decision-maker verdict, mutating and returning the session.

    satisfied: freeze the incumbent proposal (terminal).
    revise: achieved values of the targeted objectives become their new
    tolerance limits (only when that genuinely tightens and keeps the
    interval wide enough), memberships are rebuilt, nonlinear ones
    re-linearized around the incumbent x, and the LP re-solved.
    """
    if s.status != AWAITING:
        raise InvalidStateError(f"cannot decide on a {s.status} session")
    record = s.iterations[-1]
    if d.verdict == SATISFIED:
        s.iterations[-1] = replace(record, decision=d)
        s.status = FINISHED
        return s

    incumbent = record.proposal
    for t in d.targets:
        if not 0 <= t < len(s.goals):
            raise StructuralError(f"revise target {t} out of range")

    new_goals = list(s.goals)
    changed = False
    for t in d.targets:
        spec = new_goals[t]
        achieved = incumbent.objectives[spec.objective]
        if spec.kind == MAX_GOAL:
            if achieved <= spec.limit:
                continue  # would loosen or repeat; hold the old limit
            if spec.aspiration - achieved < min_width(spec.aspiration):
                raise NoProgressError(
                    f"goal {t}: new lower limit {achieved} collapses the "
                    f"interval against aspiration {spec.aspiration}")
            new_goals[t] = replace(spec, limit=achieved)
        else:
            if achieved >= spec.limit:
                continue
            if achieved - spec.aspiration < min_width(spec.aspiration):
                raise NoProgressError(
                    f"goal {t}: new upper limit {achieved} collapses the "
                    f"interval against aspiration {spec.aspiration}")
            new_goals[t] = replace(spec, limit=achieved)
        changed = True
    if not changed:
        raise NoProgressError(
            "revision changed no tolerance limit; already at those levels")

    s.iterations[-1] = replace(record, decision=d)
    s.goals = tuple(new_goals)
    if s.config.relinearize_at_incumbent:
        points = [incumbent.x] * len(s.goals)
        rows, used = _linearize_all(s, points)
    else:
        rows, used = _linearize_all(s)  # literal reading: fresh box argmax
    _propose(s, rows, used)
    return s


def replay(p: Program, decisions: Sequence[Decision],
           config: SessionConfig = SessionConfig()) -> SessionState:
    """Scripted decision maker: open a session and apply decisions until
    finished or the script runs out."""
    s = open_session(p, config)
    for d in decisions:
        if s.status != AWAITING:
            break
        decide(s, d)
    return s


def session_report(s: SessionState) -> dict:
    """Full machine-readable trace of the session so far."""
    out = {
        "program": program_to_json(s.source_program),
        "config": s.config.to_json(),
        "status": s.status,
        "iterations": [
            {
                "goals": [g.to_json() for g in it.goals],
                "linearizations": [ln.to_json() for ln in it.linearizations],
                "proposal": it.proposal.to_json(),
                "decision": it.decision.to_json() if it.decision else None,
            }
            for it in s.iterations
        ],
    }
    if s.payoff is not None:
        out["payoff"] = s.payoff.to_json()
    if s.box is not None:
        out["box"] = s.box.to_json()
    if s.original_goals:
        out["original_goals"] = [g.to_json() for g in s.original_goals]
    if s.status == FAILED:
        out["failure"] = {"stage": s.failure_stage, "message": s.failure_message}
    return out
