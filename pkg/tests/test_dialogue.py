import numpy as np
import pytest

from it2fgp.dialogue import (
    AWAITING,
    Decision,
    FAILED,
    FINISHED,
    SessionConfig,
    decide,
    open_session,
    replay,
    session_report,
)
from it2fgp.errors import InvalidStateError, NoProgressError, StructuralError
from it2fgp.goalmem import membership_value
from it2fgp.sigmodel import (
    Constraint,
    Monomial,
    Objective,
    Program,
    SignomialFn,
    eval_fn,
)


def lin(coeffs, const=None):
    n = len(coeffs)
    terms = [Monomial(c, tuple(1.0 if j == i else 0.0 for j in range(n)))
             for i, c in enumerate(coeffs)]
    if const is not None:
        terms.append(Monomial(const, (0.0,) * n))
    return SignomialFn(tuple(terms))


class TestOpenSession:
    def test_example2_first_proposal(self, e2_replayed):
        p1 = e2_replayed.proposals[0]
        assert p1.iteration == 1
        assert p1.x == pytest.approx((1.050703, 3.331360, 1.432132), abs=1e-3)
        assert p1.objectives[0] == pytest.approx(270.3667, abs=1e-2)
        assert p1.objectives[1] == pytest.approx(20.8201, abs=1e-2)
        assert p1.memberships[0] == pytest.approx(0.9305, abs=1e-3)
        assert p1.memberships[1] == pytest.approx(1.0, abs=1e-9)
        assert p1.beta <= 1e-9

    def test_example1_first_proposal(self, e1_session):
        s = e1_session
        assert s.status == AWAITING
        p1 = s.incumbent
        assert p1.x == pytest.approx((0.456917, 12.601091, 2.047627), abs=1e-3)
        assert p1.objectives[0] == pytest.approx(75.8695, abs=1e-2)
        assert p1.objectives[1] == pytest.approx(54.6985, abs=1e-2)
        assert p1.memberships[1] == pytest.approx(1.0, abs=1e-9)
        assert p1.beta <= 0.03

    def test_memberships_and_objectives_consistent(self, e1_session):
        s = e1_session
        p1 = s.incumbent
        for k, o in enumerate(s.crisp_program.objectives):
            assert p1.objectives[k] == pytest.approx(
                eval_fn(o.fn, p1.x), abs=1e-12)
        for g in s.original_goals:
            mu = membership_value(g, p1.objectives[g.objective])
            assert p1.memberships[g.objective] == pytest.approx(mu, abs=1e-12)
            assert 0.0 <= mu <= 1.0

    def test_affine_program_linearization_is_exact(self):
        p = Program(
            ("x1", "x2"),
            (Objective("maximize", lin([3.0, 1.0])),
             Objective("minimize", lin([1.0, 2.0]))),
            (Constraint(lin([1.0, 0.0]), "<=", 4.0),
             Constraint(lin([0.0, 1.0]), "<=", 3.0),
             Constraint(lin([1.0, 1.0]), ">=", 1.0)),
        )
        s = open_session(p, SessionConfig())
        assert s.status == AWAITING
        rows = s.iterations[0].linearizations
        for row, goal in zip(rows, s.goals):
            fn = s.crisp_program.objectives[goal.objective].fn
            width = goal.width
            sign = 1.0 if goal.kind == "max-goal" else -1.0
            for c_row, t in zip(row.coefficients, fn.terms):
                assert c_row == pytest.approx(sign * float(t.coeff) / width,
                                              abs=1e-9)

    def test_failed_session_carries_stage(self):
        p = Program(
            ("x1",),
            (Objective("maximize", lin([1.0])),
             Objective("minimize", lin([1.0]))),
            (Constraint(lin([1.0]), "<=", 1.0),
             Constraint(lin([1.0]), ">=", 5.0)),
        )
        s = open_session(p, SessionConfig(nlp=__import__("it2fgp").NlpConfig(
            restarts=8)))
        assert s.status == FAILED
        assert s.failure_stage == "payoff"
        assert s.proposals == []
        report = session_report(s)
        assert report["failure"]["stage"] == "payoff"
        assert report["iterations"] == []


class TestDecide:
    def test_revise_then_satisfied_example2(self, e2_replayed):
        s = e2_replayed
        assert s.status == FINISHED
        assert len(s.proposals) == 2
        p1, p2 = s.proposals
        # the achieved profit became the new lower tolerance limit
        assert s.goals[0].limit == pytest.approx(p1.objectives[0], abs=1e-12)
        assert s.goals[0].limit > s.original_goals[0].limit
        # untargeted goal unchanged
        assert s.goals[1] == s.original_goals[1]
        # second proposal: x2 at its box floor, beta strictly positive
        assert p2.x == pytest.approx((1.050703, 3.208859, 1.722640), abs=1e-3)
        assert p2.beta == pytest.approx(0.075278, abs=1e-3)
        assert p2.objectives[0] == pytest.approx(280.2625, abs=1e-2)
        assert p2.objectives[1] == pytest.approx(21.5758, abs=1e-2)
        # reported memberships stay on the original scale
        assert p2.memberships[0] == pytest.approx(0.99215, abs=1e-3)
        assert p2.memberships[1] == pytest.approx(0.924722, abs=1e-3)

    def test_tightened_goal_rates_old_value_zero(self, e2_replayed):
        s = e2_replayed
        p1 = s.proposals[0]
        new_goal = s.goals[0]
        assert membership_value(new_goal, p1.objectives[0]) == 0.0

    def test_limits_monotone_and_wide(self, e2_replayed):
        s = e2_replayed
        seen = [it.goals for it in s.iterations]
        for earlier, later in zip(seen, seen[1:]):
            assert later[0].limit >= earlier[0].limit  # max goal tightens up
            assert later[1].limit <= earlier[1].limit  # min goal tightens down
        for goals in seen:
            for g in goals:
                assert g.width >= 1e-6

    def test_satisfied_freezes(self, e1_crisp):
        s = open_session(e1_crisp, SessionConfig())
        decide(s, Decision("satisfied"))
        assert s.status == FINISHED
        assert s.decisions[-1].verdict == "satisfied"
        with pytest.raises(InvalidStateError):
            decide(s, Decision("revise", (0,)))

    def test_revise_needs_targets(self):
        with pytest.raises(StructuralError):
            Decision("revise", ())
        with pytest.raises(StructuralError):
            Decision("maybe")

    def test_revise_target_out_of_range(self, e1_crisp):
        s = open_session(e1_crisp, SessionConfig())
        with pytest.raises(StructuralError):
            decide(s, Decision("revise", (5,)))

    def test_no_progress_when_goal_fully_met(self, e2_crisp):
        # objective 1 sits exactly at its aspiration in proposal 1, so
        # tightening it would collapse the interval
        s = open_session(e2_crisp, SessionConfig())
        goals_before = s.goals
        with pytest.raises(NoProgressError):
            decide(s, Decision("revise", (1,)))
        assert s.status == AWAITING
        assert s.goals == goals_before
        assert len(s.proposals) == 1


class TestReplayAndReport:
    def test_replay_is_bitwise_deterministic(self, e2_crisp, e2_replayed):
        script = [Decision("revise", (0,)), Decision("satisfied")]
        again = replay(e2_crisp, script, SessionConfig())
        assert len(again.proposals) == len(e2_replayed.proposals)
        for a, b in zip(again.proposals, e2_replayed.proposals):
            assert a.x == b.x
            assert a.objectives == b.objectives
            assert a.memberships == b.memberships
            assert a.beta == b.beta
            assert a.deviations == b.deviations

    def test_replay_stops_after_satisfied(self, e2_crisp):
        script = [Decision("satisfied"), Decision("revise", (0,))]
        s = replay(e2_crisp, script, SessionConfig())
        assert s.status == FINISHED
        assert len(s.proposals) == 1

    def test_report_shape_two_iterations(self, e2_replayed):
        report = session_report(e2_replayed)
        assert report["status"] == FINISHED
        assert len(report["iterations"]) == 2
        decisions = [it["decision"] for it in report["iterations"]]
        assert decisions[0] == {"verdict": "revise", "targets": [0]}
        assert decisions[1] == {"verdict": "satisfied"}
        assert len(report["payoff"]) == 2
        assert set(report["box"]) == {"lower", "upper"}
        for it in report["iterations"]:
            assert set(it["proposal"]) >= {"x", "objectives", "memberships",
                                           "beta", "deviations"}

    def test_report_fresh_session(self, e1_session):
        report = session_report(e1_session)
        assert len(report["iterations"]) == 1
        assert report["iterations"][0]["decision"] is None


class TestRelinearizationFlag:
    def test_literal_reading_reruns_membership_argmax(self, e2_crisp):
        # with the flag off, iteration 2 re-expands at the fresh box
        # argmax instead of the incumbent; both must run to completion
        s = replay(e2_crisp, [Decision("revise", (0,))],
                   SessionConfig(relinearize_at_incumbent=False))
        assert s.status == AWAITING
        assert len(s.proposals) == 2
        p2 = s.proposals[1]
        # the expansion point recorded for the nonlinear goal is the box
        # argmax corner, not the incumbent
        pt = s.iterations[1].proposal.linearization_points[0]
        assert pt == pytest.approx((s.box.upper[0], s.box.upper[1],
                                    s.box.upper[2]), abs=1e-4)
        assert 0.0 <= p2.beta <= 1.0
