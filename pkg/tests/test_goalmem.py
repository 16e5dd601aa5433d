import numpy as np
import pytest

from it2fgp.errors import DegenerateGoalError
from it2fgp.goalmem import (
    LinearFn,
    MAX_GOAL,
    MIN_GOAL,
    MembershipSpec,
    build_goals,
    eval_membership,
    membership_value,
    taylor_linearize,
    unclamped_membership,
)
from it2fgp.nlpcore import Box, maximize_over_box
from it2fgp.sigmodel import Monomial, SignomialFn, eval_fn

# goal specs built from the published example limits
E1_SPEC1 = MembershipSpec(MAX_GOAL, 76.694, 29.785, 0)
E1_SPEC2 = MembershipSpec(MIN_GOAL, 54.699, 77.653, 1)
E2_SPEC1 = MembershipSpec(MAX_GOAL, 281.523, 120.885, 0)
E2_SPEC2 = MembershipSpec(MIN_GOAL, 20.820, 30.858, 1)


def affine(coeffs, const=0.0):
    n = len(coeffs)
    terms = [Monomial(c, tuple(1.0 if j == i else 0.0 for j in range(n)))
             for i, c in enumerate(coeffs)]
    terms.append(Monomial(const, (0.0,) * n))
    return SignomialFn(tuple(terms))


class TestBuildGoals:
    def test_example1_goals_from_pipeline_payoff(self, e1_payoff):
        goals = build_goals(e1_payoff, ["maximize", "minimize"])
        g1, g2 = goals
        assert g1.kind == MAX_GOAL
        assert g1.aspiration == pytest.approx(76.167655, abs=2e-4)
        assert g1.limit == pytest.approx(29.785099, abs=2e-4)
        assert g2.kind == MIN_GOAL
        assert g2.aspiration == pytest.approx(54.698453, abs=2e-4)
        assert g2.limit == pytest.approx(77.652851, abs=2e-4)

    def test_example2_goals_match_published(self, e2_payoff):
        goals = build_goals(e2_payoff, ["maximize", "minimize"])
        assert goals[0].aspiration == pytest.approx(281.523, abs=0.2)
        assert goals[0].limit == pytest.approx(120.885, abs=0.2)
        assert goals[1].aspiration == pytest.approx(20.820, abs=0.2)
        assert goals[1].limit == pytest.approx(30.858, abs=0.2)

    def test_degenerate_payoff_rejected(self):
        from it2fgp.nlpcore import PayoffEntry, PayoffTable
        t = PayoffTable((PayoffEntry((1.0,), 5.0, (1.0,), 5.0),))
        with pytest.raises(DegenerateGoalError):
            build_goals(t, ["maximize"])


class TestEvalMembership:
    def test_profit_membership_at_published_solution(self, e1_crisp):
        # published end solution achieves 74.938 on the profit objective
        assert membership_value(E1_SPEC1, 74.938) == pytest.approx(0.963,
                                                                   abs=1e-3)

    def test_time_membership_iteration_two(self):
        assert membership_value(E2_SPEC2, 21.471) == pytest.approx(0.935,
                                                                   abs=1e-3)

    def test_branch_boundaries(self):
        assert membership_value(E1_SPEC1, E1_SPEC1.aspiration) == 1.0
        assert membership_value(E1_SPEC1, E1_SPEC1.limit) == 0.0
        assert membership_value(E1_SPEC1, 1e6) == 1.0
        assert membership_value(E1_SPEC1, -1e6) == 0.0
        assert membership_value(E1_SPEC2, E1_SPEC2.aspiration) == 1.0
        assert membership_value(E1_SPEC2, E1_SPEC2.limit) == 0.0

    def test_eval_membership_clamps(self, e1_crisp):
        f1 = e1_crisp.objectives[0].fn
        v = eval_membership(E1_SPEC1, f1, (0.458, 12.710, 1.946))
        assert 0.0 <= v <= 1.0
        assert v == pytest.approx(0.963, abs=1e-3)


class TestUnclampedMembership:
    def test_example1_profit_ramp_coefficients(self, e1_crisp):
        mu = unclamped_membership(E1_SPEC1, e1_crisp.objectives[0].fn)
        coeffs = [float(t.coeff) for t in mu.terms]
        published = [0.487, -0.056, 0.492, -0.085, 0.490, -0.078, -0.635]
        assert coeffs == pytest.approx(published, abs=5e-3)
        # coefficient identity: original coefficient over interval width
        width = E1_SPEC1.aspiration - E1_SPEC1.limit
        for t_mu, t_f in zip(mu.terms, e1_crisp.objectives[0].fn.terms):
            assert float(t_mu.coeff) == pytest.approx(
                float(t_f.coeff) / width, abs=1e-12)
        assert coeffs[-1] == pytest.approx(-E1_SPEC1.limit / width, abs=1e-12)

    def test_example1_time_ramp_coefficients(self, e1_crisp):
        mu = unclamped_membership(E1_SPEC2, e1_crisp.objectives[1].fn)
        coeffs = [float(t.coeff) for t in mu.terms]
        assert coeffs == pytest.approx([-0.120, -0.157, -0.169, 3.383],
                                       abs=5e-3)

    def test_affine_objective_gives_affine_membership(self):
        f = affine([4.0, -2.0])
        spec = MembershipSpec(MAX_GOAL, 10.0, 0.0, 0)
        mu = unclamped_membership(spec, f)
        assert [float(t.coeff) for t in mu.terms] == pytest.approx(
            [0.4, -0.2, 0.0, 0.0])

    def test_argmax_equivalence_with_raw_objective(self, e1_crisp, nlp_cfg):
        # the ramp is an affine transform of f, so both peak together
        box = Box((0.0, 12.344, 0.0), (0.457, 20.862, 2.703))
        f = e1_crisp.objectives[0].fn
        mu = unclamped_membership(E1_SPEC1, f)
        rf = maximize_over_box(f, "maximize", box, nlp_cfg)
        rm = maximize_over_box(mu, "maximize", box, nlp_cfg)
        assert rf.x == pytest.approx(rm.x, abs=1e-4)


class TestTaylor:
    def test_example1_row_at_published_point(self, e1_crisp):
        row = taylor_linearize(E1_SPEC1, e1_crisp.objectives[0].fn,
                               (0.458, 12.344, 2.703))
        assert row.coefficients == pytest.approx((0.304, -0.014, 0.156),
                                                 abs=5e-3)
        assert row.constant == pytest.approx(0.712, abs=5e-3)

    def test_example2_row_at_published_point(self, e2_crisp):
        row = taylor_linearize(E2_SPEC1, e2_crisp.objectives[0].fn,
                               (1.051, 8.053, 1.756))
        assert row.coefficients[0] == pytest.approx(0.240, abs=5e-3)
        assert row.coefficients[2] == pytest.approx(0.235, abs=5e-3)
        assert row.constant == pytest.approx(0.277, abs=5e-3)
        # the x2 slope is genuinely positive: the ramp increases in x2
        # over the whole box (its argmax sits at the x2 upper bound)
        assert row.coefficients[1] == pytest.approx(0.0403, abs=5e-4)

    def test_affine_membership_linearizes_exactly(self):
        f = affine([3.0, -1.5], 2.0)
        spec = MembershipSpec(MIN_GOAL, 1.0, 9.0, 0)
        mu = unclamped_membership(spec, f)
        row = taylor_linearize(spec, f, (0.7, 0.3))
        for t, c in zip(mu.terms[:2], row.coefficients):
            assert float(t.coeff) == pytest.approx(c, abs=1e-12)
        const_terms = sum(float(t.coeff) for t in mu.terms
                          if all(e == 0.0 for e in t.exponents))
        assert const_terms == pytest.approx(row.constant, abs=1e-12)

    def test_tangency_and_quadratic_decay(self, e1_crisp):
        f = e1_crisp.objectives[0].fn
        xs = np.array([0.458, 12.344, 2.703])
        mu = unclamped_membership(E1_SPEC1, f)
        row = taylor_linearize(E1_SPEC1, f, xs)
        assert row(xs) == pytest.approx(eval_fn(mu, xs), abs=1e-12)
        for l in range(3):
            errs = []
            for h in (1e-2, 1e-3):
                xp = xs.copy()
                xp[l] += h
                errs.append(abs(row(xp) - eval_fn(mu, xp)))
            if errs[0] > 1e-13:
                # halving h by 10 shrinks the gap ~100x (second order)
                assert errs[1] < errs[0] / 30.0

    def test_linear_fn_serialization(self):
        row = LinearFn((1.0, -2.5), 0.25)
        assert row.to_json() == {"coeffs": [1.0, -2.5], "constant": 0.25}
        assert row((2.0, 1.0)) == pytest.approx(1.0 * 2 - 2.5 * 1 + 0.25)
