import numpy as np
import pytest

from it2fgp.errors import InfeasibleError, UnsupportedError
from it2fgp.nlpcore import (
    Box,
    FEAS_TOL,
    NlpConfig,
    derive_search_bounds,
    grid_oracle,
    maximize_over_box,
    payoff_table,
    solve_single,
    variable_box,
)
from it2fgp.sigmodel import (
    Constraint,
    Monomial,
    Objective,
    Program,
    SignomialFn,
    eval_fn,
    grad_fn,
)

# Reference optima of the bundled crisp models, independently computed
# (SLSQP multistart plus closed-form root-finding on the active sets).
E1_GOLDEN = {
    (0, "maximize"): ((0.196680, 12.541007, 2.668627), 76.167655),
    (0, "minimize"): ((0.0, 15.237593, 0.0), 29.785099),
    (1, "maximize"): ((0.0, 20.862405, 0.606951), 77.652851),
    (1, "minimize"): ((0.456917, 14.807581, 0.0), 54.698453),
}
E2_GOLDEN = {
    (0, "maximize"): ((1.050703, 3.208859, 1.755917), 281.523424),
    (0, "minimize"): ((0.0, 5.939830, 0.0), 120.885107),
    (1, "maximize"): ((0.0, 8.052597, 0.435728), 30.858329),
    (1, "minimize"): ((1.034459, 4.979850, 0.0), 20.820145),
}


def mono(c, e):
    return Monomial(c, e)


def lin(coeffs):
    n = len(coeffs)
    return SignomialFn(tuple(
        Monomial(c, tuple(1.0 if j == i else 0.0 for j in range(n)))
        for i, c in enumerate(coeffs)))


def box_only_program(upper):
    """max/min a linear objective over per-variable caps only."""
    n = len(upper)
    cons = tuple(
        Constraint(SignomialFn((Monomial(1.0, tuple(
            1.0 if j == i else 0.0 for j in range(n))),)), "<=", u)
        for i, u in enumerate(upper))
    return Program(
        tuple(f"x{i+1}" for i in range(n)),
        (Objective("maximize", lin([2.0] * n)),
         Objective("minimize", lin([2.0] * n))),
        cons,
    )


class TestBounds:
    def test_example1_derived_bounds(self, e1_crisp, nlp_cfg):
        ub = derive_search_bounds(e1_crisp, nlp_cfg)
        # x1 from the quadratic row, x2 and x3 from the first resource row
        assert ub[0] == pytest.approx(np.sqrt(75.369 / 4.123), rel=1e-9)
        assert ub[1] == pytest.approx(87.364 / 4.123, rel=1e-9)
        assert ub[2] == pytest.approx(np.sqrt(87.364 / 3.660), rel=1e-9)

    def test_fallback_for_uncapped_variable(self, nlp_cfg):
        p = Program(("x1", "x2"),
                    (Objective("maximize", lin([1.0, 1.0])),),
                    (Constraint(lin([1.0, 0.0]), "<=", 5.0),))
        ub = derive_search_bounds(p, nlp_cfg)
        assert ub[0] == pytest.approx(5.0)
        assert ub[1] == pytest.approx(50.0)  # 10 x largest rhs


class TestSolveSingle:
    @pytest.mark.parametrize("key", sorted(E1_GOLDEN))
    def test_example1_optima(self, e1_crisp, nlp_cfg, key):
        want_x, want_v = E1_GOLDEN[key]
        res = solve_single(e1_crisp, key[0], key[1], nlp_cfg)
        assert res.x == pytest.approx(want_x, abs=2e-4)
        assert res.value == pytest.approx(want_v, abs=2e-4)

    @pytest.mark.parametrize("key", sorted(E2_GOLDEN))
    def test_example2_optima(self, e2_crisp, nlp_cfg, key):
        want_x, want_v = E2_GOLDEN[key]
        res = solve_single(e2_crisp, key[0], key[1], nlp_cfg)
        assert res.x == pytest.approx(want_x, abs=2e-4)
        assert res.value == pytest.approx(want_v, abs=2e-4)

    def test_published_cells_reproduced(self, e2_crisp, nlp_cfg):
        # all four example-2 individual optima match the published table
        published = {
            (0, "maximize"): (1.051, 3.209, 1.756),
            (0, "minimize"): (0.0, 5.940, 0.0),
            (1, "maximize"): (0.0, 8.053, 0.436),
            (1, "minimize"): (1.035, 4.980, 0.0),
        }
        for (k, sense), want in published.items():
            res = solve_single(e2_crisp, k, sense, nlp_cfg)
            assert res.x == pytest.approx(want, abs=2e-2)

    def test_determinism(self, e1_crisp):
        cfg = NlpConfig(seed=7, restarts=24)
        a = solve_single(e1_crisp, 0, "maximize", cfg)
        b = solve_single(e1_crisp, 0, "maximize", cfg)
        assert a.x == b.x and a.value == b.value

    def test_feasibility_of_results(self, e1_crisp, nlp_cfg):
        from it2fgp.nlpcore import _Region
        for k in (0, 1):
            for sense in ("maximize", "minimize"):
                res = solve_single(e1_crisp, k, sense, nlp_cfg)
                region = _Region(e1_crisp,
                                 floor_equality=(sense == "minimize"))
                assert region.violation(res.x) <= FEAS_TOL
                assert all(v >= -1e-12 for v in res.x)

    def test_linear_objective_over_box_program(self, nlp_cfg):
        p = box_only_program((2.0, 3.0))
        res = solve_single(p, 0, "maximize", nlp_cfg)
        assert res.x == pytest.approx((2.0, 3.0), abs=1e-6)

    def test_infeasible_program(self, nlp_cfg):
        p = Program(("x1",),
                    (Objective("maximize", lin([1.0])),),
                    (Constraint(lin([1.0]), "<=", 1.0),
                     Constraint(lin([1.0]), ">=", 2.0)))
        with pytest.raises(InfeasibleError):
            solve_single(p, 0, "maximize", NlpConfig(restarts=8))


class TestPayoff:
    def test_example1_bounds(self, e1_payoff):
        e = e1_payoff.entries
        assert e[0].min_value == pytest.approx(29.785099, abs=2e-4)
        assert e[0].max_value == pytest.approx(76.167655, abs=2e-4)
        assert e[1].min_value == pytest.approx(54.698453, abs=2e-4)
        assert e[1].max_value == pytest.approx(77.652851, abs=2e-4)

    def test_example2_bounds_match_published(self, e2_payoff):
        e = e2_payoff.entries
        assert e[0].min_value == pytest.approx(120.885, abs=0.2)
        assert e[0].max_value == pytest.approx(281.523, abs=0.2)
        assert e[1].min_value == pytest.approx(20.820, abs=0.2)
        assert e[1].max_value == pytest.approx(30.858, abs=0.2)

    def test_max_at_least_min(self, e1_payoff, e2_payoff):
        for t in (e1_payoff, e2_payoff):
            for entry in t.entries:
                assert entry.max_value >= entry.min_value

    def test_single_objective_program(self, nlp_cfg):
        p = Program(("x1",),
                    (Objective("maximize", lin([1.0])),),
                    (Constraint(lin([1.0]), "<=", 4.0),))
        t = payoff_table(p, nlp_cfg)
        assert len(t.entries) == 1
        assert t.entries[0].max_value >= t.entries[0].min_value


class TestBoxBuild:
    def test_example2_box_matches_published(self, e2_box):
        assert e2_box.lower == pytest.approx((0.0, 3.209, 0.0), abs=2e-2)
        assert e2_box.upper == pytest.approx((1.051, 8.053, 1.756), abs=2e-2)

    def test_box_contains_every_payoff_solution(self, e1_payoff, e1_box,
                                                 e2_payoff, e2_box):
        for t, box in ((e1_payoff, e1_box), (e2_payoff, e2_box)):
            for x in t.solutions():
                assert box.contains(x)

    def test_degenerate_box(self):
        from it2fgp.nlpcore import PayoffEntry, PayoffTable
        t = PayoffTable((PayoffEntry((1.0, 2.0), 5.0, (1.0, 2.0), 3.0),))
        box = variable_box(t)
        assert box.lower == box.upper == (1.0, 2.0)


class TestMaximizeOverBox:
    def test_membership_argmax_is_published_corner(self, e1_crisp, nlp_cfg):
        # over the published box the profit membership peaks at the
        # upper-x1, lower-x2, upper-x3 corner
        from it2fgp.goalmem import MembershipSpec, unclamped_membership
        box = Box((0.0, 12.344, 0.0), (0.457, 20.862, 2.703))
        spec = MembershipSpec("max-goal", 76.694, 29.785, 0)
        mu = unclamped_membership(spec, e1_crisp.objectives[0].fn)
        res = maximize_over_box(mu, "maximize", box, nlp_cfg)
        assert res.x == pytest.approx((0.457, 12.344, 2.703), abs=2e-2)

    def test_example2_membership_argmax(self, e2_crisp, nlp_cfg):
        from it2fgp.goalmem import MembershipSpec, unclamped_membership
        box = Box((0.0, 3.209, 0.0), (1.051, 8.053, 1.756))
        spec = MembershipSpec("max-goal", 281.523, 120.885, 0)
        mu = unclamped_membership(spec, e2_crisp.objectives[0].fn)
        res = maximize_over_box(mu, "maximize", box, nlp_cfg)
        assert res.x == pytest.approx((1.051, 8.053, 1.756), abs=2e-2)

    def test_affine_increasing_hits_upper_corner(self, nlp_cfg):
        box = Box((0.5, 1.0), (2.0, 4.0))
        res = maximize_over_box(lin([1.0, 2.0]), "maximize", box, nlp_cfg)
        assert res.x == pytest.approx((2.0, 4.0), abs=1e-9)

    def test_monotone_monomials_attain_faces(self, nlp_cfg):
        box = Box((0.5, 0.5), (2.0, 3.0))
        f = SignomialFn((Monomial(2.0, (1.5, 0.0)),))
        res = maximize_over_box(f, "maximize", box, nlp_cfg)
        assert res.x[0] == pytest.approx(2.0, abs=1e-9)
        res2 = maximize_over_box(f, "minimize", box, nlp_cfg)
        assert res2.x[0] == pytest.approx(0.5, abs=1e-9)


def random_small_program(rng):
    n = int(rng.integers(2, 4))
    nterms = int(rng.integers(1, 3))
    exps = [1.0, 2.0, 0.5]

    def rand_fn(force_caps=False):
        terms = []
        if force_caps:
            for l in range(n):
                e = tuple(float(exps[rng.integers(0, len(exps))])
                          if j == l else 0.0 for j in range(n))
                terms.append(Monomial(float(rng.uniform(0.5, 4.0)), e))
        else:
            for _ in range(nterms):
                active = rng.integers(0, 2, n)
                if not active.any():
                    active[rng.integers(0, n)] = 1
                e = tuple(float(exps[rng.integers(0, len(exps))]) if a else 0.0
                          for a in active)
                terms.append(Monomial(float(rng.uniform(0.2, 3.0)), e))
        return SignomialFn(tuple(terms))

    cons = [Constraint(rand_fn(force_caps=True), "<=",
                       float(rng.uniform(5.0, 30.0)))]
    if rng.random() < 0.5:
        cons.append(Constraint(lin([1.0] * n), ">=",
                               float(rng.uniform(0.5, 2.0))))
    objectives = (Objective("maximize", rand_fn()),
                  Objective("minimize", rand_fn()))
    return Program(tuple(f"x{i+1}" for i in range(n)),
                   objectives, tuple(cons))


class TestGridOracle:
    def test_example1_profit_max_within_one_percent(self, e1_crisp, nlp_cfg):
        res = grid_oracle(e1_crisp, 0, "maximize", 200, nlp_cfg)
        assert abs(res.value - 76.694) <= 0.01 * 76.694

    def test_box_only_program_exact_vertex(self, nlp_cfg):
        p = box_only_program((2.0, 3.0))
        res = grid_oracle(p, 0, "maximize", 10, nlp_cfg)
        assert res.x == pytest.approx((2.0, 3.0), abs=1e-12)

    def test_dimension_cap(self, nlp_cfg):
        p = box_only_program((1.0,) * 5)
        with pytest.raises(UnsupportedError):
            grid_oracle(p, 0, "maximize", 4, nlp_cfg)

    def test_agreement_with_solver_on_random_programs(self):
        rng = np.random.default_rng(2024)
        cfg = NlpConfig(restarts=12, seed=5)
        checked = 0
        attempts = 0
        while checked < 20 and attempts < 60:
            attempts += 1
            p = random_small_program(rng)
            k = int(rng.integers(0, 2))
            sense = "maximize" if rng.random() < 0.5 else "minimize"
            try:
                solver = solve_single(p, k, sense, cfg)
                oracle = grid_oracle(p, k, sense, 40, cfg)
            except InfeasibleError:
                continue
            ub = derive_search_bounds(p, cfg)
            h = float(np.max(ub)) / 40
            lip = float(np.max(np.abs(
                grad_fn(p.objectives[k].fn,
                        np.maximum(oracle.x, 1e-6)))))
            slack = h * max(lip, 1.0) * p.n + 1e-6
            if sense == "maximize":
                assert solver.value >= oracle.value - slack
            else:
                assert solver.value <= oracle.value + slack
            checked += 1
        assert checked == 20


class TestRunLog:
    def test_jsonl_records_per_restart(self, e1_crisp, tmp_path):
        import json
        path = tmp_path / "run.jsonl"
        cfg = NlpConfig(restarts=6, seed=9, log_path=str(path))
        solve_single(e1_crisp, 0, "maximize", cfg)
        lines = [json.loads(s) for s in path.read_text().splitlines()]
        header = lines[0]
        assert header["objective"] == 0 and header["sense"] == "maximize"
        assert len(header["search_upper"]) == 3
        records = lines[1:]
        assert len(records) == 6
        for rec in records:
            assert set(rec) == {"start", "iterations", "value", "violation"}
