import pytest

from it2fgp.dialogue import Decision, SessionConfig, open_session, replay
from it2fgp.fixtures import load_fixture
from it2fgp.nlpcore import NlpConfig, payoff_table, variable_box


@pytest.fixture(scope="session")
def nlp_cfg():
    return NlpConfig()


@pytest.fixture(scope="session")
def e1_fuzzy():
    return load_fixture("example1_fuzzy")


@pytest.fixture(scope="session")
def e1_crisp():
    return load_fixture("example1_crisp")


@pytest.fixture(scope="session")
def e2_fuzzy():
    return load_fixture("example2_fuzzy")


@pytest.fixture(scope="session")
def e2_crisp():
    return load_fixture("example2_crisp")


@pytest.fixture(scope="session")
def e1_payoff(e1_crisp, nlp_cfg):
    return payoff_table(e1_crisp, nlp_cfg)


@pytest.fixture(scope="session")
def e2_payoff(e2_crisp, nlp_cfg):
    return payoff_table(e2_crisp, nlp_cfg)


@pytest.fixture(scope="session")
def e1_box(e1_payoff):
    return variable_box(e1_payoff)


@pytest.fixture(scope="session")
def e2_box(e2_payoff):
    return variable_box(e2_payoff)


@pytest.fixture(scope="session")
def e1_session(e1_crisp):
    return open_session(e1_crisp, SessionConfig())


@pytest.fixture(scope="session")
def e2_replayed(e2_crisp):
    """Two-iteration scripted session: improve objective 0, then accept."""
    return replay(e2_crisp,
                  [Decision("revise", (0,)), Decision("satisfied")],
                  SessionConfig())


@pytest.fixture(scope="session")
def fgp_model_factory():
    """Random small goal-program models for simplex/oracle cross-checks."""
    import numpy as np

    from it2fgp.goalmem import LinearFn
    from it2fgp.lpsolve import assemble_fgp
    from it2fgp.nlpcore import Box

    def make(rng):
        n = int(rng.integers(1, 3))
        l = int(rng.integers(1, 3))
        lo = rng.uniform(0.0, 1.0, n)
        hi = lo + rng.uniform(0.5, 3.0, n)
        box = Box(tuple(lo), tuple(hi))
        rows = [LinearFn(tuple(float(c) for c in rng.uniform(-1.0, 1.0, n)),
                         float(rng.uniform(-0.5, 1.5)))
                for _ in range(l)]
        overshoot = bool(rng.random() < 0.7)
        return assemble_fgp(rows, box, allow_overshoot=overshoot)

    return make
