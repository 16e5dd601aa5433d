"""Interactive fuzzy goal programming for multiobjective signomial
programs with trapezoidal interval type-2 fuzzy coefficients."""

__version__ = "0.1.0"

from .it2num import (  # noqa: F401
    TrapIT2FN,
    Trapezoid,
    crisp,
    expected_value,
    it2,
    it2_add,
    it2_mul,
    it2_rank,
    it2_scale,
    it2_sub,
    make_it2,
    reduce_to_type1,
)
from .sigmodel import (  # noqa: F401
    Constraint,
    CrispProgram,
    FuzzyProgram,
    Monomial,
    Objective,
    Program,
    SignomialFn,
    defuzzify_program,
    eval_fn,
    grad_fn,
    program_from_json,
    program_to_json,
    validate_program,
)
from .nlpcore import (  # noqa: F401
    Box,
    NlpConfig,
    PayoffTable,
    grid_oracle,
    maximize_over_box,
    payoff_table,
    solve_single,
    variable_box,
)
from .goalmem import (  # noqa: F401
    LinearFn,
    MembershipSpec,
    build_goals,
    eval_membership,
    membership_value,
    taylor_linearize,
    unclamped_membership,
)
from .lpsolve import (  # noqa: F401
    LpModel,
    LpSolution,
    assemble_fgp,
    assemble_maxmin,
    assemble_minmax,
    simplex_solve,
    solve_aggregate,
    vertex_oracle,
)
from .dialogue import (  # noqa: F401
    Decision,
    Proposal,
    SessionConfig,
    SessionState,
    decide,
    open_session,
    replay,
    session_report,
)
from .baseline import (  # noqa: F401
    ReferenceRow,
    goal_weights,
    reference_table,
    solve_weighted_additive,
)
from .fixtures import FIXTURE_NAMES, fixture_index, load_fixture  # noqa: F401
