"""Synchronous non-local games: values, products, and verification.

The package models finite synchronous games, forms conjunctive products,
and computes four synchronous values: the local value exactly by strategy
enumeration, the non-signalling value exactly by rational linear
programming, lower bounds on the quantum value by alternating projection
search, and upper bounds on the quantum-commuting value by a tracial
moment-matrix relaxation.
"""

from .correlations import (
    Correlation,
    DeterministicStrategy,
    expected_value,
    from_deterministic,
    is_nonsignalling,
    is_perfect,
    is_synchronous,
    marginal,
    tensor,
)
from .errors import (
    DensityNotNormalized,
    DimensionMismatch,
    EnumerationTooLarge,
    IndexOutOfRange,
    InfeasibleT,
    LPInfeasible,
    LPUnbounded,
    NotConverged,
    ParseError,
    SyncGamesError,
    SynchronicityViolation,
)
from .exact import (
    LPProblem,
    LPSolution,
    SupermultiplicativityReport,
    ValueReport,
    deterministic_scores,
    local_synchronous_value,
    ns_lp_problem,
    ns_synchronous_value,
    simplex_solve,
    strategy_score,
    supermultiplicativity_report,
    verify_lp_certificate,
)
from .games import (
    Density,
    Game,
    is_symmetric,
    new_game,
    product,
    product_density,
    synchronicity_game,
    uniform_density,
)
from .ncpoly import (
    NCPoly,
    cyclic_normal_form,
    equal_mod_relations,
    evaluate,
    game_polynomial,
    reduce,
)
from .quantum import (
    Block,
    MarginalReport,
    Realization,
    RealizationReport,
    TFamilyPoint,
    correlation_of,
    example2_witness,
    extract_marginal,
    seesaw_lower_bound,
    t_family,
    tensor_realizations,
    verify_realization,
)
from .sdp import (
    MomentMatrixProblem,
    QCBound,
    SDPSolution,
    build_npa,
    moment_feasibility,
    moment_matrix_of,
    objective_of,
    qc_upper_bound,
    solve_sdp,
)
from .verification import CHECKS, CheckResult, example1, example2, run_checks

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # games
    "Game",
    "Density",
    "new_game",
    "synchronicity_game",
    "product",
    "product_density",
    "uniform_density",
    "is_symmetric",
    # correlations
    "Correlation",
    "DeterministicStrategy",
    "from_deterministic",
    "is_nonsignalling",
    "is_synchronous",
    "is_perfect",
    "tensor",
    "marginal",
    "expected_value",
    # exact values
    "ValueReport",
    "LPProblem",
    "LPSolution",
    "SupermultiplicativityReport",
    "deterministic_scores",
    "strategy_score",
    "local_synchronous_value",
    "ns_lp_problem",
    "ns_synchronous_value",
    "simplex_solve",
    "supermultiplicativity_report",
    "verify_lp_certificate",
    # polynomials
    "NCPoly",
    "game_polynomial",
    "reduce",
    "cyclic_normal_form",
    "evaluate",
    "equal_mod_relations",
    # quantum
    "Block",
    "Realization",
    "RealizationReport",
    "MarginalReport",
    "TFamilyPoint",
    "verify_realization",
    "correlation_of",
    "tensor_realizations",
    "extract_marginal",
    "seesaw_lower_bound",
    "t_family",
    "example2_witness",
    # moment relaxation
    "MomentMatrixProblem",
    "SDPSolution",
    "QCBound",
    "build_npa",
    "solve_sdp",
    "qc_upper_bound",
    "moment_matrix_of",
    "moment_feasibility",
    "objective_of",
    # verification
    "CheckResult",
    "CHECKS",
    "example1",
    "example2",
    "run_checks",
    # errors
    "SyncGamesError",
    "IndexOutOfRange",
    "SynchronicityViolation",
    "DensityNotNormalized",
    "DimensionMismatch",
    "EnumerationTooLarge",
    "LPInfeasible",
    "LPUnbounded",
    "InfeasibleT",
    "NotConverged",
    "ParseError",
]
