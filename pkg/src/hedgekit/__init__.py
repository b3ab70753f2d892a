"""hedgekit: strategy SDPs for prover-verifier quantum interactions.

Compile interactions into outcome-operator form, solve the resulting
Hermitian SDPs with an embedded dense interior-point solver, certify
parallel-repetition bounds through explicit dual witnesses, reproduce
the perfect two-repetition hedge, and plan error reduction for
interactive proofs.
"""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    HedgekitError,
    NumericalError,
    SpaceError,
    ValidationError,
)
from .spaces import DESK_DIM_CAP, SpaceList, space
from .operators import (
    DensityOperator,
    HermitianOperator,
    KrausChannel,
    align,
    apply_channel,
    choi,
    dephase,
    dephasing_channel,
    fidelity,
    identity,
    identity_channel,
    inner,
    is_diagonal,
    is_psd,
    kron,
    min_eigenvalue,
    partial_trace,
    permute_systems,
    unitary_channel,
)
from .games import (
    OutcomeOperators,
    SingleRoundGameSpec,
    StrategyChoi,
    dephase_game,
    group_outcomes,
    is_diagonal_game,
    outcome_operators_single_round,
    outcome_probabilities,
    parallel_game,
    rep_label,
    strategy_from_channel,
    threshold_objective,
    value_objective,
)
from .sdp import (
    ConstraintFamily,
    DualWitness,
    FeasibilityReport,
    ScalarConstraint,
    SdpProblem,
    SolveReport,
    check_dual_feasibility,
    check_weak_duality,
    compile_dual,
    compile_primal,
    dual_witness_from_report,
    hermitian_basis,
    repair_witness,
    slater_points,
    solve,
)
from .witnesses import (
    classical_optimum,
    elementwise_min,
    single_round_witness,
    verify_monotone_inequality,
    witness_average,
    witness_classical_binomial,
    witness_naive,
    witness_recursive_snk,
    witness_tensor_power,
)
from .error_reduction import (
    ErrorReductionPlan,
    binary_entropy,
    binomial_tail,
    completeness_error_bound,
    entropy_curve,
    entropy_threshold,
    plan_rounds,
    soundness_error_bound,
    threshold_condition,
)
from .hedging import (
    WIN_PROBABILITY,
    hedging_game,
    hedging_game_spec,
    hedging_optimal_witness,
    phase_flip_channel,
    phase_flip_strategy,
)
