"""maxlot: preference aggregation via maximal lotteries.

Computes maximal lotteries over finite alternative sets by solving the
pairwise margin game exactly, contrasts them with Borda / Bradley-Terry
aggregation, and runs sampled self-play experiments end to end.
"""

__version__ = "0.1.0"

from .btl import (
    FitDiagnostics,
    RewardVector,
    btl_gradient,
    btl_loss,
    check_borda_equivalence,
    fit_btl,
    softmax_policy,
)
from .datasets import (
    ComparisonDataset,
    ComparisonRecord,
    empirical_counts,
    empirical_preference,
    sample_dataset,
)
from .experiment import (
    BtlParams,
    ExperimentConfig,
    ExperimentReport,
    SpoParams,
    compare_iia,
    emit_report,
    run_experiment,
)
from .prefs import (
    AlternativeSet,
    Lottery,
    MarginMatrix,
    PairwiseCounts,
    PreferenceProfile,
    SelectionMatrix,
    margin_matrix,
    pairwise_counts,
    selection_matrix,
)
from .selfplay import (
    SelfPlayTrace,
    TabularPolicy,
    exact_best_response_dynamics,
    spo_reward,
    spo_run,
)
from .solver import (
    MaximalityReport,
    SolverError,
    StepSchedule,
    maximal_lottery_exact,
    maximal_lottery_from_selection,
    maximal_lottery_iterative,
    maximal_lottery_lp,
    solve_matrix_game,
    verify_maximality,
)
from .voting import (
    BordaScores,
    borda_scores,
    condorcet_winner,
    majority_candidates,
    majority_winner,
    random_dictatorship,
    smith_set,
)

__all__ = [
    "__version__",
    "AlternativeSet",
    "BordaScores",
    "BtlParams",
    "ComparisonDataset",
    "ComparisonRecord",
    "ExperimentConfig",
    "ExperimentReport",
    "FitDiagnostics",
    "Lottery",
    "MarginMatrix",
    "MaximalityReport",
    "PairwiseCounts",
    "PreferenceProfile",
    "RewardVector",
    "SelectionMatrix",
    "SelfPlayTrace",
    "SolverError",
    "SpoParams",
    "StepSchedule",
    "TabularPolicy",
    "borda_scores",
    "btl_gradient",
    "btl_loss",
    "check_borda_equivalence",
    "compare_iia",
    "condorcet_winner",
    "emit_report",
    "empirical_counts",
    "empirical_preference",
    "exact_best_response_dynamics",
    "fit_btl",
    "majority_candidates",
    "majority_winner",
    "margin_matrix",
    "maximal_lottery_exact",
    "maximal_lottery_from_selection",
    "maximal_lottery_iterative",
    "maximal_lottery_lp",
    "pairwise_counts",
    "random_dictatorship",
    "run_experiment",
    "sample_dataset",
    "selection_matrix",
    "smith_set",
    "softmax_policy",
    "solve_matrix_game",
    "spo_reward",
    "spo_run",
    "verify_maximality",
]
