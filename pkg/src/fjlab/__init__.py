"""Friedkin-Johnsen opinion dynamics over Bernoulli random graphs.

Final opinions of a partially stubborn population on sampled and expected
graphs, evaluators for the concentration bounds relating the two, and a
Monte-Carlo harness measuring the actual distances.
"""

from .graph_model import (
    AssumptionReport,
    CommunityPartition,
    ExpectedDegreeStats,
    ProbabilityMatrix,
    RealizedDegreeStats,
    RealizedGraph,
    SbmSpec,
    check_assumptions,
    expected_degree_stats,
    realized_degree_stats,
    sample_graph,
    sbm_probability_matrix,
)
from .fj_core import (
    ConvergenceVerdict,
    InfluenceSystem,
    SingularSystemError,
    StubbornnessProfile,
    convergence_condition,
    final_opinions_direct,
    final_opinions_iterative,
    fj_step,
    influence_matrix,
    system_matrix,
)
from .linalg_kernels import (
    IterationLimitError,
    NotPositiveDefiniteError,
    NumericalError,
    min_eigenvalue_symmetric,
    operator_two_norm,
    solve_spd,
)
from .bounds import (
    BoundReport,
    SbmDistanceBound,
    DegreeTails,
    HypothesisError,
    MixedPopulationBound,
    AllStubbornBound,
    all_stubborn_eigenvalue_bound,
    bernstein_tail,
    chernoff_tail,
    sbm_distance_bound,
    evaluate_bound_report,
    min_eigenvalue_lower_bound,
    degree_tail_bounds,
    eigenvalue_threshold_bound,
    mixed_population_distance_bound,
    all_stubborn_distance_bound,
)
from .experiments import (
    AggregateRow,
    ScalingResult,
    SummaryStats,
    SweepResult,
    TrialRecord,
    aggregate,
    experiment_degree_sweep,
    experiment_scaling,
    experiment_stubbornness_sweep,
    expected_influence_matrix,
    fit_loglog_slope,
    run_trial,
    stable_trial_seed,
)

__version__ = "0.1.0"
