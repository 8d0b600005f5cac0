"""Running-maximum asymptotics of regenerative processes.

Subcritical queueing and birth-death models regenerate on returns to
emptiness; their running maxima, centered through the inverse of the
cycle-maximum log-tail rate and scaled by iterated logarithms, stay in
unit bands.  This package houses the deterministic normalization
machinery, exact tail formulas with independent asymptotic routes, and
event-driven simulators with checkpointed maxima for verifying the bands
at desk scale.
"""

from .envelope import (
    GrowthReport,
    NormalizedStats,
    PowerSum,
    RateEnvelope,
    centering,
    check_regular_variation,
    generalized_inverse,
    geometric_power_sum,
    l2,
    l3,
    log_geometric_power_sum,
    normalized_stats,
    slow_growth_report,
)
from .errors import (
    BracketError,
    BudgetError,
    ConvergenceError,
    CycleOverflow,
    DomainError,
    ModelError,
    NoRootError,
)
from .extremes import (
    MaxSeries,
    gumbel_check,
    iid_max_stats,
    ks_distance,
    lattice_max_stats,
    max_stat,
    running_max_series,
    sample_via_inverse,
)
from .engine import (
    CyclePath,
    CycleSample,
    MaxPath,
    RunSummary,
    event_indexed_stats,
    normalized_trace,
    replica_rng,
    run_cycles,
    time_grid,
)
from .queues import (
    Deterministic,
    Exponential,
    Gamma,
    GiG1Spec,
    GiG1WaitModel,
    MMmQueueModel,
    MMmSpec,
    Uniform,
    cramer_gamma,
    gig1_envelope,
    lindley_cycle,
    lindley_waits,
    md1_decay_root,
    mmm_alpha_t,
    mmm_cycle,
    mmm_envelope,
    mmm_p0,
    mmm_tail_exact,
)
from .birth_death import (
    BDModel,
    BDSpec,
    HittingTimeResult,
    bd_cycle,
    bd_direct_stats,
    bd_envelope,
    cycle_max_tail,
    cycle_max_tail_asymptotic,
    hitting_time_sample,
    log_cycle_max_tail,
    mean_cycle_duration,
    stationary,
    tail_constant,
)

__version__ = "0.1.0"
