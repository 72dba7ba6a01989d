"""Monte Carlo laboratory for the Bernoulli growth random walk.

A walker on a rooted tree that, each step, first attaches a new leaf at its
position with probability p and then moves to a uniform neighbor in the
updated tree. The package provides the exact step kernel (compiled and pure
Python lanes with bit-identical streams), rooted-ball canonicalization, the
attached-loop segment process with its path-wise coupling to the walk, and
the estimator suite behind the ``bgrw`` command line tool.
"""

from .core import (
    BgrwConfig,
    InitialTree,
    StepOutcome,
    TrajectorySummary,
    TreeSnapshot,
    TreeState,
    bgrw_step,
    make_initial_tree,
    one_step_distribution,
    run_trajectory,
    simulate_summary,
)
from .couplings import (
    BlockRecord,
    CoupledRun,
    MinorantStep,
    block_stopping_times,
    blocks_from_series,
    consecutive_ones_bound,
    couple_bgrw_loop,
    coupling_batch,
    minorant_walk,
    run_probability_exact,
    up_fraction,
)
from .errors import BgrwError, InvariantViolation, ResourceLimitError, ValidationError
from .loops import (
    BackboneState,
    backbone_transform,
    loop_hitting_time,
    loop_step,
    loop_tail_estimate,
    minimal_backbone,
)
from .rng import Rng, aux_seed, derive_stream
from .stats import (
    EmpiricalMeasure,
    MeasureObserver,
    accumulate_ball,
    degree_tail,
    degree_tail_curve,
    distance_milestone,
    drift_identity_check,
    fit_log_linear,
    halfline_hit_fraction,
    measure_from_summary,
    merge_measures,
    one_ended_proxy,
    speed_estimate,
    tip_passage_time,
    tv_distance,
    visit_tail,
    walker_drift,
)
from .topology import (
    RootedBall,
    canonical_encode,
    extract_ball,
    local_distance,
    parse_code,
    path_tip_code,
    rooted_isomorphic,
    serialize_code,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BgrwConfig",
    "InitialTree",
    "StepOutcome",
    "TrajectorySummary",
    "TreeSnapshot",
    "TreeState",
    "bgrw_step",
    "make_initial_tree",
    "one_step_distribution",
    "run_trajectory",
    "simulate_summary",
    "BlockRecord",
    "CoupledRun",
    "MinorantStep",
    "block_stopping_times",
    "blocks_from_series",
    "consecutive_ones_bound",
    "couple_bgrw_loop",
    "coupling_batch",
    "minorant_walk",
    "run_probability_exact",
    "up_fraction",
    "BgrwError",
    "InvariantViolation",
    "ResourceLimitError",
    "ValidationError",
    "BackboneState",
    "backbone_transform",
    "loop_hitting_time",
    "loop_step",
    "loop_tail_estimate",
    "minimal_backbone",
    "Rng",
    "aux_seed",
    "derive_stream",
    "EmpiricalMeasure",
    "MeasureObserver",
    "accumulate_ball",
    "degree_tail",
    "degree_tail_curve",
    "distance_milestone",
    "drift_identity_check",
    "fit_log_linear",
    "halfline_hit_fraction",
    "measure_from_summary",
    "merge_measures",
    "one_ended_proxy",
    "speed_estimate",
    "tip_passage_time",
    "tv_distance",
    "visit_tail",
    "walker_drift",
    "RootedBall",
    "canonical_encode",
    "extract_ball",
    "local_distance",
    "parse_code",
    "path_tip_code",
    "rooted_isomorphic",
    "serialize_code",
]
