"""Exact lifetime and occupancy-time statistics for stage-structured models
whose transition rates change over time, with a Monte Carlo cross-check and
support for randomly drawn environments."""

from .chain import (
    DEFAULT_MAX_HORIZON,
    DEFAULT_TAIL_TOL,
    DiscreteDistribution,
    LifetimeDistribution,
    Schedule,
    StateSpace,
    absorption_vector,
    lifetime_distribution,
    transition_operator,
    validate_distribution,
    validate_matrix,
)
from .datasets import FulmarDataset, builtin_fulmar
from .errors import (
    ColumnSumError,
    InvalidDistributionError,
    MatrixValidationError,
    NegativeEntryError,
    NegativeVarianceError,
    NonAbsorbingError,
    NonFiniteEntryError,
    NonSquareMatrixError,
    NonTerminatingError,
    ScenarioError,
    ScenarioParseError,
    ScheduleExhaustedError,
    StagedwellError,
    UnknownLabelError,
    UnknownMatrixError,
)
from .occupancy import (
    JointOccupancyTable,
    MomentTable,
    OccupancyDistribution,
    SummaryStats,
    TargetSet,
    evolve_joint,
    moment_tables,
    occupancy_distribution,
    occupancy_moments,
    summary_stats,
)
from .randomenv import (
    RandomEnvironmentSpec,
    SweepPoint,
    TwoLevelStats,
    sample_schedule,
    simplex_sweep,
    two_level_stats,
)
from .scenario import (
    ScenarioConfig,
    builtin_fulmar_scenario,
    dump_scenario,
    export_results,
    load_scenario,
    parse_scenario,
)
from .simulate import (
    EmpiricalSummary,
    TrajectoryOutcome,
    empirical_distribution,
    simulate_trajectory,
    total_variation,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MAX_HORIZON",
    "DEFAULT_TAIL_TOL",
    "ColumnSumError",
    "DiscreteDistribution",
    "EmpiricalSummary",
    "FulmarDataset",
    "InvalidDistributionError",
    "JointOccupancyTable",
    "LifetimeDistribution",
    "MatrixValidationError",
    "MomentTable",
    "NegativeEntryError",
    "NegativeVarianceError",
    "NonAbsorbingError",
    "NonFiniteEntryError",
    "NonSquareMatrixError",
    "NonTerminatingError",
    "OccupancyDistribution",
    "RandomEnvironmentSpec",
    "ScenarioConfig",
    "ScenarioError",
    "ScenarioParseError",
    "Schedule",
    "ScheduleExhaustedError",
    "StagedwellError",
    "StateSpace",
    "SummaryStats",
    "SweepPoint",
    "TargetSet",
    "TrajectoryOutcome",
    "TwoLevelStats",
    "UnknownLabelError",
    "UnknownMatrixError",
    "absorption_vector",
    "builtin_fulmar",
    "builtin_fulmar_scenario",
    "dump_scenario",
    "empirical_distribution",
    "evolve_joint",
    "export_results",
    "lifetime_distribution",
    "load_scenario",
    "moment_tables",
    "occupancy_distribution",
    "occupancy_moments",
    "parse_scenario",
    "sample_schedule",
    "simplex_sweep",
    "simulate_trajectory",
    "summary_stats",
    "total_variation",
    "transition_operator",
    "two_level_stats",
    "validate_distribution",
    "validate_matrix",
]
