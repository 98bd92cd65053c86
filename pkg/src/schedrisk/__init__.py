"""Schedule risk analysis for stochastic project networks.

Parses activity-on-node project files, runs seeded Monte Carlo simulation
over the activity duration distributions, and computes the classical
activity sensitivity metrics (criticality, cruciality, significance,
schedule sensitivity, management-oriented) together with risk-baseline
curves and the activity risk index.
"""

__version__ = "0.1.0"

from .cpm import (
    DEFAULT_FLOAT_EPS,
    PlannedSchedule,
    ScheduleResult,
    backward_pass,
    compute_schedule,
    critical_set,
    forward_pass,
    planned_schedule,
    total_floats,
)
from .distributions import DurationDistribution
from .errors import (
    ComputationError,
    CycleError,
    ParseError,
    SamplingError,
    SchedRiskError,
    UnknownActivityError,
)
from .metrics import (
    MetricsReport,
    compute_metrics,
    criticality_index,
    cruciality_kendall,
    cruciality_pearson,
    cruciality_spearman,
    management_oriented_index,
    rank_activities,
    schedule_sensitivity_index,
    significance_index,
)
from .network import (
    SINK_ID,
    SOURCE_ID,
    Activity,
    ProjectNetwork,
    ValidationIssue,
    ValidationReport,
    immediate_successor_count,
    load_project,
    parse_project,
    serialize_project,
    topological_order,
    transitive_successor_count,
    validate,
)
from .riskbaseline import (
    DEFAULT_SCALING,
    PROPORTIONAL_SIGMA,
    PROPORTIONAL_VARIANCE,
    AriReport,
    ControlGrid,
    RiskBaselineCurve,
    ari,
    make_control_grid,
    remaining_network_at,
    srb_curve,
    srv,
)
from .rng import RandomField, ReplicationStream, UniformStream
from .simulation import (
    ReplicationRecord,
    SimulationBatch,
    SimulationConfig,
    run_batch,
    run_replication,
    run_scenarios,
    sample_duration,
)

__all__ = [
    "Activity",
    "AriReport",
    "ComputationError",
    "ControlGrid",
    "CycleError",
    "DEFAULT_FLOAT_EPS",
    "DEFAULT_SCALING",
    "DurationDistribution",
    "MetricsReport",
    "ParseError",
    "PlannedSchedule",
    "ProjectNetwork",
    "PROPORTIONAL_SIGMA",
    "PROPORTIONAL_VARIANCE",
    "RandomField",
    "ReplicationRecord",
    "ReplicationStream",
    "RiskBaselineCurve",
    "SamplingError",
    "ScheduleResult",
    "SchedRiskError",
    "SimulationBatch",
    "SimulationConfig",
    "SINK_ID",
    "SOURCE_ID",
    "UniformStream",
    "UnknownActivityError",
    "ValidationIssue",
    "ValidationReport",
    "ari",
    "backward_pass",
    "compute_metrics",
    "compute_schedule",
    "critical_set",
    "criticality_index",
    "cruciality_kendall",
    "cruciality_pearson",
    "cruciality_spearman",
    "forward_pass",
    "immediate_successor_count",
    "load_project",
    "make_control_grid",
    "management_oriented_index",
    "parse_project",
    "planned_schedule",
    "rank_activities",
    "remaining_network_at",
    "run_batch",
    "run_replication",
    "run_scenarios",
    "sample_duration",
    "schedule_sensitivity_index",
    "serialize_project",
    "significance_index",
    "srb_curve",
    "srv",
    "topological_order",
    "total_floats",
    "transitive_successor_count",
    "validate",
]
