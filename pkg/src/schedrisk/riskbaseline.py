"""Schedule risk baseline curves and the activity risk index.

The risk baseline tracks how much project-duration variance is still
outstanding at each control time, assuming execution proceeds exactly per
plan: finished activities become deterministic, untouched ones keep their
full distribution, and an in-progress activity keeps only its remaining
dispersion.  Integrating a curve over the planned horizon gives the
scenario's total risk; comparing the integral with one activity made
deterministic against the base integral yields that activity's share of
total risk.

Two models for the remaining dispersion of an in-progress activity are
supported.  With ``proportional-sigma`` (default) the remaining standard
deviation shrinks with the remaining fraction of work, treating the
activity as one fully correlated unit.  With ``proportional-variance`` the
remaining variance shrinks instead, treating progress as independent
increments.  Both realize the remainder as a positive affine transform of
the base distribution, truncated at zero like every other sampled
duration.

All scenario curves for one analysis share random streams replication by
replication, so the small area differences that define the index are not
drowned in sampling noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .cpm import PlannedSchedule, planned_schedule
from .distributions import DurationDistribution
from .errors import ComputationError, SchedRiskError
from .network import ProjectNetwork
from .simulation import SimulationConfig, simulate_project_durations

PROPORTIONAL_VARIANCE = "proportional-variance"
PROPORTIONAL_SIGMA = "proportional-sigma"
SCALING_MODES = (PROPORTIONAL_VARIANCE, PROPORTIONAL_SIGMA)
DEFAULT_SCALING = PROPORTIONAL_SIGMA

DEFAULT_GRID_DIVISIONS = 40


@dataclass(frozen=True)
class ControlGrid:
    """Ascending control times from 0 to the planned completion, inclusive."""

    step: float
    points: tuple[float, ...]

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=np.float64)


def make_control_grid(sac: float, step: float | None = None) -> ControlGrid:
    """Uniform grid covering [0, sac] with spacing at most ``step``."""
    if sac < 0:
        raise SchedRiskError(f"planned project duration must be >= 0, got {sac}")
    if sac == 0.0:
        return ControlGrid(step=step if step else 0.0, points=(0.0,))
    if step is None:
        step = sac / DEFAULT_GRID_DIVISIONS
    if step <= 0:
        raise SchedRiskError(f"grid step must be > 0, got {step}")
    divisions = max(1, math.ceil(sac / step - 1e-12))
    points = [sac * i / divisions for i in range(divisions + 1)]
    points[-1] = sac
    return ControlGrid(step=step, points=tuple(points))


@dataclass(frozen=True)
class RiskBaselineCurve:
    """Remaining project-duration variance per control time for one scenario."""

    label: str
    grid: ControlGrid
    values: tuple[float, ...]


@dataclass(frozen=True)
class AriReport:
    """Total risk per scenario and each activity's normalized share of it."""

    srv_0: float
    srv: dict[str, float]
    ari_raw: dict[str, float]
    ari_raw_se: dict[str, float]
    ari_normalized: dict[str, float]
    warnings: tuple[str, ...]
    curves: tuple[RiskBaselineCurve, ...]


def remaining_network_at(
    network: ProjectNetwork,
    plan: PlannedSchedule,
    at: float,
    scaling: str = DEFAULT_SCALING,
) -> ProjectNetwork:
    """Network encoding execution-per-plan up to control time ``at``.

    Finished activities (planned EF <= at) become deterministic at their
    planned duration; not-yet-started ones are unchanged; an in-progress
    activity is remodeled as elapsed time plus an affine-rescaled
    remainder of its base distribution.
    """
    if scaling not in SCALING_MODES:
        raise SchedRiskError(f"unknown scaling mode '{scaling}'")
    if not (0.0 <= at <= plan.sac):
        raise SchedRiskError(f"control time {at} outside [0, {plan.sac}]")

    transformed = []
    for act in network.activities:
        es, ef = plan.es[act.id], plan.ef[act.id]
        if ef <= at:
            new = replace(
                act,
                distribution=DurationDistribution.deterministic(plan.durations[act.id]),
                duration_offset=0.0,
                duration_scale=1.0,
            )
        elif es >= at:
            new = act
        else:
            remaining_fraction = (ef - at) / (ef - es)
            scale = remaining_fraction if scaling == PROPORTIONAL_SIGMA else math.sqrt(remaining_fraction)
            mu = act.distribution.mean()
            # elapsed work plus a remainder with mean f*mu and rescaled spread
            new = replace(
                act,
                duration_offset=(at - es) + remaining_fraction * mu - scale * mu,
                duration_scale=scale,
            )
        transformed.append(new)
    return ProjectNetwork(network.name, network.time_unit, tuple(transformed))


def _deterministic_override(network: ProjectNetwork, activity_id: str,
                            determinize: str) -> ProjectNetwork:
    central = network.activity(activity_id).distribution.central(determinize)
    return network.with_distributions(
        {activity_id: DurationDistribution.deterministic(central)}
    )


def _curve_samples(
    network: ProjectNetwork,
    plan: PlannedSchedule,
    grid: ControlGrid,
    config: SimulationConfig,
    scaling: str,
    workers: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Curve values and the per-grid-point project-duration samples."""
    rows = []
    for at in grid.points:
        net_at = remaining_network_at(network, plan, at, scaling)
        rows.append(simulate_project_durations(net_at, config, workers))
    pd_matrix = np.vstack(rows)
    values = pd_matrix.var(axis=1, ddof=1)
    # a constant sample has zero variance; the moment computation may leave
    # 1-ulp residue that would break the exact-zero endpoint
    constant = pd_matrix.min(axis=1) == pd_matrix.max(axis=1)
    values[constant] = 0.0
    return values, pd_matrix


def srb_curve(
    network: ProjectNetwork,
    plan: PlannedSchedule,
    grid: ControlGrid,
    config: SimulationConfig,
    override: str | None = None,
    scaling: str = DEFAULT_SCALING,
    workers: int = 1,
    determinize: str = "mean",
) -> RiskBaselineCurve:
    """Risk baseline for the base scenario or with one activity deterministic."""
    scenario = network if override is None else _deterministic_override(network, override, determinize)
    values, _ = _curve_samples(scenario, plan, grid, config, scaling, workers)
    label = "srb_0" if override is None else f"srb_{override}"
    return RiskBaselineCurve(label, grid, tuple(float(v) for v in values))


def srv(curve: RiskBaselineCurve) -> float:
    """Area under the curve over the planned horizon (trapezoid rule)."""
    if len(curve.values) == 1:
        return 0.0
    return float(np.trapezoid(np.asarray(curve.values), curve.grid.array))


def _trapezoid_weights(points: np.ndarray) -> np.ndarray:
    w = np.zeros_like(points)
    w[:-1] += np.diff(points) / 2.0
    w[1:] += np.diff(points) / 2.0
    return w


def _area_influence(pd_matrix: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Per-replication influence of the trapezoid area estimator."""
    centered = pd_matrix - pd_matrix.mean(axis=1, keepdims=True)
    sq = centered**2
    h = sq - sq.mean(axis=1, keepdims=True)
    return weights @ h


def ari(
    network: ProjectNetwork,
    plan: PlannedSchedule | None = None,
    grid: ControlGrid | None = None,
    config: SimulationConfig = SimulationConfig(replications=20000),
    scaling: str = DEFAULT_SCALING,
    workers: int = 1,
    determinize: str = "mean",
    noise_sigmas: float = 3.0,
) -> AriReport:
    """Activity risk index for every real activity.

    Raw values are the relative drop in total risk when the activity is
    made deterministic; tiny negatives inside the Monte Carlo noise band
    are clamped to zero with a warning, larger ones indicate an
    inconsistent setup and raise.  Normalized values share out the total
    so they sum to one.
    """
    if plan is None:
        plan = planned_schedule(network, determinize)
    if grid is None:
        grid = make_control_grid(plan.sac)

    base_values, base_matrix = _curve_samples(network, plan, grid, config, scaling, workers)
    curves = [RiskBaselineCurve("srb_0", grid, tuple(float(v) for v in base_values))]
    srv_0 = srv(curves[0])
    if srv_0 <= 0.0:
        raise ComputationError("ARI undefined: project has no uncertainty")

    weights = _trapezoid_weights(grid.array)
    base_influence = _area_influence(base_matrix, weights)
    n = base_matrix.shape[1]

    srv_by_id: dict[str, float] = {}
    raw: dict[str, float] = {}
    raw_se: dict[str, float] = {}
    clamped: dict[str, float] = {}
    warnings: list[str] = []

    for aid in network.real_ids:
        scenario = _deterministic_override(network, aid, determinize)
        values_i, matrix_i = _curve_samples(scenario, plan, grid, config, scaling, workers)
        curve_i = RiskBaselineCurve(f"srb_{aid}", grid, tuple(float(v) for v in values_i))
        curves.append(curve_i)
        srv_i = srv(curve_i)
        srv_by_id[aid] = srv_i

        # delta-method influence of (srv_0 - srv_i) / srv_0 at the estimates
        influence_i = _area_influence(matrix_i, weights)
        ratio_influence = (srv_i / srv_0**2) * base_influence - influence_i / srv_0
        raw_i = (srv_0 - srv_i) / srv_0
        se_i = float(np.std(ratio_influence, ddof=1)) / math.sqrt(n)
        raw[aid] = raw_i
        raw_se[aid] = se_i

        if raw_i < 0.0:
            if raw_i < -noise_sigmas * se_i:
                raise ComputationError(
                    f"ARI for '{aid}' is {raw_i:.6g}, below the -{noise_sigmas:g} standard error "
                    f"band ({noise_sigmas:g} * {se_i:.3g}); removing uncertainty must not add risk"
                )
            warnings.append(
                f"ARI for '{aid}' was {raw_i:.3g} (within Monte Carlo noise); clamped to 0"
            )
            clamped[aid] = 0.0
        else:
            clamped[aid] = raw_i

    total = sum(clamped.values())
    if total <= 0.0:
        raise ComputationError("ARI undefined: no activity contributes risk")
    normalized = {aid: v / total for aid, v in clamped.items()}

    return AriReport(
        srv_0=srv_0,
        srv=srv_by_id,
        ari_raw=raw,
        ari_raw_se=raw_se,
        ari_normalized=normalized,
        warnings=tuple(warnings),
        curves=tuple(curves),
    )
