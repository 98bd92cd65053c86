"""Seeded Monte Carlo engine over project networks.

Sampling is inverse-CDF on counter-based uniforms, so every replication's
draws are addressable by (seed, activity slot, replication index).  Batch
output is therefore bit-identical regardless of chunking or worker count,
and scenario runs are coupled through common random numbers without any
bookkeeping: an unchanged activity consumes exactly the same uniforms in
every scenario.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .cpm import backward_pass, forward_pass
from .distributions import DurationDistribution
from .errors import SamplingError
from .network import Activity, ProjectNetwork
from .rng import RandomField, ReplicationStream, UniformStream

_CHUNK = 8192


@dataclass(frozen=True)
class SimulationConfig:
    replications: int
    seed: int = 42
    max_resample_attempts: int = 100

    def __post_init__(self):
        if self.replications < 2:
            raise ValueError("replications must be >= 2 (correlations are undefined otherwise)")
        if self.max_resample_attempts < 1:
            raise ValueError("max_resample_attempts must be >= 1")


@dataclass(frozen=True)
class ReplicationRecord:
    durations: dict[str, float]
    project_duration: float
    total_float: dict[str, float]


def sample_sd(x: np.ndarray) -> float:
    """ddof=1 standard deviation that is exactly 0 for a constant sample.

    Subtracting the computed mean from identical values can leave 1-ulp
    residue, so constancy is detected before the moment computation.
    """
    if x.size < 2 or float(x.min()) == float(x.max()):
        return 0.0
    return float(np.std(x, ddof=1))


@dataclass(frozen=True, eq=False)
class SimulationBatch:
    """One seeded batch: per-activity samples in replication-index order."""

    config: SimulationConfig
    ids: tuple[str, ...]
    duration_samples: dict[str, np.ndarray]
    float_samples: dict[str, np.ndarray]
    project_durations: np.ndarray

    @property
    def replications(self) -> int:
        return int(self.project_durations.size)

    @cached_property
    def records(self) -> tuple[ReplicationRecord, ...]:
        durs = [self.duration_samples[aid] for aid in self.ids]
        floats = [self.float_samples[aid] for aid in self.ids]
        return tuple(
            ReplicationRecord(
                {aid: float(col[k]) for aid, col in zip(self.ids, durs)},
                float(self.project_durations[k]),
                {aid: float(col[k]) for aid, col in zip(self.ids, floats)},
            )
            for k in range(self.replications)
        )

    @cached_property
    def duration_mean(self) -> dict[str, float]:
        return {aid: float(np.mean(x)) for aid, x in self.duration_samples.items()}

    @cached_property
    def duration_sd(self) -> dict[str, float]:
        return {aid: sample_sd(x) for aid, x in self.duration_samples.items()}

    @cached_property
    def float_mean(self) -> dict[str, float]:
        return {aid: float(np.mean(x)) for aid, x in self.float_samples.items()}

    @cached_property
    def float_sd(self) -> dict[str, float]:
        return {aid: sample_sd(x) for aid, x in self.float_samples.items()}

    @cached_property
    def pd_mean(self) -> float:
        return float(np.mean(self.project_durations))

    @cached_property
    def pd_sd(self) -> float:
        return sample_sd(self.project_durations)


def _sample_column(
    dist: DurationDistribution,
    field: RandomField,
    slot: int,
    rep_indices: np.ndarray,
    max_attempts: int,
    floor: float = 0.0,
) -> np.ndarray:
    """Sample one distribution for the given replication indices.

    Draws below ``floor`` are rejected and resampled, so the result is
    always >= floor.
    """
    n = rep_indices.size
    if dist.is_deterministic:
        value = dist.mean()
        if value < floor:
            raise SamplingError(f"deterministic duration {value} is below {floor}")
        return np.full(n, value)
    x = dist.ppf(field.uniforms(slot, rep_indices, attempt=0))
    if dist.lower_bound() >= floor:
        return x
    bad = np.flatnonzero(x < floor)
    attempt = 1
    while bad.size and attempt < max_attempts:
        x[bad] = dist.ppf(field.uniforms(slot, rep_indices[bad], attempt))
        bad = bad[x[bad] < floor]
        attempt += 1
    if bad.size:
        raise SamplingError(
            f"no draw >= {floor} after {max_attempts} attempts "
            f"({dist.kind} distribution has most of its mass below that)"
        )
    return x


def _sample_activity(act: Activity, field: RandomField, slot: int, rep_indices: np.ndarray,
                     max_attempts: int) -> np.ndarray:
    """Activity duration samples: offset + scale * floored base draw (>= 0)."""
    if act.duration_scale == 0.0:
        if act.duration_offset < 0:
            raise SamplingError(f"duration of '{act.id}' is fixed below zero")
        return np.full(rep_indices.size, act.duration_offset)
    # the base draw is kept high enough that the transformed duration is >= 0
    floor = max(0.0, -act.duration_offset / act.duration_scale)
    x = _sample_column(act.distribution, field, slot, rep_indices, max_attempts, floor)
    if act.duration_offset == 0.0 and act.duration_scale == 1.0:
        return x
    return act.duration_offset + act.duration_scale * x


def sample_duration(
    dist: DurationDistribution, stream: UniformStream, max_resample_attempts: int = 100
) -> float:
    """One variate; negative draws are rejected and resampled."""
    col = _sample_column(dist, stream.field, stream.slot, stream.replications,
                         max_resample_attempts)
    return float(col[0])


def run_replication(network: ProjectNetwork, stream: ReplicationStream,
                    max_resample_attempts: int = 100) -> ReplicationRecord:
    """Sample every activity once, run both passes, record PD and floats."""
    reps = np.array([stream.replication], dtype=np.uint64)
    durations = {}
    for act in network.activities:
        col = _sample_activity(act, stream.field, network.slot[act.id],
                               reps, max_resample_attempts)
        durations[act.id] = float(col[0])
    es, _, pd = forward_pass(network, durations)
    ls, _ = backward_pass(network, durations, pd)
    floats = {aid: float(ls[aid] - es[aid]) for aid in network.real_ids}
    return ReplicationRecord(durations, float(pd), floats)


def _batch_arrays(network: ProjectNetwork, field: RandomField, lo: int, hi: int,
                  max_attempts: int):
    reps = np.arange(lo, hi, dtype=np.uint64)
    durations = {}
    for act in network.activities:
        durations[act.id] = _sample_activity(act, field, network.slot[act.id], reps, max_attempts)
    es, _, pd = forward_pass(network, durations)
    ls, _ = backward_pass(network, durations, pd)
    floats = {aid: ls[aid] - es[aid] for aid in network.real_ids}
    pd = np.asarray(pd, dtype=np.float64)
    if pd.ndim == 0:  # network with no real activities
        pd = np.full(hi - lo, float(pd))
    return durations, floats, pd


def simulate_project_durations(network: ProjectNetwork, config: SimulationConfig,
                               workers: int = 1) -> np.ndarray:
    """Project-duration samples only (no per-activity bookkeeping)."""
    field = RandomField(config.seed)
    spans = [(lo, min(lo + _CHUNK, config.replications))
             for lo in range(0, config.replications, _CHUNK)]

    def one(span):
        return _batch_arrays(network, field, span[0], span[1], config.max_resample_attempts)[2]

    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, spans))
    else:
        parts = [one(s) for s in spans]
    return np.concatenate(parts)


def run_batch(network: ProjectNetwork, config: SimulationConfig, workers: int = 1) -> SimulationBatch:
    """Run all replications; output is a pure function of (network, config)."""
    field = RandomField(config.seed)
    spans = [(lo, min(lo + _CHUNK, config.replications))
             for lo in range(0, config.replications, _CHUNK)]

    def one(span):
        return _batch_arrays(network, field, span[0], span[1], config.max_resample_attempts)

    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, spans))
    else:
        parts = [one(s) for s in spans]

    ids = network.real_ids
    duration_samples = {aid: np.concatenate([p[0][aid] for p in parts]) for aid in ids}
    float_samples = {
        aid: np.concatenate([np.broadcast_to(p[1][aid], (s[1] - s[0],)) for p, s in zip(parts, spans)])
        for aid in ids
    }
    project_durations = np.concatenate([p[2] for p in parts])
    return SimulationBatch(config, ids, duration_samples, float_samples, project_durations)


def run_scenarios(network: ProjectNetwork, scenarios, config: SimulationConfig,
                  workers: int = 1) -> list[SimulationBatch]:
    """One batch per scenario, coupled by common random numbers.

    Each scenario maps a subset of activity ids to replacement
    distributions; activities it leaves alone see exactly the same samples
    as in every other scenario run under this config.
    """
    batches = []
    for overrides in scenarios:
        scenario_net = network.with_distributions(dict(overrides))
        batches.append(run_batch(scenario_net, config, workers))
    return batches
