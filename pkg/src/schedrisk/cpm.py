"""Deterministic critical-path engine.

Forward/backward passes run over the topological order and work with
either plain floats or numpy vectors as durations, so one code path
serves both the planned schedule and batched Monte Carlo replications.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import SchedRiskError
from .network import SINK_ID, SOURCE_ID, ProjectNetwork, topological_order

DEFAULT_FLOAT_EPS = 1e-9


@dataclass(frozen=True)
class ScheduleResult:
    """Early/late times and floats for the real activities."""

    es: dict[str, float]
    ef: dict[str, float]
    ls: dict[str, float]
    lf: dict[str, float]
    total_float: dict[str, float]
    project_duration: float


@dataclass(frozen=True)
class PlannedSchedule:
    """Schedule at each distribution's central value; sac is the planned duration."""

    schedule: ScheduleResult
    sac: float
    durations: dict[str, float]

    @property
    def es(self) -> dict[str, float]:
        return self.schedule.es

    @property
    def ef(self) -> dict[str, float]:
        return self.schedule.ef


def _full_durations(network: ProjectNetwork, durations):
    full = {SOURCE_ID: 0.0, SINK_ID: 0.0}
    for aid in network.real_ids:
        if aid not in durations:
            raise SchedRiskError(f"missing duration for activity '{aid}'")
        full[aid] = durations[aid]
    return full


def forward_pass(network: ProjectNetwork, durations):
    """Earliest start/finish per activity plus the project duration.

    ``durations`` maps real activity id to a float or a numpy vector of
    per-replication samples; virtual activities are implicitly zero.
    """
    d = _full_durations(network, durations)
    order = topological_order(network)
    es, ef = {}, {}
    for aid in order:
        preds = network.predecessors_of[aid]
        start = reduce(np.maximum, (ef[p] for p in preds)) if preds else 0.0
        es[aid] = start
        ef[aid] = start + d[aid]
    project_duration = ef[SINK_ID]
    real_es = {aid: es[aid] for aid in network.real_ids}
    real_ef = {aid: ef[aid] for aid in network.real_ids}
    return real_es, real_ef, project_duration


def backward_pass(network: ProjectNetwork, durations, project_duration):
    """Latest start/finish given the project duration from the forward pass."""
    d = _full_durations(network, durations)
    order = topological_order(network)
    ls, lf = {}, {}
    for aid in reversed(order):
        succs = network.successors_of[aid]
        finish = reduce(np.minimum, (ls[s] for s in succs)) if succs else project_duration
        lf[aid] = finish
        ls[aid] = finish - d[aid]
    real_ls = {aid: ls[aid] for aid in network.real_ids}
    real_lf = {aid: lf[aid] for aid in network.real_ids}
    return real_ls, real_lf


def total_floats(es, ls) -> dict:
    """Total float (slack) per activity: latest start minus earliest start."""
    return {aid: ls[aid] - es[aid] for aid in es}


def critical_set(floats, eps: float = DEFAULT_FLOAT_EPS) -> set[str]:
    """Ids whose total float is zero within tolerance."""
    return {aid for aid, tf in floats.items() if abs(tf) <= eps}


def compute_schedule(network: ProjectNetwork, durations) -> ScheduleResult:
    es, ef, pd = forward_pass(network, durations)
    ls, lf = backward_pass(network, durations, pd)
    return ScheduleResult(es, ef, ls, lf, total_floats(es, ls), float(pd))


def planned_schedule(network: ProjectNetwork, determinize: str = "mean") -> PlannedSchedule:
    """Deterministic schedule at each activity's central value (mean by default)."""
    durations = {a.id: a.central_duration(determinize) for a in network.activities}
    schedule = compute_schedule(network, durations)
    return PlannedSchedule(schedule, schedule.project_duration, durations)
