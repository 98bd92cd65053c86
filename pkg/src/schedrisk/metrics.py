"""Activity sensitivity metrics computed from a simulation batch.

All indices are defined per real activity and are higher-is-more-important:

* criticality index: share of replications in which the activity has zero
  total float;
* cruciality indices: absolute correlation between activity duration and
  project duration (Pearson, Spearman via the classic rank-difference
  formula with average ranks, Kendall tau-a via pair concordance);
* significance index: expected value of d/(d + float) scaled by relative
  project duration;
* schedule sensitivity index: criticality times the sd ratio of activity
  duration to project duration;
* management-oriented index: programmed variability against slack and the
  density of downstream activities.

Degenerate series (zero spread on either side) yield a correlation of 0 by
definition: a constant input cannot move the output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import ComputationError
from .network import ProjectNetwork, immediate_successor_count, transitive_successor_count
from .simulation import SimulationBatch

DEFAULT_CRITICALITY_EPS = 1e-9
DEFAULT_TIE_EPS = 1e-3
DEFAULT_MOI_MIN_DENOMINATOR = 1e-6

METRIC_KEYS = ("ci", "cri_pearson", "cri_spearman", "cri_kendall", "si", "ssi", "moi")


@dataclass(frozen=True)
class MetricsReport:
    ids: tuple[str, ...]
    values: dict[str, dict[str, float]]  # metric key -> activity id -> value
    ranks: dict[str, dict[str, int]]  # metric key -> activity id -> rank
    warnings: tuple[str, ...] = ()


def criticality_index(batch: SimulationBatch, eps: float = DEFAULT_CRITICALITY_EPS) -> dict[str, float]:
    """Fraction of replications in which the activity is critical."""
    return {
        aid: float(np.mean(np.abs(tf) <= eps))
        for aid, tf in batch.float_samples.items()
    }


def _constant(x: np.ndarray) -> bool:
    return float(x.min()) == float(x.max())


def cruciality_pearson(batch: SimulationBatch) -> dict[str, float]:
    pd = batch.project_durations
    pd_constant = _constant(pd)
    pd_sd = np.std(pd, ddof=1)
    pd_centered = pd - pd.mean()
    out = {}
    for aid, d in batch.duration_samples.items():
        if pd_constant or _constant(d):
            out[aid] = 0.0
            continue
        cov = float(np.dot(d - d.mean(), pd_centered)) / (len(pd) - 1)
        out[aid] = abs(cov / (np.std(d, ddof=1) * pd_sd))
    return out


def cruciality_spearman(batch: SimulationBatch) -> dict[str, float]:
    pd = batch.project_durations
    n = pd.size
    pd_constant = _constant(pd)
    pd_ranks = rankdata(pd)
    denom = n * (n * n - 1.0)
    out = {}
    for aid, d in batch.duration_samples.items():
        if pd_constant or _constant(d):
            out[aid] = 0.0
            continue
        delta = rankdata(d) - pd_ranks
        out[aid] = abs(1.0 - 6.0 * float(np.dot(delta, delta)) / denom)
    return out


def _count_inversions(a: np.ndarray) -> tuple[np.ndarray, int]:
    """Sorted copy of ``a`` and the number of strict inversions, by merge counting."""
    n = a.size
    if n <= 1:
        return a, 0
    mid = n // 2
    left, cl = _count_inversions(a[:mid])
    right, cr = _count_inversions(a[mid:])
    # pairs (l in left, r in right) with l > r
    pos = np.searchsorted(left, right, side="right")
    cross = int(np.sum(left.size - pos))
    merged = np.concatenate([left, right])
    merged.sort(kind="stable")
    return merged, cl + cr + cross


def _tied_pair_count(sorted_values: np.ndarray) -> int:
    """Sum over tie groups of c*(c-1)/2 for an already sorted array."""
    if sorted_values.size == 0:
        return 0
    boundaries = np.flatnonzero(np.diff(sorted_values) != 0)
    counts = np.diff(np.concatenate([[0], boundaries + 1, [sorted_values.size]]))
    return int(np.sum(counts * (counts - 1) // 2))


def concordant_pairs(x: np.ndarray, y: np.ndarray) -> int:
    """Number of strictly concordant pairs in O(n log n).

    A pair (i, j) is concordant when x and y move in the same direction;
    ties in either coordinate count as neither concordant nor discordant.
    """
    n = x.size
    order = np.lexsort((y, x))
    xs, ys = x[order], y[order]
    _, discordant = _count_inversions(ys.copy())
    n0 = n * (n - 1) // 2
    tied_x = _tied_pair_count(xs)
    tied_y = _tied_pair_count(np.sort(y, kind="stable"))
    # pairs tied in both coordinates (xs, ys is sorted lexicographically)
    both = (np.diff(xs) == 0) & (np.diff(ys) == 0)
    tied_xy = _tied_pair_count(np.cumsum(np.concatenate([[False], ~both])))
    return n0 - discordant - tied_x - tied_y + tied_xy


def cruciality_kendall(batch: SimulationBatch) -> dict[str, float]:
    pd = batch.project_durations
    n = pd.size
    pd_constant = _constant(pd)
    out = {}
    for aid, d in batch.duration_samples.items():
        if pd_constant or _constant(d):
            out[aid] = 0.0
            continue
        p = concordant_pairs(d, pd)
        out[aid] = abs(4.0 * p / (n * (n - 1.0)) - 1.0)
    return out


def significance_index(batch: SimulationBatch) -> dict[str, float]:
    pd = batch.project_durations
    mean_pd = float(pd.mean())
    if mean_pd == 0.0:
        raise ComputationError("significance index undefined: expected project duration is zero")
    out = {}
    for aid, d in batch.duration_samples.items():
        tf = batch.float_samples[aid]
        denom = d + tf
        ratio = np.divide(d, denom, out=np.zeros_like(d), where=denom != 0)
        out[aid] = float(np.mean(ratio * pd)) / mean_pd
    return out


def schedule_sensitivity_index(batch: SimulationBatch, ci: dict[str, float]) -> dict[str, float]:
    sigma_pd = batch.pd_sd
    if sigma_pd == 0.0:
        raise ComputationError(
            "schedule sensitivity index undefined: project duration has zero variance"
        )
    return {aid: ci[aid] * batch.duration_sd[aid] / sigma_pd for aid in batch.ids}


def management_oriented_index(
    network: ProjectNetwork,
    batch: SimulationBatch,
    successor_scope: str = "immediate",
    min_denominator: float = DEFAULT_MOI_MIN_DENOMINATOR,
) -> tuple[dict[str, float], tuple[str, ...]]:
    """MOI values plus warnings for any activity whose denominator was floored.

    ``successor_scope`` selects how downstream density is counted:
    ``immediate`` (direct successors, the default) or ``transitive`` (all
    reachable real activities).
    """
    if successor_scope == "immediate":
        count = immediate_successor_count
    elif successor_scope == "transitive":
        count = transitive_successor_count
    else:
        raise ValueError(f"successor_scope must be 'immediate' or 'transitive', got '{successor_scope}'")

    n_real = len(network.real_ids)
    sigmas = {a.id: a.duration_sd() for a in network.activities}
    sigma_max = max(sigmas.values(), default=0.0)
    if sigma_max == 0.0:
        raise ComputationError("management-oriented index undefined: no activity has variability")

    values: dict[str, float] = {}
    warnings: list[str] = []
    for aid in batch.ids:
        post_density = count(network, aid) / n_real
        denom = batch.float_mean[aid] - post_density + 1.0
        if denom <= 0.0:
            warnings.append(
                f"MOI denominator for '{aid}' is {denom:.6g} <= 0; floored to {min_denominator:g}"
            )
            denom = min_denominator
        values[aid] = sigmas[aid] / (sigma_max * denom)
    return values, tuple(warnings)


def rank_activities(
    values: dict[str, float],
    tie_eps: float = DEFAULT_TIE_EPS,
    higher_is_better: bool = True,
) -> dict[str, int]:
    """Competition ranking: a tied group shares the best rank, the next rank skips.

    Values within ``tie_eps`` of a group's leading value are tied with it;
    ties between exact equals are broken deterministically by insertion
    order of ``values``.
    """
    file_pos = {aid: i for i, aid in enumerate(values)}
    sign = -1.0 if higher_is_better else 1.0
    ordered = sorted(values, key=lambda aid: (sign * values[aid], file_pos[aid]))
    ranks: dict[str, int] = {}
    group_rank = 1
    group_anchor = None
    for pos, aid in enumerate(ordered, start=1):
        v = values[aid]
        if group_anchor is None or abs(v - group_anchor) > tie_eps:
            group_rank = pos
            group_anchor = v
        ranks[aid] = group_rank
    return ranks


def compute_metrics(
    network: ProjectNetwork,
    batch: SimulationBatch,
    criticality_eps: float = DEFAULT_CRITICALITY_EPS,
    tie_eps: float = DEFAULT_TIE_EPS,
    moi_successor_scope: str = "immediate",
    selected: tuple[str, ...] | None = None,
) -> MetricsReport:
    """All selected indices with their competition rankings."""
    wanted = set(selected if selected is not None else METRIC_KEYS)
    values: dict[str, dict[str, float]] = {}
    warnings: tuple[str, ...] = ()

    ci = criticality_index(batch, criticality_eps)
    if "ci" in wanted:
        values["ci"] = ci
    if "cri_pearson" in wanted:
        values["cri_pearson"] = cruciality_pearson(batch)
    if "cri_spearman" in wanted:
        values["cri_spearman"] = cruciality_spearman(batch)
    if "cri_kendall" in wanted:
        values["cri_kendall"] = cruciality_kendall(batch)
    if "si" in wanted:
        values["si"] = significance_index(batch)
    if "ssi" in wanted:
        values["ssi"] = schedule_sensitivity_index(batch, ci)
    if "moi" in wanted:
        moi, warnings = management_oriented_index(network, batch, moi_successor_scope)
        values["moi"] = moi

    ordered_values = {
        key: {aid: values[key][aid] for aid in batch.ids}
        for key in METRIC_KEYS
        if key in values
    }
    ranks = {key: rank_activities(vals, tie_eps) for key, vals in ordered_values.items()}
    return MetricsReport(batch.ids, ordered_values, ranks, warnings)
