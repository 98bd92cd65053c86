import math

import numpy as np
import pytest

from schedrisk import DurationDistribution, SamplingError, sample_duration
from schedrisk.rng import RandomField, UniformStream
from schedrisk.simulation import _sample_column

ALL_KINDS = [
    DurationDistribution.deterministic(5.0),
    DurationDistribution.normal(5.0, 0.4),
    DurationDistribution.triangular(2.0, 4.0, 9.0),
    DurationDistribution.uniform(1.0, 7.0),
    DurationDistribution.beta(2.0, 8.0, 2.5, 4.0),
    DurationDistribution.two_point(3.0, 6.0, 0.3),
]


@pytest.mark.parametrize("dist", ALL_KINDS, ids=lambda d: d.kind)
def test_moments_match_quantile_integral(dist):
    # mean = integral of the quantile function over (0,1); same for E[X^2]
    u = (np.arange(2_000_000) + 0.5) / 2_000_000
    x = dist.ppf(u)
    assert dist.mean() == pytest.approx(float(x.mean()), abs=1e-3)
    assert dist.variance() == pytest.approx(float(x.var()), abs=5e-3)


def test_known_moments():
    assert DurationDistribution.normal(5, 0.4).variance() == pytest.approx(0.16)
    assert DurationDistribution.uniform(0, 12).variance() == pytest.approx(12.0)
    assert DurationDistribution.triangular(0, 3, 6).mean() == pytest.approx(3.0)
    assert DurationDistribution.beta(0, 1, 2, 2).mean() == pytest.approx(0.5)
    tp = DurationDistribution.two_point(0, 10, 0.5)
    assert tp.mean() == pytest.approx(5.0)
    assert tp.variance() == pytest.approx(25.0)


@pytest.mark.parametrize(
    "dist, expected_problem",
    [
        (DurationDistribution.normal(5, -1.0), "sd"),
        (DurationDistribution.triangular(5, 4, 6), "min <= mode <= max"),
        (DurationDistribution.triangular(5, 5, 5), "min < max"),
        (DurationDistribution.uniform(3, 3), "min < max"),
        (DurationDistribution.beta(0, 1, -2, 3), "alpha"),
        (DurationDistribution.two_point(1, 3, 1.5), "p_low"),
        (DurationDistribution("weird", {}), "unknown"),
        (DurationDistribution("normal", {"mean": 1.0}), "missing"),
        (DurationDistribution.normal(math.nan, 1.0), "finite"),
    ],
)
def test_check_flags_bad_params(dist, expected_problem):
    problems = dist.check()
    assert problems
    assert any(expected_problem in p for p in problems)


@pytest.mark.parametrize("dist", ALL_KINDS, ids=lambda d: d.kind)
def test_valid_params_pass_check(dist):
    assert dist.check() == []


@pytest.mark.parametrize("dist", ALL_KINDS, ids=lambda d: d.kind)
@pytest.mark.parametrize("shift,scale", [(0.0, 1.0), (2.5, 0.5), (-1.0, 2.0), (3.0, 0.0)])
def test_affine_moves_moments_exactly(dist, shift, scale):
    out = dist.affine(shift, scale)
    assert out.kind in ("deterministic", dist.kind)
    assert out.mean() == pytest.approx(shift + scale * dist.mean(), rel=1e-12, abs=1e-12)
    assert out.variance() == pytest.approx(scale**2 * dist.variance(), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("dist", ALL_KINDS, ids=lambda d: d.kind)
def test_ppf_is_monotone(dist):
    u = np.linspace(0.001, 0.999, 500)
    x = dist.ppf(u)
    assert np.all(np.diff(x) >= 0)


def test_mode_values():
    assert DurationDistribution.triangular(0, 2, 9).mode() == 2.0
    assert DurationDistribution.normal(5, 1).mode() == 5.0
    assert DurationDistribution.beta(0, 10, 3, 2).mode() == pytest.approx(10 * 2 / 3)
    assert DurationDistribution.beta(0, 10, 0.5, 2).mode() == 0.0
    assert DurationDistribution.two_point(1, 9, 0.7).mode() == 1.0
    assert DurationDistribution.two_point(1, 9, 0.2).mode() == 9.0


def _stream(seed=0, slot=0, replication=0):
    return UniformStream(RandomField(seed), slot, replication)


def test_deterministic_samples_exactly():
    dist = DurationDistribution.deterministic(5.0)
    assert all(sample_duration(dist, _stream(replication=k)) == 5.0 for k in range(20))


def test_normal_sample_mean_converges():
    dist = DurationDistribution.normal(5.0, 0.4)
    field = RandomField(123)
    x = _sample_column(dist, field, 0, np.arange(100_000, dtype=np.uint64), 100)
    # tolerance ~8 standard errors of the mean
    assert abs(float(x.mean()) - 5.0) < 0.01
    assert float(x.std(ddof=1)) == pytest.approx(0.4, rel=0.02)


@pytest.mark.parametrize("dist", [d for d in ALL_KINDS if d.variance() > 0], ids=lambda d: d.kind)
def test_sample_moments_converge_all_kinds(dist):
    n = 100_000
    field = RandomField(321)
    x = _sample_column(dist, field, 0, np.arange(n, dtype=np.uint64), 100)
    mu, var = dist.mean(), dist.variance()
    # 4-standard-error bands keep this fixed-seed check essentially
    # flake-free across the five kinds
    assert abs(float(x.mean()) - mu) < 4 * np.sqrt(var / n)
    # variance-estimator error depends on the fourth moment, so compute it
    # from the quantile function rather than assuming normal tails
    u = (np.arange(1_000_000) + 0.5) / 1_000_000
    mu4 = float(np.mean((dist.ppf(u) - mu) ** 4))
    se_var = np.sqrt(max(mu4 - var**2, 0.0) / n)
    assert abs(float(x.var(ddof=1)) - var) < 4 * se_var + 1e-12


def test_rejection_keeps_samples_nonnegative():
    dist = DurationDistribution.normal(0.5, 2.0)
    field = RandomField(9)
    x = _sample_column(dist, field, 0, np.arange(50_000, dtype=np.uint64), 100)
    assert float(x.min()) >= 0.0
    # conditional mean is above the raw mean once the negative tail is cut
    assert float(x.mean()) > 0.5


def test_resample_budget_exhaustion():
    dist = DurationDistribution.normal(-50.0, 1.0)
    field = RandomField(1)
    with pytest.raises(SamplingError):
        _sample_column(dist, field, 0, np.arange(100, dtype=np.uint64), 5)


def test_negative_deterministic_duration_is_an_error():
    with pytest.raises(SamplingError):
        sample_duration(DurationDistribution.deterministic(-1.0), _stream())


def test_same_stream_same_draw():
    dist = DurationDistribution.normal(5.0, 1.0)
    a = sample_duration(dist, _stream(seed=4, slot=2, replication=10))
    b = sample_duration(dist, _stream(seed=4, slot=2, replication=10))
    c = sample_duration(dist, _stream(seed=4, slot=2, replication=11))
    assert a == b
    assert a != c
