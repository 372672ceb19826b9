import logging
import math

import numpy as np
import pytest
from scipy import stats

from engine.errors import DomainError, InvalidMeasureError, ZeroTailError
from engine.levy import ray_tail
from engine.measure import Ray, RosinskiMeasure, TSParams, atom_measure
from engine.moments import MultiIndex, cumulant
from engine.profiles import GridProfile, ParetoProfile
from engine.special_fn import KernelParams, gamma_upper, kernel_k
from services.sim import (
    DRIFT_ONLY,
    SimConfig,
    empirical_cf,
    prepare,
    sample,
    sample_jump_radius,
    sample_tempered_t,
)


def test_zero_measure_gives_the_shift(zero_params):
    batch = sample(zero_params, SimConfig(n=25, seed=1, chunk_size=10))
    assert batch.values.shape == (25, 1)
    assert np.all(batch.values == 1.0)
    assert batch.diagnostics.lam == 0.0


def test_same_seed_same_samples(delta_one):
    cfg = SimConfig(epsilon=0.05, n=3000, seed=42, chunk_size=700)
    a = sample(delta_one, cfg).values
    b = sample(delta_one, cfg).values
    assert np.array_equal(a, b)


def test_worker_count_does_not_change_samples(delta_one):
    cfg = SimConfig(epsilon=0.05, n=3000, seed=7, chunk_size=500)
    serial = sample(delta_one, cfg, max_workers=1).values
    threaded = sample(delta_one, cfg, max_workers=4).values
    assert np.array_equal(serial, threaded)


def test_different_seeds_differ(delta_one):
    a = sample(delta_one, SimConfig(n=100, seed=1)).values
    b = sample(delta_one, SimConfig(n=100, seed=2)).values
    assert not np.array_equal(a, b)


def test_sample_moments_match_cumulants(delta_one):
    batch = sample(delta_one, SimConfig(epsilon=1e-2, n=50_000, seed=3))
    x = batch.values[:, 0]
    assert x.mean() == pytest.approx(cumulant(delta_one, MultiIndex((1,))), abs=0.02)
    assert x.var() == pytest.approx(cumulant(delta_one, MultiIndex((2,))), abs=0.04)


def test_two_dimensional_covariance():
    s = 1.0 / math.sqrt(2.0)
    params = TSParams(0.5, 1.0, (0.0, 0.0), atom_measure([((s, s), 1.0, 1.0), ((1.0, 0.0), 0.5, 2.0)]))
    batch = sample(params, SimConfig(epsilon=1e-2, n=50_000, seed=9))
    cov = np.cov(batch.values.T)
    assert batch.dim == 2
    assert cov[0, 1] == pytest.approx(cumulant(params, MultiIndex((1, 1))), abs=0.03)


def test_progress_and_cancel(delta_one):
    seen = []
    sample(delta_one, SimConfig(n=40, chunk_size=10), on_progress=lambda pct, msg: seen.append(pct))
    assert seen[-1] == 100
    with pytest.raises(RuntimeError):
        sample(delta_one, SimConfig(n=40, chunk_size=10), cancel=lambda: True)


def test_drift_only_warns_for_infinite_activity(delta_one, caplog):
    with caplog.at_level(logging.WARNING, logger="services.sim"):
        plan = prepare(delta_one, SimConfig(small_jump=DRIFT_ONLY))
    assert not plan.gaussian
    assert any("drift-only" in rec.message for rec in caplog.records)


def test_invalid_measure_is_refused():
    bad = TSParams(0.5, 1.0, (0.0,), RosinskiMeasure(1, (Ray((1.0,), ParetoProfile(1.0, 0.3, 1.0)),)))
    with pytest.raises(InvalidMeasureError):
        sample(bad, SimConfig(n=10))


def test_sim_config_checks():
    with pytest.raises(DomainError):
        SimConfig(epsilon=0.0)
    with pytest.raises(DomainError):
        SimConfig(n=0)
    with pytest.raises(DomainError):
        SimConfig(small_jump="none")
    cfg = SimConfig.from_config({"epsilon": 0.5, "seed": 4}, n=12, seed=None)
    assert (cfg.epsilon, cfg.seed, cfg.n) == (0.5, 4, 12)


def test_tempered_t_mean():
    kp = KernelParams(0.5, 1.0)
    rng = np.random.default_rng(0)
    t = sample_tempered_t(0.1, kp, 100_000, rng)
    assert np.all(t > 0.1)
    expected = gamma_upper(0.5, 0.1) / gamma_upper(-0.5, 0.1)
    assert t.mean() == pytest.approx(expected, rel=0.02)


def test_tempered_t_far_tail():
    rng = np.random.default_rng(1)
    t = sample_tempered_t(800.0, KernelParams(-1.0, 1.0), 20_000, rng)
    assert np.all(t > 800.0)
    assert (t - 800.0).mean() == pytest.approx(1.0, abs=0.05)


@pytest.mark.parametrize("profile", [
    ParetoProfile(1.0, 3.0, 1.0),
    ParetoProfile(0.0, 1.2, 1.0),
    GridProfile(np.linspace(0.5, 2.0, 31), np.linspace(1.0, 0.2, 31)),
])
def test_radius_sampler_matches_tail(profile):
    params = TSParams(0.5, 1.0, (0.0,), RosinskiMeasure(1, (Ray((1.0,), profile),)))
    eps = 0.1
    plan = prepare(params, SimConfig(epsilon=eps))
    radii = plan.samplers[0].draw(100_000, np.random.default_rng(5))
    assert np.all(radii > eps)
    kp = params.kernel
    for r in (0.3, 1.0, 3.0):
        expected = ray_tail(profile, r, kp) / ray_tail(profile, eps, kp)
        assert np.mean(radii > r) == pytest.approx(expected, abs=0.01)


def test_jump_radius_endpoint():
    params = TSParams(0.0, 1.0, (0.0,), atom_measure([((1.0,), 1.0, 1.0)]))
    assert sample_jump_radius(params, 0, 0.1, 1.0) == 0.1


def test_jump_radius_inverts_the_tail():
    params = TSParams(0.0, 1.0, (0.0,), atom_measure([((1.0,), 1.0, 1.0)]))
    kp = params.kernel
    r = sample_jump_radius(params, 0, 0.1, 0.5)
    assert r > 0.1
    assert float(kernel_k(r, kp)) / float(kernel_k(0.1, kp)) == pytest.approx(0.5, rel=1e-9)


def test_jump_radius_errors(delta_one):
    with pytest.raises(DomainError):
        sample_jump_radius(delta_one, 0, 0.1, 0.0)
    with pytest.raises(DomainError):
        sample_jump_radius(delta_one, 0, 0.1, 1.5)
    grid = TSParams(0.5, 1.0, (0.0,), RosinskiMeasure(1, (Ray((1.0,), GridProfile([1.0, 2.0], [0.0, 0.0])),)))
    with pytest.raises(ZeroTailError):
        sample_jump_radius(grid, 0, 0.1, 0.5)


def test_empirical_cf_point_mass():
    ones = np.ones((10, 1))
    assert empirical_cf(ones, [0.0])[0] == pytest.approx(1.0)
    assert empirical_cf(ones, [math.pi])[0] == pytest.approx(-1.0 + 0j, abs=1e-15)


def test_empirical_cf_two_dimensional():
    values = np.array([[1.0, 2.0], [0.0, -1.0]])
    got = empirical_cf(values, [[0.5, 0.25]])
    want = 0.5 * (np.exp(1j * 1.0) + np.exp(1j * -0.25))
    assert got[0] == pytest.approx(want)
    with pytest.raises(DomainError):
        empirical_cf(np.empty((0, 1)), [1.0])


def test_jump_rate_sums_ray_tails(symmetric_delta):
    eps = 0.05
    batch = sample(symmetric_delta, SimConfig(epsilon=eps, n=200, seed=4))
    kp = symmetric_delta.kernel
    rays = symmetric_delta.measure.rays
    assert batch.diagnostics.ray_lam == pytest.approx([ray_tail(r.profile, eps, kp) for r in rays], rel=1e-12)
    assert batch.diagnostics.lam == pytest.approx(sum(batch.diagnostics.ray_lam), rel=1e-14)
    assert batch.jump_counts.shape == (200,)
    assert batch.jump_counts.dtype.kind == "i"


@pytest.mark.slow
def test_jump_counts_are_poisson(delta_one):
    eps = 1e-2
    n = 100_000
    batch = sample(delta_one, SimConfig(epsilon=eps, n=n, seed=17))
    lam = batch.diagnostics.lam
    counts = batch.jump_counts
    assert abs(counts.mean() - lam) < 4.0 * math.sqrt(lam / n)
    assert counts.var() / counts.mean() == pytest.approx(1.0, abs=0.03)

    lo, hi = (int(v) for v in stats.poisson.ppf([1e-3, 1.0 - 1e-3], lam))
    edges = np.arange(lo, hi + 1)
    observed = np.array([np.sum(counts <= lo)] + [np.sum(counts == k) for k in edges[1:-1]]
                        + [np.sum(counts >= hi)])
    cdf = stats.poisson.cdf(edges, lam)
    expected = n * np.concatenate(([cdf[0]], np.diff(cdf)[:-1], [1.0 - cdf[-2]]))
    assert observed.sum() == n
    assert stats.chisquare(observed, expected).pvalue > 1e-3


@pytest.mark.slow
def test_million_draws_match_cumulants(delta_one):
    n = 1_000_000
    x = sample(delta_one, SimConfig(epsilon=1e-2, n=n, seed=21), max_workers=4).values[:, 0]
    c = {order: cumulant(delta_one, MultiIndex((order,))) for order in (1, 2, 4)}
    assert c[2] == pytest.approx(0.886227, abs=1e-6)
    mean_se = math.sqrt(c[2] / n)
    var_se = math.sqrt((c[4] + 2.0 * c[2] ** 2) / n)
    assert abs(x.mean() - c[1]) < 4.0 * mean_se
    assert abs(x.var() - c[2]) < 3.0 * var_se


@pytest.mark.slow
def test_truncation_level_does_not_change_the_law(delta_one):
    coarse = sample(delta_one, SimConfig(epsilon=1e-2, n=100_000, seed=31)).values[:, 0]
    fine = sample(delta_one, SimConfig(epsilon=1e-3, n=100_000, seed=32)).values[:, 0]
    assert stats.ks_2samp(coarse, fine).pvalue > 0.01
