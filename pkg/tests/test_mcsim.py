"""Simulation harness: scheme invariants and light statistical checks.

Heavier statistical acceptance (1e5 paths, end-to-end pipeline) lives in
test_acceptance.py; here the focus is exactness properties: common random
numbers, determinism, evaluation identities and input gates.
"""

import numpy as np
import pytest

from parastable.enhanced_drift import sample_white_noise
from parastable.fields import FourierGrid, PeriodicField, TimeField, uniform_times
from parastable.mcsim import (
    SimulationConfig,
    brox_demo,
    drift_moment_scaling,
    euler_maruyama,
    evaluate_periodic,
    marginal_convergence,
    martingale_test,
    mollify_drift,
    mollify_field,
)
from parastable.semigroup import StableSymbol, semigroup_apply
from parastable.spectral import synthesize_field

SYM2 = StableSymbol.fractional_laplacian(2.0)


def _cfg(**kw):
    base = dict(sym=SYM2, T=1.0, h=1.0 / 128.0, paths=2000, seed=3)
    base.update(kw)
    return SimulationConfig(**base)


def test_config_gates():
    with pytest.raises(ValueError):
        _cfg(h=0.1)  # h > T/64
    with pytest.raises(ValueError):
        _cfg(paths=500)
    with pytest.raises(ValueError):
        _cfg(chunks=10)
    assert _cfg().n_steps == 128
    assert sum(_cfg(paths=2001).chunk_sizes()) == 2001


def test_mollify_sharp_truncation():
    grid = FourierGrid(64, 1)
    u = synthesize_field(grid, 0.3, np.random.default_rng(0))
    v = mollify_field(u, 5)
    k = np.abs(grid.freq_magnitude())
    assert np.all(v.coeffs[k > 5] == 0)
    assert np.allclose(v.coeffs[k <= 5], u.coeffs[k <= 5])
    with pytest.raises(ValueError):
        mollify_field(u, 32)  # exceeds grid bound


def test_mollify_drift_accepts_white_noise():
    grid = FourierGrid(64, 1)
    xi = sample_white_noise(1, 20, grid)
    v = mollify_drift(xi, 8, times=uniform_times(1.0, 2))
    assert isinstance(v, TimeField)
    k = np.abs(grid.freq_magnitude())
    assert np.all(v.coeffs[0][k > 8] == 0)


def test_evaluate_periodic_matches_exact_series():
    grid = FourierGrid(64, 1)
    u = synthesize_field(grid, 0.3, np.random.default_rng(2))
    x = np.random.default_rng(3).uniform(-5, 5, 64)
    assert np.allclose(evaluate_periodic(u.coeffs, x), u.eval_at(x % 1.0),
                       atol=1e-12)
    # exactly periodic
    assert np.allclose(evaluate_periodic(u.coeffs, x),
                       evaluate_periodic(u.coeffs, x + 3.0), atol=1e-12)


def test_euler_is_deterministic_and_coupled():
    grid = FourierGrid(64, 1)
    cfg = _cfg()
    a, _, _ = euler_maruyama(cfg, None, [1.0])
    b, _, _ = euler_maruyama(cfg, None, [1.0])
    assert np.array_equal(a[1.0], b[1.0])
    # a zero drift field consumes no extra randomness: identical paths
    zero = TimeField.constant_in_time(PeriodicField.zero(grid),
                                      uniform_times(1.0, 2))
    c, _, _ = euler_maruyama(cfg, zero, [1.0])
    assert np.allclose(a[1.0], c[1.0])
    # different drifts share noise: difference is the drift integral alone,
    # bounded by sup|V| * T
    const = TimeField.constant_in_time(PeriodicField.constant(grid, 0.25),
                                       uniform_times(1.0, 2))
    d, _, _ = euler_maruyama(cfg, const, [1.0])
    assert np.allclose(d[1.0] - a[1.0], 0.25, atol=1e-12)


def test_euler_free_marginal_is_stable_law():
    # alpha = 2: X_T - x0 ~ N(0, 2T) under the symbol normalization
    cfg = _cfg(paths=50_000, x0=0.3)
    pos, _, _ = euler_maruyama(cfg, None, [1.0])
    x = pos[1.0] - 0.3
    assert np.mean(x) == pytest.approx(0.0, abs=0.03)
    assert np.var(x) == pytest.approx(2.0, rel=0.05)


def test_integral_accumulates_constant_integrand():
    grid = FourierGrid(16, 1)
    cfg = _cfg()
    one = TimeField.constant_in_time(PeriodicField.constant(grid, 1.0),
                                     uniform_times(1.0, 2))
    _, integrals, _ = euler_maruyama(cfg, None, [0.5, 1.0], integrand=one)
    assert np.allclose(integrals[0.5], 0.5, atol=1e-12)
    assert np.allclose(integrals[1.0], 1.0, atol=1e-12)


def test_record_time_must_be_on_grid():
    cfg = _cfg()
    with pytest.raises(ValueError):
        euler_maruyama(cfg, None, [0.3333])


def test_martingale_free_case_and_negative_control():
    grid = FourierGrid(64, 1)
    T = 1.0
    cfg = _cfg(paths=20_000)
    terminal = PeriodicField.pure_mode(grid, 1, amplitude=1.0, real=True)
    times = uniform_times(T, 64)
    u = TimeField(grid, times,
                  np.stack([semigroup_apply(SYM2, T - t, terminal).coeffs
                            for t in times]), real=True)
    rep = martingale_test(u, None, cfg, None, [(T / 2, T)])
    assert rep.passed
    assert len(rep.rows) == 3  # one row per functional
    # corrupt u with a spurious time-linear constant: the defect is
    # deterministic, so it fails by a wide margin
    bad = u.coeffs.copy()
    bad[:, 0] += 0.25 * times
    rep_bad = martingale_test(TimeField(grid, times, bad, real=True), None,
                              cfg, None, [(T / 2, T)])
    assert not rep_bad.passed
    assert rep_bad.max_sigmas() >= 5.0


def test_moment_scaling_requires_wide_span():
    grid = FourierGrid(64, 1)
    cfg = _cfg()
    v = TimeField.constant_in_time(
        PeriodicField.pure_mode(grid, 1, amplitude=1.0, real=True),
        uniform_times(1.0, 2))
    with pytest.raises(ValueError):
        drift_moment_scaling(cfg, v, 2, [0.25, 0.5, 1.0])
    with pytest.raises(ValueError):
        drift_moment_scaling(cfg, v, 3, [1.0 / 64, 1.0])


def test_marginal_convergence_shape():
    grid = FourierGrid(64, 1)
    cfg = _cfg()
    xi = sample_white_noise(5, 8, grid)
    drifts = {n: mollify_drift(xi, n, times=uniform_times(1.0, 2))
              for n in (4, 8)}
    out = marginal_convergence(cfg, drifts, [0.5, 1.0])
    assert out["levels"] == [4, 8]
    assert len(out["rows"]) == 2
    assert all(0.0 <= r["ks_distance"] <= 1.0 for r in out["rows"])


@pytest.mark.parametrize("alpha", [1.6, 1.75, 2.1])
def test_brox_demo_refuses_out_of_range_alpha(alpha):
    with pytest.raises(ValueError):
        brox_demo(0, alpha)
