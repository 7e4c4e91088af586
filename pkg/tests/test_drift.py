"""Enhanced drifts: white-noise sampling, lifts and the chaos oracle."""

import numpy as np
import pytest

from parastable.enhanced_drift import (
    EnhancedDrift,
    chaos_variance_oracle,
    lift_mean_oracle,
    lift_smooth,
    lift_white_noise,
    sample_white_noise,
    _resonant_weight,
    _rho_hat,
)
from parastable.fields import FourierGrid, PeriodicField, TimeField, uniform_times
from parastable.semigroup import StableSymbol
from parastable.spectral import dyadic_weight, lp_block, synthesize_time_field


def test_white_noise_covariance_is_l2_pairing():
    grid = FourierGrid(64, 1)
    n = 16
    phi = PeriodicField.pure_mode(grid, 3, amplitude=1.0, real=True)
    psi_f = PeriodicField.pure_mode(grid, 5, amplitude=1.0, real=True)
    seeds = 4000
    acc_pp = acc_pq = 0.0
    for s in range(seeds):
        xi = sample_white_noise(s, n, grid)
        acc_pp += xi.pair(phi).real ** 2
        acc_pq += xi.pair(phi).real * xi.pair(psi_f).real
    # <phi, phi> = 1/2 for a unit cosine, <phi, psi> = 0
    assert acc_pp / seeds == pytest.approx(0.5, rel=0.1)
    assert abs(acc_pq / seeds) <= 0.05


def test_white_noise_is_reproducible_and_hermitian():
    grid = FourierGrid(64, 1)
    a = sample_white_noise(7, 20, grid)
    b = sample_white_noise(7, 20, grid)
    assert np.array_equal(a.field.coeffs, b.field.coeffs)
    c = a.field.coeffs
    assert np.allclose(c[1:], np.conj(c[1:][::-1]), atol=1e-14)
    assert np.all(c[21:64 - 20] == 0.0)


def test_white_noise_zero_mean_flag():
    grid = FourierGrid(32, 1)
    xi = sample_white_noise(3, 8, grid, zero_mean=True)
    assert xi.field.coeffs[0] == 0.0


def test_enhanced_drift_regime_gates():
    grid = FourierGrid(32, 1)
    times = uniform_times(1.0, 4)
    v1 = (TimeField.constant_in_time(
        PeriodicField.pure_mode(grid, 1, amplitude=1.0, real=True), times),)
    # rough regime without V2 is rejected
    with pytest.raises(ValueError):
        EnhancedDrift(v1, None, -0.5, 1.9)
    # below the admissible floor is rejected outright
    with pytest.raises(ValueError):
        EnhancedDrift(v1, None, -0.7, 1.9)
    # Young regime works and records the norm
    drift = EnhancedDrift(v1, None, 0.4, 1.9)
    assert drift.norms["v1_beta"] > 0
    assert not drift.is_rough


def test_enhanced_drift_dict_roundtrip():
    grid = FourierGrid(32, 1)
    times = uniform_times(1.0, 4)
    sym = StableSymbol.fractional_laplacian(1.9)
    eta = synthesize_time_field(grid, 0.5, times, np.random.default_rng(0),
                                kmax=4)
    drift = lift_smooth(eta, sym)
    back = EnhancedDrift.from_dict(drift.to_dict())
    assert np.allclose(back.v1[0].coeffs, drift.v1[0].coeffs)
    assert np.allclose(back.v2[0][0].coeffs, drift.v2[0][0].coeffs)
    assert back.beta == drift.beta


def test_lift_smooth_is_quadratic():
    # scaling eta by c scales V2 by c^2
    grid = FourierGrid(32, 1)
    times = uniform_times(1.0, 4)
    sym = StableSymbol.fractional_laplacian(1.9)
    eta = synthesize_time_field(grid, 0.5, times, np.random.default_rng(1),
                                kmax=4)
    eta2 = TimeField(grid, times, 2.0 * eta.coeffs, real=True)
    a = lift_smooth(eta, sym)
    b = lift_smooth(eta2, sym)
    assert np.allclose(b.v2[0][0].coeffs, 4.0 * a.v2[0][0].coeffs, atol=1e-12)


def test_lift_white_noise_rejects_low_alpha():
    # no regularity tag below -1/2 is admissible unless alpha > 7/4
    grid = FourierGrid(32, 1)
    xi = sample_white_noise(0, 8, grid)
    with pytest.raises(ValueError):
        lift_white_noise(xi, StableSymbol.fractional_laplacian(1.6), 1.0,
                         n_times=5)


def test_lift_white_noise_adapts_tag_near_boundary():
    # at alpha = 1.8 the floor is -8/15; the tag must sit strictly between
    # the floor and -1/2
    grid = FourierGrid(32, 1)
    xi = sample_white_noise(0, 8, grid)
    lift = lift_white_noise(xi, StableSymbol.fractional_laplacian(1.8), 1.0,
                            n_times=5)
    assert (2.0 - 2.0 * 1.8) / 3.0 < lift.beta < -0.5


def _wick_second_moment(sym, j, s, t, n, T):
    """Independent oracle: brute-force expectation over the Gaussian
    coefficients via the Wick/Isserlis rule,

      E[w_p w_q wbar_r wbar_s] =
        d(p+q) d(r+s) + d(p-r) d(q-s) + d(p-s) d(q-r),

    applied to |sum_{k1,k2} c(k1,k2) w_k1 w_k2|^2 with the convention
    wbar_k = w_{-k}.
    """
    ks = np.arange(-n, n + 1)
    k1 = ks[:, None].astype(float)
    k2 = ks[None, :].astype(float)
    rho = _rho_hat(sym, t, T, k1) - _rho_hat(sym, s, T, k1)
    c = dyadic_weight(j, k1 + k2) * _resonant_weight(k1, k2) * rho
    idx = {k: i for i, k in enumerate(ks)}
    total = 0.0
    # E |X|^2 with X = sum c(p,q) w_p w_q; pair (p,q) against conj (r,s)
    for ip, p in enumerate(ks):
        for iq, q in enumerate(ks):
            cpq = c[ip, iq]
            if cpq == 0:
                continue
            for ir, r in enumerate(ks):
                for i_s, s_ in enumerate(ks):
                    crs = np.conj(c[ir, i_s])
                    if crs == 0:
                        continue
                    w = 0.0
                    if p + q == 0 and r + s_ == 0:
                        w += 1.0
                    if p == r and q == s_:
                        w += 1.0
                    if p == s_ and q == r:
                        w += 1.0
                    if w:
                        total += w * (cpq * crs).real
    return total


def test_chaos_oracle_equals_wick_enumeration():
    # the window sits near T because the backward kernel decays like
    # e^(-(T-r) psi(k)); earlier windows carry negligible mass
    sym = StableSymbol.fractional_laplacian(1.9)
    T, s, t, n = 1.0, 0.9, 1.0, 4
    for j in (-1, 1, 2):
        oracle = chaos_variance_oracle(sym, j, s, t, n, T)
        brute = _wick_second_moment(sym, j, s, t, n, T)
        assert oracle == pytest.approx(brute, abs=1e-10 * max(1.0, brute))
        if j in (1, 2):
            assert oracle > 1e-8  # the comparison is not vacuous


def test_chaos_oracle_monotone_in_window():
    # the quadratic form grows with the time window
    sym = StableSymbol.fractional_laplacian(1.9)
    a = chaos_variance_oracle(sym, 2, 0.95, 1.0, 16, 1.0)
    b = chaos_variance_oracle(sym, 2, 0.75, 1.0, 16, 1.0)
    assert 0 < a < b


def test_lift_mean_vanishes_by_parity():
    sym = StableSymbol.fractional_laplacian(1.9)
    assert lift_mean_oracle(sym, 0.3, 16, 1.0) == pytest.approx(0.0,
                                                                abs=1e-12)


def test_lift_blocks_match_oracle_in_mc():
    # sampled block second moments of V2(t) - V2(s) against the closed form
    sym = StableSymbol.fractional_laplacian(1.9)
    grid = FourierGrid(64, 1)
    T, s, t, n = 1.0, 0.75, 1.0, 8
    n_seeds = 400
    times = uniform_times(T, 8)
    i_s, i_t = 6, 8
    for j in (1, 2):
        vals = np.empty(n_seeds)
        for seed in range(n_seeds):
            xi = sample_white_noise(seed, n, grid)
            lift = lift_white_noise(xi, sym, T, n_times=8)
            diff = lift.v2[0][0].slice(i_t) - lift.v2[0][0].slice(i_s)
            block = lp_block(diff, j)
            vals[seed] = block.values()[0] ** 2  # x-stationary; use x = 0
        se = np.std(vals) / np.sqrt(n_seeds)
        oracle = chaos_variance_oracle(sym, j, s, t, n, T)
        assert abs(np.mean(vals) - oracle) <= 3 * se
