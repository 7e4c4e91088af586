"""Backward-equation solvers: classical oracle, Young and rough regimes.

Conventions: u solves d/dt u + L u + grad(u).V = f backward from u(T),
with L the Fourier multiplier -psi(k).  The classical solver is a
second-order exponential integrator used as the oracle; MMS sources are
built from the same identity fhat = d/dt uhat - psi uhat + (V.grad u)^.
"""

import numpy as np
import pytest

from parastable.enhanced_drift import EnhancedDrift, lift_smooth
from parastable.fields import FourierGrid, PeriodicField, TimeField, uniform_times
from parastable.pde import (
    BackwardData,
    classical_solve,
    default_theta,
    solve_rough,
    solve_young,
)
from parastable.semigroup import StableSymbol, jt_field, psi_on_grid, semigroup_apply
from parastable.spectral import synthesize_field

ALPHA = 1.9
SYM = StableSymbol.fractional_laplacian(ALPHA)


def _smooth_drift(grid, times, seed=7, kmax=4, scale=0.5, beta=0.4):
    v0 = synthesize_field(grid, beta, np.random.default_rng(seed), kmax=kmax)
    v0 = PeriodicField(grid, scale * v0.coeffs, real=True)
    return TimeField.constant_in_time(v0, times), beta


def test_free_solution_is_semigroup():
    # V = 0, f = 0: u(t) = P_(T-t) u(T) exactly (the multiplier recursion
    # integrates the free flow in closed form)
    grid = FourierGrid(64, 1)
    T = 1.0
    terminal = PeriodicField.pure_mode(grid, 2, amplitude=1.0, real=True)
    times = uniform_times(T, 32)
    drift = EnhancedDrift(
        (TimeField.constant_in_time(PeriodicField.zero(grid), times),),
        None, 0.4, ALPHA)
    data = BackwardData(terminal, T, theta=default_theta(0.4, ALPHA, False))
    u = solve_young(drift, data, SYM, m=32)
    for i, t in enumerate(times):
        ref = semigroup_apply(SYM, T - t, terminal)
        assert np.allclose(u.coeffs[i], ref.coeffs, atol=1e-12)


def test_classical_solver_manufactured_solution():
    # target u(t, x) = (1 + t) cos(2 pi x); f is manufactured from the
    # defining identity, so recovery checks signs and quadrature order
    grid = FourierGrid(64, 1)
    T = 0.5
    times_fine = uniform_times(T, 512)
    vfield, beta = _smooth_drift(grid, times_fine)
    drift = EnhancedDrift((vfield,), None, beta, ALPHA)
    mode = PeriodicField.pure_mode(grid, 1, amplitude=1.0, real=True)
    psi_k = psi_on_grid(SYM, grid)

    def u_exact(t):
        return PeriodicField(grid, (1.0 + t) * mode.coeffs, real=True)

    f_coeffs = []
    for t in times_fine:
        ut = u_exact(t)
        dudt = mode.coeffs
        transport = ut.derivative(axis=0).product(vfield.at_time(t)).coeffs
        f_coeffs.append(dudt - psi_k * ut.coeffs + transport)
    f = TimeField(grid, times_fine, np.stack(f_coeffs), real=True)
    data = BackwardData(u_exact(T), T, theta=default_theta(beta, ALPHA, False),
                        f=f)
    u = classical_solve(drift, data, SYM, m=512)
    err = max((u.at_time(t) - u_exact(t)).linf() for t in (0.0, T / 2, T))
    assert err <= 1e-4


def test_young_matches_classical_on_smooth_drift():
    grid = FourierGrid(64, 1)
    T = 0.5
    m = 256
    times = uniform_times(T, m)
    vfield, beta = _smooth_drift(grid, times)
    drift = EnhancedDrift((vfield,), None, beta, ALPHA)
    terminal = PeriodicField.pure_mode(grid, 1, amplitude=1.0, real=True)
    data = BackwardData(terminal, T, theta=default_theta(beta, ALPHA, False))
    u = solve_young(drift, data, SYM, m=m)
    ref = classical_solve(drift, data, SYM, m=m)
    scale = ref.at_time(0.0).linf()
    err = max((u.at_time(t) - ref.at_time(t)).linf() for t in (0.0, T / 2))
    assert err / scale <= 1e-3


def test_young_window_gate():
    grid = FourierGrid(32, 1)
    times = uniform_times(1.0, 8)
    vfield, beta = _smooth_drift(grid, times)
    drift = EnhancedDrift((vfield,), None, beta, ALPHA)
    terminal = PeriodicField.pure_mode(grid, 1, amplitude=1.0, real=True)
    with pytest.raises(ValueError):
        solve_young(drift, BackwardData(terminal, 1.0, theta=0.1), SYM, m=8)


def test_young_solution_is_affine_in_terminal():
    # the fixed point is affine: u(c * terminal) = c * u(terminal) when
    # f = 0 and the drift is fixed
    grid = FourierGrid(32, 1)
    T = 0.5
    m = 32
    times = uniform_times(T, m)
    vfield, beta = _smooth_drift(grid, times)
    drift = EnhancedDrift((vfield,), None, beta, ALPHA)
    terminal = PeriodicField.pure_mode(grid, 1, amplitude=1.0, real=True)
    theta = default_theta(beta, ALPHA, False)
    u1 = solve_young(drift, BackwardData(terminal, T, theta=theta), SYM, m=m)
    u2 = solve_young(
        drift,
        BackwardData(PeriodicField(grid, 2.0 * terminal.coeffs, real=True),
                     T, theta=theta), SYM, m=m)
    assert np.allclose(u2.coeffs, 2.0 * u1.coeffs, atol=1e-9)


def _rough_setup(m=96, n_modes=64, T=0.5, scale=0.25):
    grid = FourierGrid(n_modes, 1)
    times = uniform_times(T, m)
    vfield, _ = _smooth_drift(grid, times, scale=scale)
    drift = lift_smooth(vfield, SYM)
    theta = default_theta(drift.beta, ALPHA, rough=True)
    terminal = PeriodicField.pure_mode(grid, 1, amplitude=1.0, real=True)
    data = BackwardData(terminal, T, theta=theta)
    return grid, drift, data


def test_rough_agrees_with_young_and_classical():
    m = 192
    grid, drift, data = _rough_setup(m=m)
    sol = solve_rough(drift, data, SYM, m=m)
    ydrift = EnhancedDrift(drift.v1, None, 0.4, ALPHA)
    ydata = BackwardData(data.terminal, data.T,
                         theta=default_theta(0.4, ALPHA, False))
    uy = solve_young(ydrift, ydata, SYM, m=m)
    ref = classical_solve(drift, data, SYM, m=m)
    scale = ref.at_time(0.0).linf()
    for t in (0.0, data.T / 2):
        assert (sol.u.at_time(t) - uy.at_time(t)).linf() / scale <= 1e-3
        assert (sol.u.at_time(t) - ref.at_time(t)).linf() / scale <= 1e-3


def test_rough_reconstruction_identity():
    m = 96
    grid, drift, data = _rough_setup(m=m)
    sol = solve_rough(drift, data, SYM, m=m)
    jv = tuple(jt_field(SYM, c) for c in drift.v1)
    assert sol.reconstruction_residual(jv) <= 1e-8


def test_rough_terminal_condition_is_exact():
    m = 96
    grid, drift, data = _rough_setup(m=m)
    sol = solve_rough(drift, data, SYM, m=m)
    assert np.allclose(sol.u.coeffs[-1], data.terminal.coeffs, atol=1e-12)


def test_rough_window_gate_rejects_bad_theta():
    grid, drift, data = _rough_setup(m=16)
    bad = BackwardData(data.terminal, data.T, theta=0.9)
    with pytest.raises(ValueError):
        solve_rough(drift, bad, SYM, m=16)


def test_rough_solution_map_is_stable_under_drift_perturbation():
    # realized Lipschitz ratios of the solution map stay bounded as the
    # drift perturbation shrinks
    from parastable.pde import lipschitz_probe
    m = 48
    grid, drift, data = _rough_setup(m=m, n_modes=32)

    def solve(d):
        return solve_rough(d, data, SYM, m=m).u

    cases = []
    for eps in (0.2, 0.1, 0.05):
        v1 = tuple(TimeField(grid, c.times, (1.0 + eps) * c.coeffs,
                             real=c.real) for c in drift.v1)
        pert = lift_smooth(v1[0], SYM)
        cases.append((f"eps={eps}", pert, eps * drift.norms["v1_beta"]))
    rows = lipschitz_probe(solve, drift, cases, data.theta, ALPHA)
    ratios = [r["ratio"] for r in rows]
    assert all(np.isfinite(r) and r > 0 for r in ratios)
    assert max(ratios) <= 10.0 * min(ratios)
