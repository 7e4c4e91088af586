"""Fourier grid and field primitives: exactness and serialization."""

import numpy as np
import pytest

from parastable.fields import (
    FourierGrid,
    PeriodicField,
    TimeField,
    uniform_times,
)


def test_pure_mode_values_match_cosine():
    grid = FourierGrid(32, 1)
    u = PeriodicField.pure_mode(grid, 3, amplitude=2.0, real=True)
    x = np.arange(32) / 32
    assert np.allclose(u.values(), 2.0 * np.cos(2 * np.pi * 3 * x), atol=1e-12)


def test_from_values_roundtrip():
    grid = FourierGrid(64, 1)
    x = np.arange(64) / 64
    vals = np.sin(2 * np.pi * x) + 0.3 * np.cos(2 * np.pi * 5 * x)
    u = PeriodicField.from_values(grid, vals)
    assert np.allclose(u.values(), vals, atol=1e-12)


def test_derivative_is_exact_on_modes():
    grid = FourierGrid(32, 1)
    u = PeriodicField.pure_mode(grid, 4, amplitude=1.0, real=True)
    x = np.arange(32) / 32
    # d/dx cos(2 pi 4 x) = -8 pi sin(2 pi 4 x)
    assert np.allclose(u.derivative(axis=0).values(),
                       -8 * np.pi * np.sin(2 * np.pi * 4 * x), atol=1e-10)


def test_product_is_pointwise_for_bandlimited_fields():
    grid = FourierGrid(64, 1)
    rng = np.random.default_rng(0)
    cu = np.zeros(64, dtype=complex)
    cv = np.zeros(64, dtype=complex)
    for k in range(1, 8):
        a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        cu[k], cu[-k] = a, np.conj(a)
        cv[k], cv[-k] = b, np.conj(b)
    u = PeriodicField(grid, cu, real=True)
    v = PeriodicField(grid, cv, real=True)
    assert np.allclose(u.product(v).values(), u.values() * v.values(),
                       atol=1e-10)


def test_eval_at_matches_grid_values():
    grid = FourierGrid(32, 1)
    rng = np.random.default_rng(1)
    c = np.zeros(32, dtype=complex)
    for k in range(1, 6):
        a = rng.standard_normal() + 1j * rng.standard_normal()
        c[k], c[-k] = a, np.conj(a)
    u = PeriodicField(grid, c, real=True)
    x = np.arange(32) / 32
    assert np.allclose(u.eval_at(x), u.values(), atol=1e-12)


def test_linf_on_pure_mode():
    grid = FourierGrid(32, 1)
    u = PeriodicField.pure_mode(grid, 2, amplitude=1.5, real=True)
    assert u.linf(oversample=4) == pytest.approx(1.5, abs=1e-3)


def test_uniform_times_endpoints_and_count():
    t = uniform_times(2.0, 8)
    assert len(t) == 9
    assert t[0] == 0.0 and t[-1] == 2.0


def test_time_field_at_time_interpolates_linearly():
    grid = FourierGrid(16, 1)
    times = uniform_times(1.0, 4)
    base = PeriodicField.pure_mode(grid, 1, amplitude=1.0, real=True)
    coeffs = np.stack([(1.0 + t) * base.coeffs for t in times])
    u = TimeField(grid, times, coeffs, real=True)
    mid = u.at_time(0.125)  # halfway between t=0 and t=0.25
    assert np.allclose(mid.coeffs, 1.125 * base.coeffs, atol=1e-14)


def test_time_field_dict_roundtrip():
    grid = FourierGrid(16, 1)
    times = uniform_times(1.0, 3)
    u = TimeField.constant_in_time(
        PeriodicField.pure_mode(grid, 2, amplitude=0.7, real=True), times)
    v = TimeField.from_dict(u.to_dict())
    assert np.allclose(u.coeffs, v.coeffs)
    assert np.allclose(u.times, v.times)
    assert v.real == u.real
