"""Dyadic blocks, Besov norms and Bony paraproducts.

Golden weight values are hand-evaluated from the raised-cosine profile
chi(r) = cos^2(pi/2 * 4(r - 3/4)) on [3/4, 1], chi = 1 below, 0 above;
p_{-1}(k) = chi(|k|/2), p_j = chi(|k|/2^(j+1)) - chi(|k|/2^j).
"""

import numpy as np
import pytest

from parastable.fields import FourierGrid, PeriodicField
from parastable.spectral import (
    besov_norm,
    dyadic_weight,
    lacunary_field,
    lp_block,
    make_dyadic_partition,
    paraproducts,
    synthesize_field,
    time_holder_seminorm,
)
from parastable.fields import TimeField, uniform_times


def _chi(r):
    if r <= 0.75:
        return 1.0
    if r >= 1.0:
        return 0.0
    return np.cos(0.5 * np.pi * (r - 0.75) * 4.0) ** 2


@pytest.mark.parametrize("k,expected", [
    (1.0, 1.0),            # |k|/2 = 0.5 <= 3/4
    (1.6, _chi(0.8)),      # hand value cos^2(0.1 pi) = 0.904508...
    (2.0, 0.0),            # boundary of the low block
])
def test_low_block_weight_hand_values(k, expected):
    assert dyadic_weight(-1, np.array([k]))[0] == pytest.approx(expected,
                                                                abs=1e-12)


def test_low_block_hand_value_is_frozen():
    # cos^2(0.1 pi), evaluated by hand to 12 digits
    assert dyadic_weight(-1, np.array([1.6]))[0] == pytest.approx(
        0.904508497187, abs=1e-10)


def test_block_zero_is_identically_zero():
    k = np.arange(-64, 65, dtype=float)
    assert np.all(dyadic_weight(0, k) == 0.0)


def test_partition_of_unity_is_exact():
    for n in (32, 128):
        grid = FourierGrid(n, 1)
        part = make_dyadic_partition(grid)
        total = np.sum(part.weights, axis=0)
        assert np.allclose(total, 1.0, atol=1e-12)


def test_dyadic_weight_matches_grid_partition():
    grid = FourierGrid(128, 1)
    part = make_dyadic_partition(grid)
    k = grid.frequencies(0)
    for j in part.block_indices():
        assert np.allclose(dyadic_weight(j, k), part.weight(j), atol=1e-14)


def test_block_support_bounds():
    k = np.arange(0, 4096, dtype=float)
    for j in range(1, 10):
        w = dyadic_weight(j, k)
        inside = np.nonzero(w > 1e-15)[0]
        assert inside.min() > 0.75 * 2 ** j
        assert inside.max() < 2.0 ** (j + 1)


def test_blocks_reassemble_field():
    grid = FourierGrid(64, 1)
    u = synthesize_field(grid, 0.5, np.random.default_rng(0))
    part = make_dyadic_partition(grid)
    total = sum(lp_block(u, j).coeffs for j in part.block_indices())
    assert np.allclose(total, u.coeffs, atol=1e-12)


def test_besov_norm_pure_mode_scaling():
    # a single mode k = 2^j sits in one block; norm = 2^(j theta) * amplitude
    grid = FourierGrid(128, 1)
    theta = 0.7
    for j in (2, 4):
        u = PeriodicField.pure_mode(grid, 2 ** j, amplitude=1.0, real=True)
        assert besov_norm(u, theta) == pytest.approx(2.0 ** (j * theta),
                                                     rel=1e-3)


def test_bony_decomposition_is_exact():
    rng = np.random.default_rng(3)
    for n in (64, 128):
        grid = FourierGrid(n, 1)
        u = synthesize_field(grid, 0.6, rng)
        v = synthesize_field(grid, -0.3, rng)
        less, res, greater = paraproducts(u, v)
        total = less.coeffs + res.coeffs + greater.coeffs
        exact = u.product(v).coeffs
        rel = np.max(np.abs(total - exact)) / np.max(np.abs(exact))
        assert rel <= 1e-12


def test_lacunary_field_block_norms():
    grid = FourierGrid(256, 1)
    theta = 0.4
    u = lacunary_field(grid, theta, np.random.default_rng(5))
    for j in (1, 3, 5):
        block = lp_block(u, j)
        assert block.linf(oversample=4) == pytest.approx(2.0 ** (-j * theta),
                                                         rel=1e-2)


def test_time_holder_seminorm_linear_ramp():
    # u(t, x) = t * cos(2 pi x): Holder-rho quotient over a pair at gap g is
    # g^(1-rho), maximized at the largest gap g = 1; plus sup_t |u| = 1
    grid = FourierGrid(16, 1)
    times = uniform_times(1.0, 4)
    base = PeriodicField.pure_mode(grid, 1, amplitude=1.0, real=True)
    u = TimeField(grid, times, np.stack([t * base.coeffs for t in times]),
                  real=True)
    rho = 0.5
    expected = 1.0 + 1.0
    assert time_holder_seminorm(u, rho) == pytest.approx(expected, rel=1e-6)
