"""Littlewood-Paley blocks, Besov norms and Bony paraproducts on the torus.

The dyadic weights use a raised-cosine ramp: the cutoff profile equals 1 up
to 3/4 of the block boundary and falls to 0 at the boundary along
cos^2(pi/2 * s).  Block j (j >= 0) is supported in the open annulus
(3/4 * 2^j, 2^(j+1)); the low block covers |k| < 2.  With J_max =
log2(N) - 1 the weights sum to 1 on every resolvable frequency.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fields import FourierGrid, PeriodicField, TimeField, pad_spectrum, spectral_product

__all__ = [
    "DyadicPartition",
    "dyadic_weight",
    "make_dyadic_partition",
    "lp_block",
    "besov_norm",
    "besov_norm_time",
    "paraproducts",
    "time_holder_seminorm",
    "synthesize_field",
    "lacunary_field",
    "synthesize_time_field",
]


def _ramp(r: np.ndarray) -> np.ndarray:
    """Raised-cosine cutoff: 1 for r <= 3/4, 0 for r >= 1."""
    r = np.asarray(r, dtype=float)
    s = np.clip((r - 0.75) * 4.0, 0.0, 1.0)
    out = np.cos(0.5 * np.pi * s) ** 2
    out[r <= 0.75] = 1.0
    out[r >= 1.0] = 0.0
    return out


def dyadic_weight(j: int, k) -> np.ndarray:
    """Dyadic weight p_j at arbitrary frequencies, grid-free.

    Matches `make_dyadic_partition` exactly on any grid whose J_max >= j;
    in particular the telescoped j = 0 block is identically zero (the low
    block reaches to |k| < 2, and no lattice frequency falls in the
    residual annulus (3/2, 2) for d <= 2).
    """
    r = np.abs(np.asarray(k, dtype=float))
    if j < -1:
        raise ValueError(f"block index must be >= -1, got {j}")
    if j == -1:
        return _ramp(r / 2.0)
    if j == 0:
        return np.zeros(r.shape)
    return _ramp(r / 2.0 ** (j + 1)) - _ramp(r / 2.0 ** j)


@dataclass(frozen=True)
class DyadicPartition:
    """Per-frequency dyadic weights p_j for j = -1 ... J_max."""

    grid: FourierGrid
    weights: np.ndarray  # shape (J_max + 2,) + grid.shape, index 0 <-> j = -1

    @property
    def j_max(self) -> int:
        return self.weights.shape[0] - 2

    def weight(self, j: int) -> np.ndarray:
        if not -1 <= j <= self.j_max:
            raise ValueError(f"block index {j} out of range [-1, {self.j_max}]")
        return self.weights[j + 1]

    def block_indices(self) -> range:
        return range(-1, self.j_max + 1)

    def to_dict(self) -> dict:
        return {
            "d": self.grid.dimension,
            "N": self.grid.modes_per_axis,
            "j_max": self.j_max,
            "weights": [self.weights[i].ravel().tolist() for i in range(self.weights.shape[0])],
        }


@lru_cache(maxsize=32)
def make_dyadic_partition(grid: FourierGrid) -> DyadicPartition:
    """Build the dyadic partition of unity on the resolvable frequencies.

    Weights telescope a scaled cutoff, so they sum to 1 up to rounding
    (<= a few ulp) on every resolvable k.
    """
    n = grid.modes_per_axis
    j_max = int(np.log2(n)) - 1
    if j_max < 1:
        raise ValueError(f"grid with N={n} too small to host blocks j = -1, 0, 1")
    r = grid.freq_magnitude()
    weights = np.empty((j_max + 2,) + grid.shape)
    # p_{-1}(r) = ramp(r/2); p_j = ramp(2^{-j-1} r) - ramp(2^{-j} r)
    prev = _ramp(r / 2.0)
    weights[0] = prev
    for j in range(0, j_max + 1):
        cur = _ramp(r / 2.0 ** (j + 1))
        weights[j + 1] = cur - prev
        prev = cur
    return DyadicPartition(grid, weights)


def lp_block(u: PeriodicField, j: int) -> PeriodicField:
    """Littlewood-Paley block: coefficients multiplied by the dyadic weight p_j."""
    part = make_dyadic_partition(u.grid)
    return PeriodicField(u.grid, part.weight(j) * u.coeffs, real=u.real)


def besov_norm(u: PeriodicField, theta: float, oversample: int = 2) -> float:
    """sup_j 2^(j*theta) * max |block values| on an oversampled spatial grid."""
    part = make_dyadic_partition(u.grid)
    big = oversample * u.grid.modes_per_axis
    best = 0.0
    for j in part.block_indices():
        c = part.weight(j) * u.coeffs
        if not np.any(c):
            continue
        v = np.fft.ifftn(pad_spectrum(c, big) if oversample > 1 else c)
        linf = float(np.max(np.abs(v))) * big ** u.grid.dimension
        best = max(best, 2.0 ** (j * theta) * linf)
    return best


def besov_norm_time(u: TimeField, theta: float) -> float:
    """C_T C^theta norm: max over time slices of the spatial Besov norm."""
    return max(besov_norm(u.slice(i), theta) for i in range(u.n_times))


def paraproducts(
    u: PeriodicField, v: PeriodicField
) -> tuple[PeriodicField, PeriodicField, PeriodicField]:
    """Bony decomposition (less, resonant, greater) of the product u*v.

    less = sum_j S_{j-1} u * Delta_j v with S_{j-1} = sum_{i < j-1} Delta_i,
    resonant collects |i - j| <= 1, greater is less with roles swapped.
    Block products are alias-free, so the three parts sum to the exact
    zero-padded product.
    """
    if u.grid != v.grid:
        raise ValueError("grid mismatch")
    grid = u.grid
    part = make_dyadic_partition(grid)
    jmax = part.j_max
    bu = [part.weight(j) * u.coeffs for j in part.block_indices()]
    bv = [part.weight(j) * v.coeffs for j in part.block_indices()]

    less = np.zeros(grid.shape, dtype=complex)
    greater = np.zeros(grid.shape, dtype=complex)
    # cumulative S_{j-1}: blocks i <= j - 2, i.e. list indices < j
    su = np.zeros(grid.shape, dtype=complex)
    sv = np.zeros(grid.shape, dtype=complex)
    for j in range(1, jmax + 1):  # S_{j-1} empty for j <= 0
        su += bu[j - 1]
        sv += bv[j - 1]
        less += spectral_product(su, bv[j + 1])
        greater += spectral_product(bu[j + 1], sv)

    resonant = np.zeros(grid.shape, dtype=complex)
    for i in range(-1, jmax + 1):
        for j in range(max(-1, i - 1), min(jmax, i + 1) + 1):
            resonant += spectral_product(bu[i + 1], bv[j + 1])

    flag = u.real and v.real
    return (
        PeriodicField(grid, less, real=flag),
        PeriodicField(grid, resonant, real=flag),
        PeriodicField(grid, greater, real=flag),
    )


def para_less(u: PeriodicField, v: PeriodicField) -> PeriodicField:
    """The low-high paraproduct alone (first component of `paraproducts`)."""
    return paraproducts(u, v)[0]


def para_resonant(u: PeriodicField, v: PeriodicField) -> PeriodicField:
    return paraproducts(u, v)[1]


def time_paraproduct(u: TimeField, v: TimeField, which: str = "less") -> TimeField:
    """Slice-wise paraproduct of two time fields ('less', 'resonant' or 'greater')."""
    if u.grid != v.grid or u.times.shape != v.times.shape:
        raise ValueError("grid or time grid mismatch")
    idx = {"less": 0, "resonant": 1, "greater": 2}[which]
    out = np.stack(
        [paraproducts(u.slice(i), v.slice(i))[idx].coeffs for i in range(u.n_times)]
    )
    return TimeField(u.grid, u.times, out, real=u.real and v.real)


def time_holder_seminorm(u: TimeField, rho: float, oversample: int = 2) -> float:
    """Discrete C^rho_T L^inf norm: Holder quotient sup over grid pairs plus sup_t L^inf."""
    if u.n_times < 2:
        raise ValueError("need at least 2 time points")
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must be in (0,1), got {rho}")
    big = oversample * u.grid.modes_per_axis
    vals = np.stack(
        [
            (np.fft.ifftn(pad_spectrum(u.coeffs[i], big)) * big ** u.grid.dimension).real
            if u.real
            else np.fft.ifftn(pad_spectrum(u.coeffs[i], big)) * big ** u.grid.dimension
            for i in range(u.n_times)
        ]
    )
    sup = float(np.max(np.abs(vals)))
    holder = 0.0
    for i in range(u.n_times):
        for j in range(i + 1, u.n_times):
            gap = u.times[j] - u.times[i]
            diff = float(np.max(np.abs(vals[j] - vals[i])))
            holder = max(holder, diff / gap ** rho)
    return holder + sup


def holder_part(u: TimeField, rho: float, oversample: int = 2) -> float:
    """Only the Holder quotient of `time_holder_seminorm` (no sup_t term)."""
    return time_holder_seminorm(u, rho, oversample) - max(
        u.slice(i).linf(oversample) for i in range(u.n_times)
    )


def synthesize_field(grid: FourierGrid, theta: float, rng: np.random.Generator,
                     kmax: int | None = None) -> PeriodicField:
    """Random real field with coefficients eta_k |k|^(-theta - d/2).

    Samples have Besov norm at regularity theta of order one; used by the
    probe harnesses and tests.
    """
    d = grid.dimension
    c = np.zeros(grid.shape, dtype=complex)
    kabs = grid.freq_magnitude()
    mask = kabs > 0
    if kmax is not None:
        mask &= kabs <= kmax
    eta = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    c[mask] = eta[mask] * kabs[mask] ** (-theta - d / 2.0)
    # enforce Hermitian symmetry: average with the reflected conjugate
    flipped = c
    for ax in range(d):
        flipped = np.take(flipped, (-np.arange(grid.modes_per_axis)) % grid.modes_per_axis,
                          axis=ax)
    c = 0.5 * (c + np.conj(flipped))
    # the unpaired Nyquist modes must be real for a real field
    nyq = grid.modes_per_axis // 2
    for ax in range(d):
        idx = [slice(None)] * d
        idx[ax] = nyq
        c[tuple(idx)] = c[tuple(idx)].real
    return PeriodicField(grid, c, real=True)


def lacunary_field(grid: FourierGrid, theta: float,
                   rng: np.random.Generator) -> PeriodicField:
    """Random-phase lacunary series: one mode k = 2^j per dyadic block.

    Each block norm is exactly 2^(-j theta), so Besov norms of multiplier
    images are free of the sup-over-modes fluctuation of fully random
    fields; used by the power-law slope harnesses.  1-D only.
    """
    if grid.dimension != 1:
        raise ValueError("lacunary synthesis implemented for d=1")
    c = np.zeros(grid.shape, dtype=complex)
    j = 0
    while 2 ** (j + 1) <= grid.modes_per_axis // 2:
        k = 2 ** j
        phase = np.exp(2j * np.pi * rng.uniform())
        amp = 2.0 ** (-j * theta)
        c[k] = 0.5 * amp * phase
        c[-k] = 0.5 * amp * np.conj(phase)
        j += 1
    return PeriodicField(grid, c, real=True)


def synthesize_time_field(grid: FourierGrid, theta: float, times,
                          rng: np.random.Generator, constant_in_time: bool = True,
                          kmax: int | None = None) -> TimeField:
    times = np.asarray(times, dtype=float)
    if constant_in_time:
        f = synthesize_field(grid, theta, rng, kmax=kmax)
        return TimeField.constant_in_time(f, times, theta=theta)
    coeffs = np.stack(
        [synthesize_field(grid, theta, rng, kmax=kmax).coeffs for _ in times]
    )
    return TimeField(grid, times, coeffs, real=True, theta=theta)
