"""Fourier-grid representation of periodic distributions on the unit torus.

Fields live on a regular grid of N modes per axis (N a power of two), with
coefficients indexed in numpy FFT order.  The convention throughout is

    u(x) = sum_k  uhat(k) * exp(2*pi*i*<k, x>),

so coefficients are *Fourier coefficients*, not raw FFT output.  Real fields
carry a flag and satisfy uhat(-k) = conj(uhat(k)).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "FourierGrid",
    "PeriodicField",
    "TimeField",
    "pad_spectrum",
    "truncate_spectrum",
    "spectral_product",
]


@dataclass(frozen=True)
class FourierGrid:
    """Regular Fourier grid on the d-dimensional unit torus."""

    modes_per_axis: int
    dimension: int = 1

    def __post_init__(self):
        n, d = self.modes_per_axis, self.dimension
        if d not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {d}")
        if n < 8 or (n & (n - 1)) != 0:
            raise ValueError(f"modes_per_axis must be a power of two >= 8, got {n}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.modes_per_axis,) * self.dimension

    def frequencies(self, axis: int = 0) -> np.ndarray:
        """Integer frequencies along one axis, in FFT order (0..N/2-1, -N/2..-1)."""
        n = self.modes_per_axis
        k = np.fft.fftfreq(n, d=1.0 / n)
        shape = [1] * self.dimension
        shape[axis] = n
        return k.reshape(shape)

    def freq_magnitude(self) -> np.ndarray:
        """|k| on the full grid."""
        k2 = sum(self.frequencies(ax) ** 2 for ax in range(self.dimension))
        return np.sqrt(k2)

    def max_frequency(self) -> int:
        return self.modes_per_axis // 2


def _pad_axis(c: np.ndarray, axis: int, big: int) -> np.ndarray:
    """Embed a length-N spectrum into length `big`, splitting the Nyquist mode.

    Splitting -N/2 evenly across +-N/2 keeps trigonometric interpolation exact
    and preserves real-valuedness of Hermitian inputs.
    """
    n = c.shape[axis]
    shape = list(c.shape)
    shape[axis] = big
    out = np.zeros(shape, dtype=complex)
    idx_lo = [slice(None)] * c.ndim
    idx_lo[axis] = slice(0, n // 2)
    out[tuple(idx_lo)] = np.take(c, range(0, n // 2), axis=axis)
    nyq = np.take(c, [n // 2], axis=axis)  # stores mode -N/2
    idx = [slice(None)] * c.ndim
    idx[axis] = slice(big - n // 2 + 1, big)
    out[tuple(idx)] = np.take(c, range(n // 2 + 1, n), axis=axis)
    # split -N/2 between positions +N/2 and -N/2 of the big grid
    idx_p = [slice(None)] * c.ndim
    idx_p[axis] = slice(n // 2, n // 2 + 1)
    out[tuple(idx_p)] += 0.5 * nyq
    idx_m = [slice(None)] * c.ndim
    idx_m[axis] = slice(big - n // 2, big - n // 2 + 1)
    out[tuple(idx_m)] += 0.5 * nyq
    return out


def _truncate_axis(c: np.ndarray, axis: int, small: int) -> np.ndarray:
    """Project a spectrum onto the canonical set {-small/2, ..., small/2-1}.

    Frequency +small/2 of the big grid is folded into the -small/2 slot
    (they coincide on the small sampling grid), so truncation inverts
    `_pad_axis` exactly.
    """
    shape = list(c.shape)
    big = shape[axis]
    shape[axis] = small
    out = np.zeros(shape, dtype=complex)
    idx_dst = [slice(None)] * c.ndim
    idx_dst[axis] = slice(0, small // 2)
    out[tuple(idx_dst)] = np.take(c, range(0, small // 2), axis=axis)
    idx_dst[axis] = slice(small // 2, small)
    out[tuple(idx_dst)] = np.take(c, range(big - small // 2, big), axis=axis)
    if big > small:
        idx_nyq = [slice(None)] * c.ndim
        idx_nyq[axis] = slice(small // 2, small // 2 + 1)
        out[tuple(idx_nyq)] += np.take(c, [small // 2], axis=axis)
    return out


def pad_spectrum(coeffs: np.ndarray, big: int) -> np.ndarray:
    out = coeffs
    for ax in range(coeffs.ndim):
        out = _pad_axis(out, ax, big)
    return out


def truncate_spectrum(coeffs: np.ndarray, small: int) -> np.ndarray:
    out = coeffs
    for ax in range(coeffs.ndim):
        out = _truncate_axis(out, ax, small)
    return out


def spectral_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Alias-free pointwise product of two spectra, projected back to the grid.

    Both inputs are zero-padded to the doubled grid, multiplied in physical
    space and projected onto the original canonical frequency set.
    """
    n = a.shape[0]
    big = 2 * n
    fa = np.fft.ifftn(pad_spectrum(a, big)) * big ** a.ndim
    fb = np.fft.ifftn(pad_spectrum(b, big)) * big ** b.ndim
    prod = np.fft.fftn(fa * fb) / big ** a.ndim
    return truncate_spectrum(prod, n)


@dataclass
class PeriodicField:
    """Scalar periodic distribution stored as Fourier coefficients.

    Vector- and matrix-valued quantities are kept as tuples of scalar fields
    by the callers; this keeps all spectral kernels scalar.
    """

    grid: FourierGrid
    coeffs: np.ndarray
    real: bool = True

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != self.grid.shape:
            raise ValueError(
                f"coefficient shape {self.coeffs.shape} does not match grid {self.grid.shape}"
            )

    @classmethod
    def zero(cls, grid: FourierGrid) -> "PeriodicField":
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    @classmethod
    def constant(cls, grid: FourierGrid, value: float) -> "PeriodicField":
        c = np.zeros(grid.shape, dtype=complex)
        c[(0,) * grid.dimension] = value
        return cls(grid, c)

    @classmethod
    def pure_mode(cls, grid: FourierGrid, k, amplitude: complex = 1.0,
                  real: bool = False) -> "PeriodicField":
        """amplitude * exp(2*pi*i*<k,x>); with real=True the Hermitian pair is added."""
        c = np.zeros(grid.shape, dtype=complex)
        kk = np.atleast_1d(np.asarray(k, dtype=int))
        idx = tuple(int(ki) % grid.modes_per_axis for ki in kk)
        if real:
            c[idx] += 0.5 * amplitude
            idx_m = tuple(int(-ki) % grid.modes_per_axis for ki in kk)
            c[idx_m] += 0.5 * np.conj(amplitude)
        else:
            c[idx] = amplitude
        return cls(grid, c, real=real)

    @classmethod
    def from_values(cls, grid: FourierGrid, values: np.ndarray,
                    real: bool = True) -> "PeriodicField":
        coeffs = np.fft.fftn(np.asarray(values)) / values.size
        return cls(grid, coeffs, real=real)

    def values(self, oversample: int = 1) -> np.ndarray:
        """Physical-space samples on an (oversample*N)^d grid."""
        big = oversample * self.grid.modes_per_axis
        c = pad_spectrum(self.coeffs, big) if oversample > 1 else self.coeffs
        v = np.fft.ifftn(c) * big ** self.grid.dimension
        return v.real if self.real else v

    def eval_at(self, x: np.ndarray) -> np.ndarray:
        """Exact Fourier-series evaluation at arbitrary points (1-D grids only)."""
        if self.grid.dimension != 1:
            raise NotImplementedError("point evaluation implemented for d=1")
        k = self.grid.frequencies(0).ravel()
        phases = np.exp(2j * np.pi * np.outer(np.asarray(x, dtype=float), k))
        v = phases @ self.coeffs
        return v.real if self.real else v

    def linf(self, oversample: int = 2) -> float:
        return float(np.max(np.abs(self.values(oversample=oversample))))

    def derivative(self, axis: int = 0) -> "PeriodicField":
        k = self.grid.frequencies(axis)
        return PeriodicField(self.grid, 2j * np.pi * k * self.coeffs, real=self.real)

    def __add__(self, other: "PeriodicField") -> "PeriodicField":
        self._check(other)
        return PeriodicField(self.grid, self.coeffs + other.coeffs,
                             real=self.real and other.real)

    def __sub__(self, other: "PeriodicField") -> "PeriodicField":
        self._check(other)
        return PeriodicField(self.grid, self.coeffs - other.coeffs,
                             real=self.real and other.real)

    def __mul__(self, scalar) -> "PeriodicField":
        return PeriodicField(self.grid, self.coeffs * scalar, real=self.real)

    __rmul__ = __mul__

    def __neg__(self) -> "PeriodicField":
        return PeriodicField(self.grid, -self.coeffs, real=self.real)

    def product(self, other: "PeriodicField") -> "PeriodicField":
        """Alias-free pointwise product (projected back onto the grid)."""
        self._check(other)
        return PeriodicField(self.grid, spectral_product(self.coeffs, other.coeffs),
                             real=self.real and other.real)

    def hermitian_defect(self) -> float:
        flipped = self.coeffs
        for ax in range(self.coeffs.ndim):
            flipped = np.take(flipped, (-np.arange(flipped.shape[ax])) % flipped.shape[ax],
                              axis=ax)
        return float(np.max(np.abs(self.coeffs - np.conj(flipped))))

    def _check(self, other: "PeriodicField"):
        if self.grid != other.grid:
            raise ValueError("grid mismatch")

    def to_dict(self) -> dict:
        c = self.coeffs.ravel()
        inter = np.empty(2 * c.size)
        inter[0::2], inter[1::2] = c.real, c.imag
        return {
            "d": self.grid.dimension,
            "N": self.grid.modes_per_axis,
            "real_flag": bool(self.real),
            "coeffs": inter.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PeriodicField":
        grid = FourierGrid(int(data["N"]), int(data["d"]))
        inter = np.asarray(data["coeffs"], dtype=float)
        c = (inter[0::2] + 1j * inter[1::2]).reshape(grid.shape)
        return cls(grid, c, real=bool(data["real_flag"]))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path) -> "PeriodicField":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class TimeField:
    """A time grid of periodic fields, representing an element of C_T C^theta.

    ``coeffs`` has shape (len(times),) + grid.shape.  ``theta`` is declared
    spatial regularity, carried as metadata only.
    """

    grid: FourierGrid
    times: np.ndarray
    coeffs: np.ndarray
    real: bool = True
    theta: float | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.times.ndim != 1 or self.times.size < 1:
            raise ValueError("times must be a 1-D array")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.coeffs.shape != (self.times.size,) + self.grid.shape:
            raise ValueError("coefficient block does not match (times, grid)")

    @property
    def n_times(self) -> int:
        return int(self.times.size)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def dt(self) -> float:
        steps = np.diff(self.times)
        if steps.size and not np.allclose(steps, steps[0], rtol=1e-12, atol=1e-14):
            raise ValueError("time grid is not uniform")
        return float(steps[0]) if steps.size else 0.0

    @classmethod
    def zero(cls, grid: FourierGrid, times, theta=None) -> "TimeField":
        times = np.asarray(times, dtype=float)
        return cls(grid, times, np.zeros((times.size,) + grid.shape, dtype=complex),
                   theta=theta)

    @classmethod
    def constant_in_time(cls, f: PeriodicField, times, theta=None) -> "TimeField":
        times = np.asarray(times, dtype=float)
        c = np.broadcast_to(f.coeffs, (times.size,) + f.grid.shape).copy()
        return cls(f.grid, times, c, real=f.real, theta=theta)

    def slice(self, i: int) -> PeriodicField:
        return PeriodicField(self.grid, self.coeffs[i], real=self.real)

    def at_time(self, t: float) -> PeriodicField:
        """Field at time t, linearly interpolated in each mode between grid times."""
        t = float(t)
        if t < self.times[0] - 1e-12 or t > self.times[-1] + 1e-12:
            raise ValueError(f"time {t} outside grid span")
        i = int(np.searchsorted(self.times, t) - 1)
        i = max(0, min(i, self.n_times - 2))
        t0, t1 = self.times[i], self.times[i + 1]
        w = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
        return PeriodicField(self.grid, (1 - w) * self.coeffs[i] + w * self.coeffs[i + 1],
                             real=self.real)

    def index_of(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-10:
            raise ValueError(f"time {t} is not a grid time")
        return i

    def restrict(self, i_lo: int, i_hi: int) -> "TimeField":
        return TimeField(self.grid, self.times[i_lo:i_hi + 1],
                         self.coeffs[i_lo:i_hi + 1].copy(), real=self.real,
                         theta=self.theta)

    def map_coeffs(self, fn) -> "TimeField":
        out = np.stack([fn(self.coeffs[i], self.times[i]) for i in range(self.n_times)])
        return TimeField(self.grid, self.times, out, real=self.real, theta=self.theta)

    def derivative(self, axis: int = 0) -> "TimeField":
        k = self.grid.frequencies(axis)
        return TimeField(self.grid, self.times, 2j * np.pi * k * self.coeffs,
                         real=self.real, theta=self.theta)

    def __add__(self, other: "TimeField") -> "TimeField":
        self._check(other)
        return TimeField(self.grid, self.times, self.coeffs + other.coeffs,
                         real=self.real and other.real, theta=self.theta)

    def __sub__(self, other: "TimeField") -> "TimeField":
        self._check(other)
        return TimeField(self.grid, self.times, self.coeffs - other.coeffs,
                         real=self.real and other.real, theta=self.theta)

    def __mul__(self, scalar) -> "TimeField":
        return TimeField(self.grid, self.times, self.coeffs * scalar, real=self.real,
                         theta=self.theta)

    __rmul__ = __mul__

    def with_theta(self, theta: float) -> "TimeField":
        return replace(self, theta=theta)

    def _check(self, other: "TimeField"):
        if self.grid != other.grid:
            raise ValueError("grid mismatch")
        if self.times.shape != other.times.shape or not np.allclose(self.times, other.times):
            raise ValueError("time grid mismatch")

    def to_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "theta": self.theta,
            "fields": [self.slice(i).to_dict() for i in range(self.n_times)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TimeField":
        fields = [PeriodicField.from_dict(f) for f in data["fields"]]
        grid = fields[0].grid
        coeffs = np.stack([f.coeffs for f in fields])
        return cls(grid, np.asarray(data["times"]), coeffs, real=fields[0].real,
                   theta=data.get("theta"))


def uniform_times(T: float, m: int) -> np.ndarray:
    """m+1 uniform grid points on [0, T]."""
    return np.linspace(0.0, float(T), m + 1)
