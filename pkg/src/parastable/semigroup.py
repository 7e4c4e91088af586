"""Stable symbol, generator, semigroup and backward integral operator.

All operators act as Fourier multipliers on `PeriodicField`/`TimeField`
coefficients.  The backward integral J^T v(t) = int_t^T P_(r-t) v(r) dr is
evaluated mode by mode in closed form, treating each coefficient as
piecewise linear in time, which keeps the stiff high-frequency factors
exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fields import FourierGrid, PeriodicField, TimeField
from .spectral import make_dyadic_partition, para_less, time_paraproduct

__all__ = [
    "StableSymbol",
    "psi",
    "psi_on_grid",
    "apply_generator",
    "semigroup_apply",
    "jt_field",
    "jt_apply",
    "commutator_jt",
    "commutator_semigroup",
]


@dataclass(frozen=True)
class StableSymbol:
    """Finite symmetric atomic angular measure plus the stability index.

    ``atoms`` is a tuple of (unit direction tuple, weight) pairs, closed
    under direction reflection with equal weights.
    """

    alpha: float
    atoms: tuple[tuple[tuple[float, ...], float], ...]

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha must be in (0, 2], got {self.alpha}")
        if not self.atoms:
            raise ValueError("need at least one atom")
        d = len(self.atoms[0][0])
        dirs = []
        for xi, w in self.atoms:
            if len(xi) != d:
                raise ValueError("atoms have inconsistent dimensions")
            if w <= 0:
                raise ValueError(f"atom weight must be positive, got {w}")
            nrm = float(np.linalg.norm(xi))
            if abs(nrm - 1.0) > 1e-12:
                raise ValueError(f"atom direction {xi} is not a unit vector")
            dirs.append(np.asarray(xi))
        # symmetry: every atom has its mirror with the same weight
        for xi, w in self.atoms:
            mirror = [wj for xj, wj in self.atoms
                      if np.allclose(np.asarray(xj), -np.asarray(xi), atol=1e-12)]
            if not mirror or abs(sum(mirror) - sum(
                    wj for xj, wj in self.atoms
                    if np.allclose(np.asarray(xj), np.asarray(xi), atol=1e-12))) > 1e-12:
                raise ValueError("atoms are not symmetric under reflection")
        if np.linalg.matrix_rank(np.stack(dirs)) != d:
            raise ValueError("atom directions do not span the full space")

    @property
    def dimension(self) -> int:
        return len(self.atoms[0][0])

    @property
    def total_weight(self) -> float:
        return sum(w for _, w in self.atoms)

    @classmethod
    def symmetric_1d(cls, alpha: float, weight: float = 0.5) -> "StableSymbol":
        """d=1 with atoms {(+1, w), (-1, w)}; psi(k) = 2w |k|^alpha."""
        return cls(alpha, (((1.0,), weight), ((-1.0,), weight)))

    @classmethod
    def fractional_laplacian(cls, alpha: float, d: int = 1,
                             n_angles: int = 16) -> "StableSymbol":
        """Normalization with psi(k) = |2 pi k|^alpha.

        For d=2 the continuous angular measure is approximated by
        ``n_angles`` equi-angular atom pairs (midpoint quadrature); the
        weights are scaled so that psi is exact on the first axis.
        """
        if d == 1:
            w = (2.0 * np.pi) ** alpha / 2.0
            return cls.symmetric_1d(alpha, w)
        if d != 2:
            raise ValueError("only d in {1, 2} supported")
        angles = (np.arange(n_angles) + 0.5) * np.pi / n_angles
        # calibrate so that psi(e_1) = (2 pi)^alpha
        raw = np.abs(np.cos(angles)) ** alpha
        w = (2.0 * np.pi) ** alpha / (2.0 * raw.sum())
        atoms = []
        for a in angles:
            xi = (float(np.cos(a)), float(np.sin(a)))
            atoms.append((xi, w))
            atoms.append(((-xi[0], -xi[1]), w))
        return cls(alpha, tuple(atoms))

    def to_dict(self) -> dict:
        return {"alpha": self.alpha,
                "atoms": [{"dir": list(xi), "weight": w} for xi, w in self.atoms]}

    @classmethod
    def from_dict(cls, data: dict) -> "StableSymbol":
        atoms = tuple((tuple(float(x) for x in a["dir"]), float(a["weight"]))
                      for a in data["atoms"])
        return cls(float(data["alpha"]), atoms)

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)


def psi(sym: StableSymbol, k) -> np.ndarray:
    """The symbol psi(k) = sum_i w_i |<k, xi_i>|^alpha.

    ``k`` has shape (..., d); returns shape (...).  Even, nonnegative and
    |lambda|^alpha-homogeneous by construction.
    """
    k = np.asarray(k, dtype=float)
    scalar = k.ndim == 1 and k.shape[0] == sym.dimension
    kk = k if not scalar else k[None, :]
    out = np.zeros(kk.shape[:-1])
    for xi, w in sym.atoms:
        out += w * np.abs(kk @ np.asarray(xi)) ** sym.alpha
    return float(out[0]) if scalar else out


@lru_cache(maxsize=64)
def psi_on_grid(sym: StableSymbol, grid: FourierGrid) -> np.ndarray:
    """Precomputed psi at every resolvable frequency of the grid."""
    if sym.dimension != grid.dimension:
        raise ValueError("symbol/grid dimension mismatch")
    ks = np.stack(
        [np.broadcast_to(grid.frequencies(ax), grid.shape) for ax in range(grid.dimension)],
        axis=-1,
    )
    out = psi(sym, ks)
    out.flags.writeable = False
    return out


def apply_generator(sym: StableSymbol, u: PeriodicField) -> PeriodicField:
    """Multiply coefficients by psi(k) (the operator L^alpha_nu)."""
    return PeriodicField(u.grid, psi_on_grid(sym, u.grid) * u.coeffs, real=u.real)


def semigroup_apply(sym: StableSymbol, t: float, u: PeriodicField) -> PeriodicField:
    """P_t u: multiply coefficients by exp(-t psi(k))."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    mult = np.exp(-t * psi_on_grid(sym, u.grid))
    return PeriodicField(u.grid, mult * u.coeffs, real=u.real)


def semigroup_apply_time(sym: StableSymbol, t: float, u: TimeField) -> TimeField:
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    mult = np.exp(-t * psi_on_grid(sym, u.grid))
    return TimeField(u.grid, u.times, mult * u.coeffs, real=u.real, theta=u.theta)


def _phi1(z: np.ndarray) -> np.ndarray:
    """(e^z - 1)/z, stable near z = 0."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-6
    zs = np.where(small, 1.0, z)
    out = np.expm1(zs) / zs
    return np.where(small, 1.0 + z / 2.0 + z * z / 6.0, out)


def _phi2(z: np.ndarray) -> np.ndarray:
    """(e^z - 1 - z)/z^2, stable near z = 0."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    out = (np.expm1(zs) - zs) / (zs * zs)
    return np.where(small, 0.5 + z / 6.0 + z * z / 24.0, out)


def _segment_integral(psi_k: np.ndarray, h: float, c0: np.ndarray,
                      c1: np.ndarray) -> np.ndarray:
    """int_0^h e^(-s psi) * chat(s) ds for chat linear from c0 to c1."""
    z = -h * psi_k
    return h * _phi1(z) * c0 + h * _phi2(z) * (c1 - c0)


def jt_field(sym: StableSymbol, v: TimeField) -> TimeField:
    """J^T v on the full time grid of v, via the backward recursion

        J(t_i) = int_(t_i)^(t_(i+1)) e^(-(r - t_i) psi) vhat(r) dr
                 + e^(-h psi) J(t_(i+1)),    J(T) = 0.
    """
    psi_k = psi_on_grid(sym, v.grid)
    m = v.n_times
    out = np.zeros_like(v.coeffs)
    for i in range(m - 2, -1, -1):
        h = float(v.times[i + 1] - v.times[i])
        seg = _segment_integral(psi_k, h, v.coeffs[i], v.coeffs[i + 1])
        out[i] = seg + np.exp(-h * psi_k) * out[i + 1]
    return TimeField(v.grid, v.times, out, real=v.real)


def jt_apply(sym: StableSymbol, v: TimeField, t: float) -> PeriodicField:
    """J^T v(t) for any t inside the grid span."""
    t = float(t)
    if t < v.times[0] - 1e-12 or t > v.times[-1] + 1e-12:
        raise ValueError(f"time {t} outside grid span [{v.times[0]}, {v.times[-1]}]")
    full = jt_field(sym, v)
    i = int(np.searchsorted(v.times, t + 1e-14)) - 1
    i = max(0, min(i, v.n_times - 2))
    if abs(t - v.times[i]) < 1e-13:
        return full.slice(i)
    if abs(t - v.times[i + 1]) < 1e-13:
        return full.slice(i + 1)
    # partial segment [t, t_{i+1}] plus propagated tail
    psi_k = psi_on_grid(sym, v.grid)
    t1 = float(v.times[i + 1])
    h = t1 - t
    c_t = v.at_time(t).coeffs
    seg = _segment_integral(psi_k, h, c_t, v.coeffs[i + 1])
    coeffs = seg + np.exp(-h * psi_k) * full.coeffs[i + 1]
    return PeriodicField(v.grid, coeffs, real=v.real)


def commutator_jt(sym: StableSymbol, g: TimeField, h: TimeField) -> TimeField:
    """J^T(g paraless h) - g paraless J^T(h), evaluated on the shared time grid."""
    if g.grid != h.grid:
        raise ValueError("grid mismatch")
    if g.times.shape != h.times.shape or not np.allclose(g.times, h.times):
        raise ValueError("time grid mismatch")
    inner = time_paraproduct(g, h, "less")
    first = jt_field(sym, inner)
    jh = jt_field(sym, h)
    second = time_paraproduct(g, jh, "less")
    return first - second


def commutator_semigroup(sym: StableSymbol, t: float, u: PeriodicField,
                         v: PeriodicField) -> PeriodicField:
    """P_t(u paraless v) - u paraless P_t(v)."""
    if u.grid != v.grid:
        raise ValueError("grid mismatch")
    make_dyadic_partition(u.grid)  # validate grid size early
    first = semigroup_apply(sym, t, para_less(u, v))
    second = para_less(u, semigroup_apply(sym, t, v))
    return first - second
