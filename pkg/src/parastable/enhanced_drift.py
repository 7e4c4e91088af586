"""Enhanced drifts: smooth lifts, periodic white noise and its rough lift.

An enhanced drift pairs a distributional vector field V1 with the
resonant-product data V2 = J^T(grad V1) (.) V1 that the rough solver needs
when V1 is too irregular for the Young regime.  For the white-noise drift
on the 1-d torus the second component lives in the second Wiener chaos and
its block variances admit a closed double Fourier sum, implemented here as
an oracle for the sampled lift.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import FourierGrid, PeriodicField, TimeField, uniform_times
from .semigroup import StableSymbol, jt_field, psi
from .spectral import (
    besov_norm_time,
    dyadic_weight,
    paraproducts,
    time_paraproduct,
)

__all__ = [
    "EnhancedDrift",
    "WhiteNoiseSample",
    "lift_smooth",
    "sample_white_noise",
    "lift_white_noise",
    "chaos_variance_oracle",
    "lift_mean_oracle",
]

DEFAULT_EPS = 0.05


@dataclass
class EnhancedDrift:
    """Drift V1 with (optionally) its resonant second-order data V2.

    ``v1`` is a tuple of d scalar time fields (the vector components);
    ``v2`` is a d x d nested tuple of time fields or None in the Young
    regime.  ``beta`` is the declared spatial regularity of V1; ``alpha``
    the stability index the regularity bookkeeping is relative to.
    """

    v1: tuple[TimeField, ...]
    v2: tuple[tuple[TimeField, ...], ...] | None
    beta: float
    alpha: float
    norms: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.v1:
            raise ValueError("V1 must have at least one component")
        d = self.v1[0].grid.dimension
        if len(self.v1) != d:
            raise ValueError(f"V1 must have {d} components, got {len(self.v1)}")
        if self.beta <= (2.0 - 2.0 * self.alpha) / 3.0:
            raise ValueError(
                f"beta={self.beta} at or below the admissible floor "
                f"{(2.0 - 2.0 * self.alpha) / 3.0} for alpha={self.alpha}")
        if self.beta <= (1.0 - self.alpha) / 2.0 and self.v2 is None:
            raise ValueError(
                "V2 is required in the rough regime beta <= (1 - alpha)/2")
        if self.v2 is not None:
            if len(self.v2) != d or any(len(row) != d for row in self.v2):
                raise ValueError("V2 must be a d x d array of time fields")
        if not self.norms:
            self.norms = self._compute_norms()

    @property
    def grid(self) -> FourierGrid:
        return self.v1[0].grid

    @property
    def times(self) -> np.ndarray:
        return self.v1[0].times

    @property
    def is_rough(self) -> bool:
        return self.v2 is not None

    def _compute_norms(self) -> dict:
        out = {"v1_beta": max(besov_norm_time(c, self.beta) for c in self.v1)}
        if self.v2 is not None:
            theta2 = 2.0 * self.beta + self.alpha - 1.0
            out["v2_norm"] = max(
                besov_norm_time(f, theta2) for row in self.v2 for f in row)
            out["v2_order"] = theta2
        return out

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "alpha": self.alpha,
            "v1": [c.to_dict() for c in self.v1],
            "v2": None if self.v2 is None
            else [[f.to_dict() for f in row] for row in self.v2],
            "norms": dict(self.norms),
            "meta": dict(self.meta),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EnhancedDrift":
        v1 = tuple(TimeField.from_dict(d) for d in data["v1"])
        v2 = None
        if data["v2"] is not None:
            v2 = tuple(tuple(TimeField.from_dict(d) for d in row)
                       for row in data["v2"])
        return cls(v1, v2, float(data["beta"]), float(data["alpha"]),
                   norms=dict(data.get("norms", {})),
                   meta=dict(data.get("meta", {})))


def lift_smooth(eta: tuple[TimeField, ...] | TimeField, sym: StableSymbol,
                beta: float | None = None) -> EnhancedDrift:
    """Canonical lift of a band-limited drift: V2^(i,j) = J^T(d_j eta^i) (.) eta^j.

    Quadratic in eta; deterministic.  ``beta`` defaults to the rough-regime
    tag -1/2 - eps so the lift exercises the same code path as the
    white-noise drift.
    """
    if isinstance(eta, TimeField):
        eta = (eta,)
    d = eta[0].grid.dimension
    if len(eta) != d:
        raise ValueError(f"need {d} components, got {len(eta)}")
    for c in eta[1:]:
        if c.grid != eta[0].grid or not np.allclose(c.times, eta[0].times):
            raise ValueError("components disagree on grid or time grid")
    v2 = tuple(
        tuple(
            time_paraproduct(jt_field(sym, eta[i].derivative(axis=j)), eta[j],
                             "resonant")
            for j in range(d))
        for i in range(d))
    if beta is None:
        beta = -0.5 - DEFAULT_EPS
    return EnhancedDrift(tuple(eta), v2, beta, sym.alpha,
                         meta={"kind": "smooth_lift"})


@dataclass(frozen=True)
class WhiteNoiseSample:
    """Truncated periodic white noise xi^n = sum_(|k|<=n) xihat(k) e_k, d=1."""

    field: PeriodicField
    n: int
    seed: int
    zero_mean: bool = False

    def coefficient(self, k: int) -> complex:
        return complex(self.field.coeffs[k % self.field.grid.modes_per_axis])

    def pair(self, phi: PeriodicField) -> complex:
        """The L^2 pairing <xi, phi> = sum_k xihat(k) conj(phihat(k))."""
        return complex(np.vdot(phi.coeffs, self.field.coeffs))


def sample_white_noise(seed: int, n: int, grid: FourierGrid,
                       zero_mean: bool = False) -> WhiteNoiseSample:
    """Sample xi^n with unit L^2 covariance: E <xi,phi><xi,psi> = <phi,psi>.

    xihat(0) is standard normal (or 0 with ``zero_mean``); for 0 < k <= n,
    xihat(k) = (a + ib)/sqrt(2) with a, b independent standard normals and
    xihat(-k) the conjugate.
    """
    if grid.dimension != 1:
        raise ValueError("white noise sampling is implemented on the 1-d torus")
    if n > grid.modes_per_axis // 2 - 1:
        raise ValueError(
            f"truncation n={n} exceeds the grid bound {grid.modes_per_axis // 2 - 1}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = np.random.default_rng(seed)
    c = np.zeros(grid.shape, dtype=complex)
    c[0] = 0.0 if zero_mean else rng.standard_normal()
    if n > 0:
        a = rng.standard_normal(n)
        b = rng.standard_normal(n)
        pos = (a + 1j * b) / np.sqrt(2.0)
        c[1:n + 1] = pos
        c[-n:] = np.conj(pos[::-1])
    return WhiteNoiseSample(PeriodicField(grid, c, real=True), n, seed, zero_mean)


def lift_white_noise(xi: WhiteNoiseSample, sym: StableSymbol, T: float,
                     n_times: int = 33, eps: float = DEFAULT_EPS) -> EnhancedDrift:
    """Rough lift of a white-noise drift: V1 = xi^n, V2 = J^T(grad xi^n) (.) xi^n.

    V1 is constant in time; the mean of the resonant product is retained.
    Convergence of the lift as n grows needs alpha > 3/2 (warned, not
    enforced: truncated lifts are well defined for any alpha).
    """
    if sym.dimension != 1:
        raise ValueError("white-noise lift is implemented on the 1-d torus")
    floor = (2.0 - 2.0 * sym.alpha) / 3.0
    if floor >= -0.5:
        raise ValueError(
            f"alpha={sym.alpha} <= 7/4: no admissible regularity tag below "
            "-1/2 exists for the white-noise drift")
    # the tag -1/2 - eps must stay above the admissible floor (2-2alpha)/3
    eps = min(eps, 0.5 * (-0.5 - floor))
    times = uniform_times(T, n_times)
    v1 = TimeField.constant_in_time(xi.field, times)
    # J^T of a time-constant field is exact on any time grid (the backward
    # recursion integrates constants in closed form)
    jgrad = jt_field(sym, TimeField.constant_in_time(xi.field.derivative(), times))
    v2 = time_paraproduct(jgrad, v1, "resonant")
    beta = -0.5 - eps
    return EnhancedDrift(
        (v1,), ((v2,),), beta, sym.alpha,
        meta={"kind": "white_noise_lift", "seed": xi.seed, "n": xi.n,
              "zero_mean": xi.zero_mean, "eps": eps, "T": T})


def _rho_hat(sym: StableSymbol, r: float, T: float, k: np.ndarray) -> np.ndarray:
    """Fourier coefficients of the backward kernel: J^T of a time-constant
    mode e_k, differentiated: 2 pi i k (1 - e^(-(T-r) psi(k))) / psi(k)."""
    k = np.asarray(k, dtype=float)
    pk = psi(sym, k[..., None])
    out = np.zeros(k.shape, dtype=complex)
    nz = pk > 0
    out[nz] = 2j * np.pi * k[nz] * -np.expm1(-(T - r) * pk[nz]) / pk[nz]
    return out


def _resonant_weight(k1: np.ndarray, k2: np.ndarray, j_max: int = 60) -> np.ndarray:
    """psihat_(.)(k1, k2) = sum_(|l1-l2|<=1) p_l1(k1) p_l2(k2)."""
    out = np.zeros(np.broadcast_shapes(np.shape(k1), np.shape(k2)))
    for l1 in range(-1, j_max + 1):
        w1 = dyadic_weight(l1, k1)
        if not np.any(w1):
            if 2.0 ** l1 > 2 * np.max(np.abs(k1)):
                break
            continue
        for l2 in range(max(-1, l1 - 1), l1 + 2):
            out += w1 * dyadic_weight(l2, k2)
    return out


def chaos_variance_oracle(sym: StableSymbol, j: int, s: float, t: float,
                          n: int, T: float) -> float:
    """E[|Delta_j(((rho_t - rho_s) * xi^n) (.) xi^n)(x)|^2], closed form.

    The quadratic form c(k1,k2) = p_j(k1+k2) psihat_(.)(k1,k2)
    (rhohat_t - rhohat_s)(k1) is contracted with the Gaussian Wick rule:
    second moment = 2 ||sym(c)||^2 + |trace mean|^2, the mean surviving
    only at j = -1 (p_j(0) = 0 otherwise).  x-independent.
    """
    ks = np.arange(-n, n + 1)
    k1 = ks[:, None].astype(float)
    k2 = ks[None, :].astype(float)
    rho = _rho_hat(sym, t, T, k1) - _rho_hat(sym, s, T, k1)
    c = dyadic_weight(j, k1 + k2) * _resonant_weight(k1, k2) * rho
    c_sym = 0.5 * (c + c.T)
    mean = np.trace(c[:, ::-1])  # sum_k c(k, -k)
    return float(2.0 * np.sum(np.abs(c_sym) ** 2) + np.abs(mean) ** 2)


def lift_mean_oracle(sym: StableSymbol, t: float, n: int, T: float) -> float:
    """E[V2(t)(x)] = sum_(|k|<=n) psihat_(.)(k,-k) rhohat_t(k), x-independent."""
    ks = np.arange(-n, n + 1).astype(float)
    val = np.sum(_resonant_weight(ks, -ks) * _rho_hat(sym, t, T, ks))
    return float(val.real)
