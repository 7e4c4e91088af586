"""Mild-solution solvers for the backward equation with drift.

The equation solved backward from a terminal condition at T is

    d/dt u + L u + grad(u) . V = f,        u(T) = u^T,

with L the generator (Fourier multiplier -psi(k)), in the mild form

    u(t) = P_(T-t) u^T + J^T(grad(u) . V - f)(t).

Three solvers share this form: a classical exponential integrator for
band-limited drifts (the oracle), a Picard fixed point for the Young
regime, and the paracontrolled fixed point for rough drifts, where the
resonant part of grad(u) . V1 is replaced by the second-order enhancement
V2 through the ansatz u = u' paraless J^T(V1) + usharp.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .enhanced_drift import EnhancedDrift
from .fields import FourierGrid, PeriodicField, TimeField, uniform_times
from .semigroup import StableSymbol, jt_field, psi_on_grid, semigroup_apply
from .spectral import besov_norm, besov_norm_time, paraproducts, time_holder_seminorm

__all__ = [
    "BackwardData",
    "ParacontrolledSolution",
    "default_theta",
    "classical_solve",
    "solve_young",
    "rough_product",
    "solve_rough",
    "lipschitz_probe",
    "NonContractionError",
]

CONTRACTION_CEILING = 0.9
MAX_SPLITS = 12


class NonContractionError(RuntimeError):
    """Fixed-point iteration failed to contract after exhausting splits."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass
class BackwardData:
    """Right-hand side, terminal condition and regularity targets.

    ``f`` is a time field, or None when ``f_drift_component`` selects
    f = V1^j (the drift component itself as the right-hand side).
    ``terminal_reg`` tags the regularity of the terminal condition; None
    means band-limited/smooth.
    """

    terminal: PeriodicField
    T: float
    theta: float
    f: TimeField | None = None
    f_drift_component: int | None = None
    terminal_reg: float | None = None

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError(f"horizon must be positive, got {self.T}")
        if self.f is not None and self.f_drift_component is not None:
            raise ValueError("give f or a drift component tag, not both")

    def rhs(self, drift: EnhancedDrift | None, times: np.ndarray) -> TimeField:
        grid = self.terminal.grid
        if self.f is not None:
            coeffs = np.stack([self.f.at_time(t).coeffs for t in times])
            return TimeField(grid, times, coeffs, real=self.f.real)
        if self.f_drift_component is not None:
            if drift is None:
                raise ValueError("drift-component rhs needs a drift")
            comp = drift.v1[self.f_drift_component]
            coeffs = np.stack([comp.at_time(t).coeffs for t in times])
            return TimeField(grid, times, coeffs, real=comp.real)
        return TimeField.zero(grid, times)


def default_theta(beta: float, alpha: float, rough: bool) -> float:
    """Midpoint of the admissible window for the regime."""
    lo = (2.0 - beta) / 2.0 if rough else 1.0 - beta
    hi = beta + alpha
    if hi <= lo:
        raise ValueError(f"empty admissible window for beta={beta}, alpha={alpha}")
    return 0.5 * (lo + hi)


def _check_young_window(data: BackwardData, drift: EnhancedDrift):
    beta, alpha = drift.beta, drift.alpha
    if beta <= (1.0 - alpha) / 2.0:
        raise ValueError(
            f"beta={beta} is below the Young floor (1-alpha)/2 = {(1 - alpha) / 2}")
    if not 1.0 - beta < data.theta < beta + alpha:
        raise ValueError(
            f"theta={data.theta} outside the Young window "
            f"({1.0 - beta}, {beta + alpha})")


def _check_rough_window(data: BackwardData, drift: EnhancedDrift):
    beta, alpha = drift.beta, drift.alpha
    if drift.v2 is None:
        raise ValueError("rough solve needs the second-order drift data V2")
    if not (2.0 - beta) / 2.0 < data.theta < beta + alpha:
        raise ValueError(
            f"theta={data.theta} outside the rough window "
            f"({(2.0 - beta) / 2.0}, {beta + alpha})")
    if data.terminal_reg is not None and data.terminal_reg < 2.0 * data.theta - 1.0:
        raise ValueError(
            f"terminal regularity {data.terminal_reg} below the required "
            f"{2.0 * data.theta - 1.0}")


def _drift_dot_grad(u_slice: PeriodicField, drift: EnhancedDrift | None,
                    t: float) -> PeriodicField:
    """Plain spectral product grad(u) . V1 at one time."""
    out = PeriodicField.zero(u_slice.grid)
    if drift is None:
        return out
    for j, comp in enumerate(drift.v1):
        out = out + u_slice.derivative(axis=j).product(comp.at_time(t))
    return out


def classical_solve(drift: EnhancedDrift | None, data: BackwardData,
                    sym: StableSymbol, m: int = 128) -> TimeField:
    """Exponential-integrator oracle for band-limited drifts.

    Steps backward from u^T; the drift/forcing term is integrated against
    the exact semigroup with a predictor-corrector (linear-in-time)
    profile, giving second order in the step size.
    """
    grid = data.terminal.grid
    times = uniform_times(data.T, m)
    f = data.rhs(drift, times)
    psi_k = psi_on_grid(sym, grid)
    coeffs = np.zeros((m + 1,) + grid.shape, dtype=complex)
    coeffs[m] = data.terminal.coeffs

    from .semigroup import _segment_integral

    def g(i: int, u_c: np.ndarray) -> np.ndarray:
        u_f = PeriodicField(grid, u_c, real=False)
        return (_drift_dot_grad(u_f, drift, float(times[i])).coeffs
                - f.coeffs[i])

    for i in range(m - 1, -1, -1):
        h = float(times[i + 1] - times[i])
        decay = np.exp(-h * psi_k)
        g1 = g(i + 1, coeffs[i + 1])
        # predictor: frozen source; corrector: linear source profile
        pred = decay * coeffs[i + 1] + _segment_integral(psi_k, h, g1, g1)
        g0 = g(i, pred)
        coeffs[i] = decay * coeffs[i + 1] + _segment_integral(psi_k, h, g0, g1)
    return TimeField(grid, times, coeffs, real=data.terminal.real,
                     theta=data.theta)


def _free_part(data: BackwardData, sym: StableSymbol,
               times: np.ndarray) -> TimeField:
    """P_(T-t) u^T on the given time grid."""
    grid = data.terminal.grid
    psi_k = psi_on_grid(sym, grid)
    coeffs = np.stack(
        [np.exp(-(data.T - t) * psi_k) * data.terminal.coeffs for t in times])
    return TimeField(grid, times, coeffs, real=data.terminal.real)


def _interval_slices(m: int, n_intervals: int) -> list[tuple[int, int]]:
    """Index ranges [(i0, i1)] of the sub-intervals, rightmost first."""
    if m % n_intervals:
        raise ValueError("time grid does not split evenly")
    step = m // n_intervals
    return [(m - (k + 1) * step, m - k * step) for k in range(n_intervals)]


def _tolerance_scale(data: BackwardData, drift: EnhancedDrift | None,
                     times: np.ndarray) -> float:
    scale = max(1.0, besov_norm(data.terminal, data.theta))
    f = data.rhs(drift, times)
    if np.any(f.coeffs):
        scale = max(scale, besov_norm_time(f, data.theta))
    return scale


def _picard_interval(step_map, u0: TimeField, norm_fn, tol: float,
                     relaxation: float, max_iter: int = 60):
    """Damped Picard iteration; returns (u, residuals) or None on failure."""
    u = u0
    residuals: list[float] = []
    for _ in range(max_iter):
        phi_u = step_map(u)
        res = norm_fn(phi_u - u)
        residuals.append(res)
        if res <= tol:
            return phi_u, residuals
        if len(residuals) >= 4:
            factors = [residuals[i + 1] / residuals[i]
                       for i in range(len(residuals) - 3, len(residuals) - 1)
                       if residuals[i] > 0]
            if factors and min(factors) >= CONTRACTION_CEILING:
                return None, residuals
        u = u + (phi_u - u) * relaxation
    return None, residuals


def solve_young(drift: EnhancedDrift, data: BackwardData, sym: StableSymbol,
                m: int = 128, tol: float = 1e-8,
                max_splits: int = MAX_SPLITS,
                diagnostics: dict | None = None) -> TimeField:
    """Picard fixed point of u -> P_(T-t) u^T + J^T(grad(u) . V1 - f).

    Solves right-to-left on sub-intervals, halving their length whenever
    the iteration fails to contract (estimated factor >= 0.9, relaxation
    1.0 then 0.5); the sub-interval terminal is the value already computed
    to its right.
    """
    _check_young_window(data, drift)
    grid = data.terminal.grid
    times = uniform_times(data.T, m)
    f = data.rhs(drift, times)
    psi_k = psi_on_grid(sym, grid)
    tol_abs = tol * _tolerance_scale(data, drift, times)
    diag = {"splits": 0, "intervals": [], "relaxation": 1.0}

    def attempt(n_intervals: int, relaxation: float) -> TimeField | None:
        coeffs = np.zeros((m + 1,) + grid.shape, dtype=complex)
        coeffs[m] = data.terminal.coeffs
        intervals = []
        for i0, i1 in _interval_slices(m, n_intervals):
            sub_t = times[i0:i1 + 1]
            term = PeriodicField(grid, coeffs[i1], real=data.terminal.real)
            free = np.stack(
                [np.exp(-(sub_t[-1] - t) * psi_k) * term.coeffs for t in sub_t])

            def step_map(u: TimeField) -> TimeField:
                g = np.stack(
                    [_drift_dot_grad(u.slice(i), drift, float(sub_t[i])).coeffs
                     - f.coeffs[i0 + i] for i in range(len(sub_t))])
                integ = jt_field(sym, TimeField(grid, sub_t, g))
                return TimeField(grid, sub_t, free + integ.coeffs)

            u0 = TimeField(grid, sub_t,
                           np.broadcast_to(term.coeffs, free.shape).copy())
            u_sub, residuals = _picard_interval(
                step_map, u0, lambda w: besov_norm_time(w, data.theta),
                tol_abs, relaxation)
            intervals.append({"range": [float(sub_t[0]), float(sub_t[-1])],
                              "iterations": len(residuals),
                              "residuals": residuals})
            if u_sub is None:
                diag["intervals"] = intervals
                return None
            coeffs[i0:i1 + 1] = u_sub.coeffs
        diag["intervals"] = intervals
        return TimeField(grid, times, coeffs, real=data.terminal.real,
                         theta=data.theta)

    for split in range(max_splits + 1):
        n_intervals = 2 ** split
        if m % n_intervals:
            break
        for relaxation in (1.0, 0.5):
            diag["splits"] = split
            diag["relaxation"] = relaxation
            out = attempt(n_intervals, relaxation)
            if out is not None:
                if diagnostics is not None:
                    diagnostics.update(diag)
                return out
    raise NonContractionError(
        f"no contraction after {diag['splits']} interval halvings", diag)


@dataclass
class ParacontrolledSolution:
    """Solution triple of the rough fixed point.

    ``uprime`` is the d-vector of paracontrolled derivatives; the
    reconstruction u = sum_i uprime^i paraless J^T(V1^i) + usharp holds on
    every time slice by construction.
    """

    u: TimeField
    uprime: tuple[TimeField, ...]
    usharp: TimeField
    theta: float
    diagnostics: dict = field(default_factory=dict)

    def reconstruction_residual(self, jv: tuple[TimeField, ...]) -> float:
        """Relative sup defect of u - sum uprime paraless J^T V1 - usharp."""
        from .spectral import time_paraproduct
        recon = self.usharp
        for up, j in zip(self.uprime, jv):
            recon = recon + time_paraproduct(up, _align(j, self.u.times), "less")
        defect = max((self.u.slice(i) - recon.slice(i)).linf()
                     for i in range(self.u.n_times))
        scale = max(1.0, max(self.u.slice(i).linf() for i in range(self.u.n_times)))
        return defect / scale


def _align(v: TimeField, times: np.ndarray) -> TimeField:
    """Resample a time field onto the given times (exact at shared nodes)."""
    if v.times.shape == times.shape and np.allclose(v.times, times):
        return v
    coeffs = np.stack([v.at_time(float(t)).coeffs for t in times])
    return TimeField(v.grid, times, coeffs, real=v.real, theta=v.theta)


class _RoughMachinery:
    """Time-grid-aligned drift data: V1, V2, J^T(V1) and J^T(grad V1).

    All J^T integrals are anchored at the global horizon (the last time of
    the alignment grid), so paracontrolled decompositions on interior
    sub-intervals reuse the same reference objects.
    """

    def __init__(self, drift: EnhancedDrift, sym: StableSymbol,
                 times: np.ndarray):
        self.drift = drift
        self.sym = sym
        self.times = np.asarray(times, dtype=float)
        d = drift.grid.dimension
        self.v1 = [_align(drift.v1[i], self.times) for i in range(d)]
        self.v2 = [[_align(drift.v2[i][j], self.times) for j in range(d)]
                   for i in range(d)]
        self.jv = [jt_field(sym, self.v1[i]) for i in range(d)]
        self.jdv = [[jt_field(sym, self.v1[i].derivative(axis=j))
                     for j in range(d)] for i in range(d)]

    def index_of(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-12:
            raise ValueError(f"time {t} not on the drift alignment grid")
        return i


def _rough_product_slice(mach: _RoughMachinery, u: PeriodicField,
                         uprime: tuple[PeriodicField, ...],
                         usharp: PeriodicField, i_time: int) -> PeriodicField:
    """grad(u) . V at one time, resonant part through the enhancement.

    Per component j the resonant block grad_j(u) (.) V1^j is replaced by

        sum_i uprime^i V2^(i,j) + sum_i R(uprime^i, J^T(d_j V1^i), V1^j)
        + U^(sharp,j) (.) V1^j,

    with R(f,g,h) = (f paraless g) (.) h - f * (g (.) h) and
    U^(sharp,j) = d_j usharp + sum_i d_j uprime^i paraless J^T(V1^i);
    the para parts grad_j(u) paraless/paragreater V1^j are kept as is.
    """
    d = mach.drift.grid.dimension
    total = PeriodicField.zero(u.grid)
    for j in range(d):
        v1j = mach.v1[j].slice(i_time)
        du_j = u.derivative(axis=j)
        less, _, greater = paraproducts(du_j, v1j)
        total = total + less + greater
        u_sharp_j = usharp.derivative(axis=j)
        for i in range(d):
            jv_i = mach.jv[i].slice(i_time)
            u_sharp_j = u_sharp_j + paraproducts(
                uprime[i].derivative(axis=j), jv_i)[0]
        total = total + paraproducts(u_sharp_j, v1j)[1]
        for i in range(d):
            up = uprime[i]
            total = total + up.product(mach.v2[i][j].slice(i_time))
            jdv = mach.jdv[i][j].slice(i_time)
            commut = (paraproducts(paraproducts(up, jdv)[0], v1j)[1]
                      - up.product(paraproducts(jdv, v1j)[1]))
            total = total + commut
    return total


def rough_product(sol: ParacontrolledSolution, drift: EnhancedDrift,
                  sym: StableSymbol) -> TimeField:
    """grad(u) . V for a paracontrolled solution, slice by slice."""
    if drift.v2 is None:
        raise ValueError("rough product needs the second-order drift data V2")
    mach = _RoughMachinery(drift, sym, sol.u.times)
    grid = sol.u.grid
    coeffs = np.stack([
        _rough_product_slice(
            mach, sol.u.slice(i),
            tuple(up.slice(i) for up in sol.uprime),
            sol.usharp.slice(i), i).coeffs
        for i in range(sol.u.n_times)])
    out = TimeField(grid, sol.u.times, coeffs)
    return out.with_theta(drift.beta)


def solve_rough(drift: EnhancedDrift, data: BackwardData, sym: StableSymbol,
                m: int = 128, tol: float = 1e-8,
                max_splits: int = MAX_SPLITS) -> ParacontrolledSolution:
    """Paracontrolled fixed point for rough drifts.

    The map sends u to P_(T-t) u^T + J^T(grad(u) . V - f) with the drift
    product of `rough_product`; the derived fields are uprime = grad(u)
    (minus e_j when f = V1^j) and usharp = u - uprime paraless J^T(V1),
    both against the globally anchored J^T(V1).  Residuals are measured in
    the full paracontrolled norm; non-contraction halves the sub-interval
    (relaxation 1.0 then 0.5, at most ``max_splits`` halvings).
    """
    _check_rough_window(data, drift)
    grid = data.terminal.grid
    d = grid.dimension
    times = uniform_times(data.T, m)
    f = data.rhs(drift, times)
    mach = _RoughMachinery(drift, sym, times)
    psi_k = psi_on_grid(sym, grid)
    tol_abs = tol * _tolerance_scale(data, drift, times)
    theta = data.theta
    alpha = sym.alpha
    kappa1 = (drift.beta + alpha - theta) / alpha
    kappa2 = 2.0 * (alpha + drift.beta - theta) / alpha
    diag: dict = {"splits": 0, "relaxation": 1.0, "intervals": [],
                  "kappa1": kappa1, "kappa2": kappa2}

    def derived(u: TimeField, i0: int):
        """(uprime, usharp) for a sub-interval field starting at global i0."""
        ups = []
        for j in range(d):
            up = u.derivative(axis=j)
            if data.f_drift_component == j:
                shift = PeriodicField.constant(grid, -1.0)
                up = TimeField(grid, u.times,
                               up.coeffs + shift.coeffs, real=up.real)
            ups.append(up)
        sharp = u
        for i in range(d):
            jv_sub = mach.jv[i].restrict(i0, i0 + u.n_times - 1)
            from .spectral import time_paraproduct
            sharp = sharp - time_paraproduct(ups[i], jv_sub, "less")
        return tuple(ups), sharp

    def dtheta_norm(w: TimeField, i0: int) -> float:
        wp, ws = derived(w, i0)
        if data.f_drift_component is not None:
            # differences of iterates carry no e_j shift
            wp = tuple(w.derivative(axis=j) for j in range(d))
            ws = w
            from .spectral import time_paraproduct
            for i in range(d):
                jv_sub = mach.jv[i].restrict(i0, i0 + w.n_times - 1)
                ws = ws - time_paraproduct(wp[i], jv_sub, "less")
        return (besov_norm_time(w, theta)
                + time_holder_seminorm(w, min(theta / alpha, 0.999))
                + max(besov_norm_time(c, theta - 1.0) for c in wp)
                + besov_norm_time(ws, 2.0 * theta - 1.0))

    def attempt(n_intervals: int, relaxation: float):
        coeffs = np.zeros((m + 1,) + grid.shape, dtype=complex)
        coeffs[m] = data.terminal.coeffs
        intervals = []
        t_bar = data.T / n_intervals
        for i0, i1 in _interval_slices(m, n_intervals):
            sub_t = times[i0:i1 + 1]
            term_c = coeffs[i1]
            free = np.stack(
                [np.exp(-(sub_t[-1] - t) * psi_k) * term_c for t in sub_t])

            def step_map(u: TimeField) -> TimeField:
                ups, sharp = derived(u, i0)
                g = np.stack(
                    [_rough_product_slice(
                        mach, u.slice(i),
                        tuple(up.slice(i) for up in ups),
                        sharp.slice(i), i0 + i).coeffs - f.coeffs[i0 + i]
                     for i in range(len(sub_t))])
                integ = jt_field(sym, TimeField(grid, sub_t, g))
                return TimeField(grid, sub_t, free + integ.coeffs)

            u0 = TimeField(grid, sub_t,
                           np.broadcast_to(term_c, free.shape).copy())
            u_sub, residuals = _picard_interval(
                step_map, u0, lambda w: dtheta_norm(w, i0),
                tol_abs, relaxation)
            intervals.append({
                "range": [float(sub_t[0]), float(sub_t[-1])],
                "iterations": len(residuals),
                "residuals": residuals,
                "contraction": [residuals[i + 1] / residuals[i]
                                for i in range(len(residuals) - 1)
                                if residuals[i] > 0],
                "t_bar": t_bar,
                "t_bar_kappa1": t_bar ** kappa1,
                "t_bar_kappa2": t_bar ** kappa2,
            })
            if u_sub is None:
                diag["intervals"] = intervals
                return None
            coeffs[i0:i1 + 1] = u_sub.coeffs
        diag["intervals"] = intervals
        return TimeField(grid, times, coeffs, real=data.terminal.real,
                         theta=theta)

    for split in range(max_splits + 1):
        n_intervals = 2 ** split
        if m % n_intervals:
            break
        for relaxation in (1.0, 0.5):
            diag["splits"] = split
            diag["relaxation"] = relaxation
            u = attempt(n_intervals, relaxation)
            if u is not None:
                ups, sharp = derived(u, 0)
                sol = ParacontrolledSolution(u, ups, sharp.with_theta(
                    2.0 * theta - 1.0), theta, dict(diag))
                return sol
    raise NonContractionError(
        f"no contraction after {diag['splits']} interval halvings", diag)


def lipschitz_probe(solve, base_case, cases, theta: float,
                    alpha: float) -> list[dict]:
    """Realized solution-map Lipschitz ratios for perturbed inputs.

    ``solve`` maps a case to a TimeField; ``cases`` is a list of
    (label, case, denominator) with the denominator the input-space
    distance.  Ratios must stay bounded as the denominator shrinks.
    """
    u0 = solve(base_case)
    rows = []
    for label, case, denom in cases:
        u1 = solve(case)
        w = u1 - u0
        num = (besov_norm_time(w, theta)
               + time_holder_seminorm(w, min(theta / alpha, 0.999)))
        rows.append({"label": label, "denominator": float(denom),
                     "numerator": num,
                     "ratio": num / denom if denom > 0 else 0.0})
    return rows
