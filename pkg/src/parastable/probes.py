"""Empirical-constant harnesses for the regularity estimates.

Each inequality with an unspecified constant is probed as a realized
ratio: synthesize fields of the stated regularity, evaluate both sides on
a sweep of the small parameter (time t, window length, or resolution N),
and report either the log-log slope (for sharp power laws) or the ratio
table (for boundedness-without-trend claims).  The functions return
CSV-ready row dicts plus a small summary.
"""

from __future__ import annotations

import numpy as np

from .fields import FourierGrid, PeriodicField, TimeField, uniform_times
from .semigroup import (
    StableSymbol,
    commutator_jt,
    commutator_semigroup,
    jt_field,
    semigroup_apply,
)
from .spectral import (
    besov_norm,
    lacunary_field,
    besov_norm_time,
    paraproducts,
    synthesize_field,
    synthesize_time_field,
    time_holder_seminorm,
    time_paraproduct,
)

__all__ = [
    "fit_loglog_slope",
    "schauder_probe",
    "paraproduct_probe",
    "commutator_probe",
]


def fit_loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mask = (x > 0) & (y > 0)
    if mask.sum() < 2:
        raise ValueError("need at least two positive points for a slope")
    return float(np.polyfit(np.log(x[mask]), np.log(y[mask]), 1)[0])


def schauder_probe(sym: StableSymbol, which: str, n_modes: int = 512,
                   beta: float = 0.3, vartheta: float = 0.8,
                   seed: int = 0, n_points: int = 25) -> dict:
    """Power-law harness for the semigroup and J^T regularity gains.

    which:
      'p_gain'  : |P_t u|_(beta+vartheta)          ~ t^(-vartheta/alpha)
      'p_id'    : |(P_t - Id) u|_(beta-vartheta)   ~ t^(vartheta/alpha)
      'j_space' : sup |J^T v|_(beta+vartheta) over [T-Tbar, T]
                                                   ~ Tbar^(1-vartheta/alpha)
      'j_time'  : |J^T v| in C^((beta+vartheta)/alpha) L^inf over the window
                                                   ~ Tbar^(1-vartheta/alpha)
    The sweep covers >= 2 decades inside the resolvable range
    [n_modes^-alpha, ~1]; rows carry (parameter, norm) pairs.
    """
    grid = FourierGrid(n_modes, 1)
    rng = np.random.default_rng(seed)
    alpha = sym.alpha
    rows = []
    if which in ("p_gain", "p_id"):
        u = lacunary_field(grid, beta, rng)
        # keep the frequency maximizing 2^(j vartheta) e^(-t psi(2^j)) well
        # inside the resolvable band: k* ~ (vartheta/(alpha t))^(1/alpha)/2pi
        # in [4, n_modes/4]
        c = vartheta / alpha
        t_hi = c / (2.0 * np.pi * 4.0) ** alpha
        t_lo = c / (2.0 * np.pi * n_modes / 4.0) ** alpha
        if t_hi / t_lo < 100.0:
            raise ValueError("resolution too low for a 2-decade sweep")
        ts = np.geomspace(t_lo, t_hi, n_points)
        for t in ts:
            pu = semigroup_apply(sym, float(t), u)
            if which == "p_gain":
                val = besov_norm(pu, beta + vartheta)
            else:
                val = besov_norm(pu - u, beta - vartheta)
            rows.append({"t": float(t), "norm": val})
        slope = fit_loglog_slope([r["t"] for r in rows], [r["norm"] for r in rows])
        target = -vartheta / alpha if which == "p_gain" else vartheta / alpha
    elif which in ("j_space", "j_time"):
        T = 0.5
        varsigma = beta - 1.0
        v0 = lacunary_field(grid, varsigma, rng)
        # window lengths put the turnover frequency 1/psi(k*) ~ Tbar in
        # [4, n_modes/4]; the integrand is constant in time, so the
        # backward recursion is exact on any window grid
        tb_hi = (2.0 * np.pi * 4.0) ** -alpha
        tb_lo = (2.0 * np.pi * n_modes / 4.0) ** -alpha
        if tb_hi / tb_lo < 100.0:
            raise ValueError("resolution too low for a 2-decade sweep")
        for tbar in np.geomspace(tb_lo, tb_hi, n_points):
            win_times = np.linspace(T - tbar, T, 17)
            window = jt_field(sym, TimeField.constant_in_time(v0, win_times))
            if which == "j_space":
                val = besov_norm_time(window, varsigma + vartheta)
            else:
                rho = (varsigma + vartheta) / alpha
                val = time_holder_seminorm(window, rho)
            rows.append({"t_bar": float(tbar), "norm": val})
        slope = fit_loglog_slope([r["t_bar"] for r in rows],
                                 [r["norm"] for r in rows])
        target = 1.0 - vartheta / alpha
    else:
        raise ValueError(f"unknown probe kind {which!r}")
    return {"which": which, "alpha": alpha, "beta": beta,
            "vartheta": vartheta, "slope": slope, "target": target,
            "rows": rows}


def _window_holder(u: TimeField, rho: float, n_sub: int = 9) -> float:
    """Holder-in-time norm on a decimated copy of the window (cost control)."""
    idx = np.unique(np.linspace(0, u.n_times - 1, n_sub).astype(int))
    sub = TimeField(u.grid, u.times[idx], u.coeffs[idx], real=u.real)
    return time_holder_seminorm(sub, rho)


def paraproduct_probe(sizes=(64, 128, 256, 512), n_seeds: int = 50,
                      theta: float = 0.7, beta: float = -0.4,
                      seed: int = 0) -> dict:
    """Realized constants of the three paraproduct estimates across N.

    For u at regularity theta and v at beta (theta + beta > 0) the ratios

      resonant : |u (.) v|_(theta+beta) / (|u|_theta |v|_beta)
      less_pos : |u paraless v|_beta / (|u|_theta |v|_beta),  theta > 0
      less_neg : |w paraless v|_(beta+theta') / (|w|_theta' |v|_beta),
                 theta' = -theta < 0

    must stay bounded with no growth trend in N.
    """
    if theta + beta <= 0:
        raise ValueError("need theta + beta > 0 for the resonant estimate")
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        grid = FourierGrid(int(n), 1)
        for s in range(n_seeds):
            u = synthesize_field(grid, theta, rng)
            v = synthesize_field(grid, beta, rng)
            w = synthesize_field(grid, -theta, rng)
            nu, nv = besov_norm(u, theta), besov_norm(v, beta)
            nw = besov_norm(w, -theta)
            less_u, res_uv, _ = paraproducts(u, v)
            less_w = paraproducts(w, v)[0]
            rows.append({
                "N": int(n), "seed": s,
                "resonant": besov_norm(res_uv, theta + beta) / (nu * nv),
                "less_pos": besov_norm(less_u, beta) / (nu * nv),
                "less_neg": besov_norm(less_w, beta - theta) / (nw * nv),
            })
    summary = {}
    for key in ("resonant", "less_pos", "less_neg"):
        per_n = {n: np.mean([r[key] for r in rows if r["N"] == n])
                 for n in sizes}
        slope = fit_loglog_slope(list(per_n.keys()), list(per_n.values()))
        summary[key] = {"mean_by_N": {int(k): float(v) for k, v in per_n.items()},
                        "trend_slope": slope,
                        "max": float(max(r[key] for r in rows))}
    return {"theta": theta, "beta": beta, "rows": rows, "summary": summary}


def commutator_probe(sym: StableSymbol, which: str, n_modes: int = 256,
                     n_seeds: int = 20, n_halvings: int = 3,
                     seed: int = 0) -> dict:
    """Boundedness harness for the two paraproduct commutators.

    which = 'jt':  |J^T(g paraless h) - g paraless J^T h| at 2 sigma + 1
      over the window [T - Tbar, T], normalized by
      Tbar^kappa (|g|_sigma + |g|_(C^(sigma/alpha) Linf)) |h|_varsigma,
      kappa = 1 - (sigma + 1 - varsigma)/alpha.

    which = 'semigroup':  |P_t(u paraless v) - u paraless P_t v| at
      gamma + beta + vartheta, normalized by t^(-vartheta/alpha)
      |u|_gamma |v|_beta.

    Ratios are reported per (seed, halving) and must stay bounded.
    """
    grid = FourierGrid(n_modes, 1)
    alpha = sym.alpha
    rng = np.random.default_rng(seed)
    rows = []
    if which == "jt":
        sigma, varsigma = 0.3, -0.3
        kappa = 1.0 - (sigma + 1.0 - varsigma) / alpha
        if kappa <= 0:
            raise ValueError("kappa must be positive; raise alpha")
        T, m = 0.5, 256
        times = uniform_times(T, m)
        for s in range(n_seeds):
            g = synthesize_time_field(grid, sigma, times, rng)
            h = synthesize_time_field(grid, varsigma, times, rng)
            comm = commutator_jt(sym, g, h)
            ng = (besov_norm_time(g, sigma)
                  + _window_holder(g, sigma / alpha, n_sub=9))
            nh = besov_norm_time(h, varsigma)
            for halving in range(n_halvings + 1):
                tbar = T * 2.0 ** -halving
                i0 = int(round((T - tbar) / T * m))
                num = besov_norm_time(comm.restrict(i0, m), 2.0 * sigma + 1.0)
                rows.append({"seed": s, "halving": halving, "t_bar": tbar,
                             "ratio": num / (tbar ** kappa * ng * nh)})
        params = {"sigma": sigma, "varsigma": varsigma, "kappa": kappa}
    elif which == "semigroup":
        gamma, beta, vartheta = 0.6, -0.4, 0.5
        for s in range(n_seeds):
            u = synthesize_field(grid, gamma, rng)
            v = synthesize_field(grid, beta, rng)
            nu, nv = besov_norm(u, gamma), besov_norm(v, beta)
            for halving in range(n_halvings + 1):
                t = 0.02 * 2.0 ** -halving
                comm = commutator_semigroup(sym, t, u, v)
                num = besov_norm(comm, gamma + beta + vartheta)
                rows.append({"seed": s, "halving": halving, "t": t,
                             "ratio": num / (t ** (-vartheta / alpha) * nu * nv)})
        params = {"gamma": gamma, "beta": beta, "vartheta": vartheta}
    else:
        raise ValueError(f"unknown commutator probe {which!r}")
    ratios = [r["ratio"] for r in rows]
    return {"which": which, "alpha": alpha, **params, "rows": rows,
            "max_ratio": float(np.max(ratios)),
            "median_ratio": float(np.median(ratios))}
