"""Command-line entry points for the solver and verification harnesses.

Every command writes a JSON report (plus a CSV row table and a PNG figure
where the output is tabular/plottable) into the output directory, embeds
the resolved configuration and a content hash, and exits 0 when the
command's acceptance assertions hold, 1 when a numerical assertion fails,
and 2 on usage or schema errors.  Fixed seeds give byte-identical JSON and
CSV; figures are documentation and are excluded from the hash.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .fields import FourierGrid, PeriodicField, TimeField, uniform_times
from .semigroup import StableSymbol, semigroup_apply
from .report import render_figure, write_report

COMMANDS = [
    "schauder-probe",
    "paraproduct-probe",
    "commutator-probe",
    "solve-young",
    "solve-rough",
    "lift-white-noise",
    "chaos-oracle",
    "stable-check",
    "campbell-check",
    "simulate",
    "martingale-test",
    "moment-scaling",
    "brox-demo",
]


class SchemaError(Exception):
    """Configuration value outside its admissible set; message carries the
    field path and the interval."""


def _require(cond: bool, field: str, value, admissible: str):
    if not cond:
        raise SchemaError(f"{field}: {value!r} outside the admissible {admissible}")


def _check_alpha(alpha: float, field: str = "alpha"):
    _require(0.0 < alpha <= 2.0, field, alpha, "interval (0, 2]")


def _check_pow2(n: int, field: str):
    _require(n >= 8 and (n & (n - 1)) == 0, field, n, "set {8, 16, 32, ...} (powers of two)")


def _sym(alpha: float) -> StableSymbol:
    return StableSymbol.fractional_laplacian(alpha)


# ---------------------------------------------------------------------------
# commands: each returns (report, rows, columns, draw, passed)

def cmd_schauder_probe(args):
    from .probes import schauder_probe
    _check_alpha(args.alpha)
    _check_pow2(args.n_modes, "n_modes")
    _require(0.0 < args.vartheta < args.alpha, "vartheta", args.vartheta,
             "interval (0, alpha)")
    kinds = (["p_gain", "p_id", "j_space", "j_time"]
             if args.which == "all" else [args.which])
    results = [schauder_probe(_sym(args.alpha), w, n_modes=args.n_modes,
                              beta=args.beta, vartheta=args.vartheta,
                              seed=args.seed) for w in kinds]
    rows = [{"which": r["which"], **row} for r in results for row in r["rows"]]
    summary = [{"which": r["which"], "slope": r["slope"], "target": r["target"],
                "error": abs(r["slope"] - r["target"]), "tolerance": 0.05,
                "pass": abs(r["slope"] - r["target"]) <= 0.05} for r in results]
    report = {"summary": summary, "alpha": args.alpha, "beta": args.beta,
              "vartheta": args.vartheta, "n_modes": args.n_modes}

    def draw(ax):
        for r in results:
            xs = [row.get("t", row.get("t_bar")) for row in r["rows"]]
            ys = [row["norm"] for row in r["rows"]]
            ax.loglog(xs, ys, "o-", ms=3, label=f"{r['which']} ({r['slope']:.3f})")
        ax.set_xlabel("t or window length")
        ax.set_ylabel("norm")
        ax.legend(fontsize=8)

    return report, rows, ["which", "t", "t_bar", "norm"], draw, all(
        s["pass"] for s in summary)


def cmd_paraproduct_probe(args):
    from .probes import paraproduct_probe
    _require(args.theta + args.beta > 0, "theta", args.theta,
             "set {theta : theta + beta > 0}")
    sizes = tuple(args.sizes)
    for n in sizes:
        _check_pow2(n, "sizes")
    r = paraproduct_probe(sizes=sizes, n_seeds=args.n_seeds,
                          theta=args.theta, beta=args.beta, seed=args.seed)
    passed = all(v["trend_slope"] <= 0.15 and np.isfinite(v["max"])
                 for v in r["summary"].values())
    report = {"summary": r["summary"], "theta": args.theta, "beta": args.beta,
              "sizes": list(sizes), "n_seeds": args.n_seeds,
              "trend_tolerance": 0.15}

    def draw(ax):
        for key, v in r["summary"].items():
            ns = sorted(v["mean_by_N"])
            ax.semilogx(ns, [v["mean_by_N"][n] for n in ns], "o-", label=key)
        ax.set_xlabel("N")
        ax.set_ylabel("mean realized constant")
        ax.legend()

    return report, r["rows"], ["N", "seed", "resonant", "less_pos", "less_neg"], \
        draw, passed


def cmd_commutator_probe(args):
    from .probes import commutator_probe
    _check_alpha(args.alpha)
    r = commutator_probe(_sym(args.alpha), args.which, n_seeds=args.n_seeds,
                         n_halvings=args.n_halvings, seed=args.seed)
    passed = np.isfinite(r["max_ratio"])
    report = {k: v for k, v in r.items() if k != "rows"}

    def draw(ax):
        xs = [row.get("t_bar", row.get("t")) for row in r["rows"]]
        ax.semilogx(xs, [row["ratio"] for row in r["rows"]], "o", ms=3)
        ax.set_xlabel("window length / time")
        ax.set_ylabel("normalized commutator ratio")

    cols = list(r["rows"][0].keys()) if r["rows"] else ["seed", "ratio"]
    return report, r["rows"], cols, draw, passed


def _smooth_drift(grid, times, beta, seed, kmax, scale=1.0):
    from .spectral import synthesize_field
    rng = np.random.default_rng(seed)
    v0 = synthesize_field(grid, beta, rng, kmax=kmax)
    v0 = PeriodicField(grid, scale * v0.coeffs, real=True)
    return TimeField.constant_in_time(v0, times)


def _solve_case(args, rough: bool):
    from .enhanced_drift import EnhancedDrift, lift_smooth
    from .pde import BackwardData, classical_solve, default_theta, solve_rough, solve_young
    _check_alpha(args.alpha)
    _check_pow2(args.n_modes, "n_modes")
    _require(args.T > 0, "T", args.T, "interval (0, inf)")
    grid = FourierGrid(args.n_modes, 1)
    times = uniform_times(args.T, args.m)
    terminal = PeriodicField.pure_mode(grid, 1, amplitude=1.0, real=True)
    if args.free:
        drift_field = TimeField.constant_in_time(PeriodicField.zero(grid), times)
    else:
        drift_field = _smooth_drift(grid, times, args.beta, args.seed,
                                    kmax=args.kmax, scale=args.drift_scale)
    sym = _sym(args.alpha)
    if rough:
        _require(args.alpha > 1.825, "alpha", args.alpha,
                 "interval (1.825, 2] (rough lift regularity floor)")
        drift = lift_smooth(drift_field, sym)
        theta = default_theta(drift.beta, args.alpha, rough=True)
        data = BackwardData(terminal, args.T, theta=theta)
        sol = solve_rough(drift, data, sym, m=args.m)
        u = sol.u
        from .semigroup import jt_field
        jv = tuple(jt_field(sym, c) for c in drift.v1)
        residual = sol.reconstruction_residual(jv)
        extra = {"reconstruction_residual": residual,
                 "reconstruction_tolerance": 1e-8}
        passed = residual <= 1e-8
    else:
        beta = 0.4 if args.free else args.beta
        drift = EnhancedDrift((drift_field,), None, beta, args.alpha)
        theta = default_theta(beta, args.alpha, rough=False)
        data = BackwardData(terminal, args.T, theta=theta)
        u = solve_young(drift, data, sym, m=args.m)
        extra, passed = {}, True
    ref = classical_solve(drift, data, sym, m=2 * args.m)
    scale = max(ref.at_time(0.0).linf(), 1e-30)
    err = max(
        (u.at_time(t) - ref.at_time(t)).linf() for t in (0.0, args.T / 2.0))
    rel = err / scale
    xs = np.arange(args.n_modes) / args.n_modes
    vals0 = u.at_time(0.0).values()
    rows = [{"x": float(x), "u0": float(v)} for x, v in zip(xs, vals0)]
    report = {"alpha": args.alpha, "theta": theta, "T": args.T, "m": args.m,
              "n_modes": args.n_modes, "free": bool(args.free),
              "classical_rel_error": rel,
              "classical_tolerance": 1e-3, **extra}
    passed = passed and rel <= 1e-3

    def draw(ax):
        ax.plot(xs, vals0)
        ax.set_xlabel("x")
        ax.set_ylabel("u(0, x)")

    return report, rows, ["x", "u0"], draw, passed


def cmd_solve_young(args):
    return _solve_case(args, rough=False)


def cmd_solve_rough(args):
    return _solve_case(args, rough=True)


def cmd_lift_white_noise(args):
    from .enhanced_drift import lift_white_noise, sample_white_noise
    _check_alpha(args.alpha)
    _check_pow2(args.n_modes, "n_modes")
    _require(0 < args.n <= args.n_modes // 2 - 1, "n", args.n,
             f"interval [1, {args.n_modes // 2 - 1}]")
    grid = FourierGrid(args.n_modes, 1)
    xi = sample_white_noise(args.seed, args.n, grid)
    lift = lift_white_noise(xi, _sym(args.alpha), args.T)
    v2 = lift.v2[0][0]
    rows = [{"t": float(t), "v2_mean": float(v2.at_time(float(t)).coeffs[0].real)}
            for t in v2.times]
    report = {"alpha": args.alpha, "n": args.n, "seed": args.seed,
              "T": args.T, "beta": lift.beta, "norms": dict(lift.norms),
              "meta": dict(lift.meta)}

    def draw(ax):
        ax.plot(np.arange(args.n_modes) / args.n_modes, v2.at_time(0.0).values())
        ax.set_xlabel("x")
        ax.set_ylabel("V2(0, x)")

    return report, rows, ["t", "v2_mean"], draw, True


def cmd_chaos_oracle(args):
    from .enhanced_drift import chaos_variance_oracle
    _check_alpha(args.alpha)
    _require(args.j >= -1, "j", args.j, "interval [-1, inf)")
    _require(0.0 <= args.s < args.t <= args.T, "s", args.s,
             "set {0 <= s < t <= T}")
    sym = _sym(args.alpha)
    rows = []
    for j in range(-1, args.j + 1):
        var = chaos_variance_oracle(sym, j, args.s, args.t, args.n, args.T)
        rows.append({"j": j, "variance": var})
    report = {"alpha": args.alpha, "n": args.n, "s": args.s, "t": args.t,
              "T": args.T, "rows": rows}

    def draw(ax):
        ax.semilogy([r["j"] for r in rows],
                    [max(r["variance"], 1e-300) for r in rows], "o-")
        ax.set_xlabel("block j")
        ax.set_ylabel("chaos block variance")

    return report, rows, ["j", "variance"], draw, True


def cmd_stable_check(args):
    from .levy import standard_stable
    from scipy.stats import ks_2samp
    _check_alpha(args.alpha)
    _require(args.samples >= 1000, "samples", args.samples,
             "interval [1000, inf)")
    rng = np.random.default_rng(args.seed)
    x = standard_stable(args.alpha, args.samples, rng)
    rows = []
    ok = True
    for xi_freq in (0.5, 1.0, 2.0):
        emp = np.cos(xi_freq * x)
        est, se = float(np.mean(emp)), float(np.std(emp) / np.sqrt(args.samples))
        target = float(np.exp(-np.abs(xi_freq) ** args.alpha))
        sigmas = abs(est - target) / se
        rows.append({"frequency": xi_freq, "empirical": est, "se": se,
                     "target": target, "sigmas": sigmas,
                     "pass": bool(sigmas <= 3.0)})
        ok = ok and sigmas <= 3.0
    c = 2.0
    y = standard_stable(args.alpha, args.samples, rng)
    ks = ks_2samp(c ** (1.0 / args.alpha) * x, x + y)
    ok = ok and ks.pvalue >= 0.01
    report = {"alpha": args.alpha, "samples": args.samples,
              "cf_rows": rows, "selfsim_ks_pvalue": float(ks.pvalue),
              "selfsim_threshold": 0.01}

    def draw(ax):
        ax.hist(np.clip(x, -8, 8), bins=120, density=True)
        ax.set_xlabel("x")
        ax.set_ylabel("stable density (clipped)")

    return report, rows, ["frequency", "empirical", "se", "target", "sigmas",
                          "pass"], draw, ok


def _poisson_squared_sums(intensity, alpha, cutoff, inner, dt, draws, rng):
    """Vectorized draws of S2 = sum of squared jump sizes per window."""
    from .levy import truncated_mass
    mass = truncated_mass(intensity, alpha, cutoff, inner)
    counts = rng.poisson(dt * mass, draws)
    u = rng.uniform(0.0, 1.0, int(counts.sum()))
    radii = (inner ** -alpha
             - u * (inner ** -alpha - cutoff ** -alpha)) ** (-1.0 / alpha)
    bounds = np.concatenate(([0], np.cumsum(counts)))
    sums = np.add.reduceat(np.concatenate((radii ** 2, [0.0])), bounds[:-1])
    sums[counts == 0] = 0.0
    return sums


def cmd_campbell_check(args):
    from .levy import campbell_moment
    _check_alpha(args.alpha)
    _require(args.lam <= 0.0, "lam", args.lam, "interval (-inf, 0]")
    _require(1 <= args.n <= 6, "n", args.n, "interval [1, 6]")
    _require(0.0 < args.inner < args.cutoff, "inner", args.inner,
             "interval (0, cutoff)")
    rng = np.random.default_rng(args.seed)
    s2 = _poisson_squared_sums(args.intensity, args.alpha, args.cutoff,
                               args.inner, args.dt, args.draws, rng)
    rows = []
    ok = True
    for order in range(1, args.n + 1):
        exact = campbell_moment(order, args.lam, args.dt, args.intensity,
                                args.alpha, args.cutoff, inner=args.inner)
        samples = s2 ** order * np.exp(args.lam * s2)
        est = float(np.mean(samples))
        se = float(np.std(samples) / np.sqrt(args.draws))
        sigmas = abs(est - exact) / se if se > 0 else 0.0
        rows.append({"order": order, "exact": exact, "mc": est, "se": se,
                     "sigmas": sigmas, "pass": bool(sigmas <= 3.0)})
        ok = ok and sigmas <= 3.0
    report = {"alpha": args.alpha, "lam": args.lam, "dt": args.dt,
              "intensity": args.intensity, "cutoff": args.cutoff,
              "inner": args.inner, "draws": args.draws, "rows": rows}

    def draw(ax):
        ax.errorbar([r["order"] for r in rows], [r["mc"] for r in rows],
                    yerr=[3 * r["se"] for r in rows], fmt="o", label="MC (3 SE)")
        ax.plot([r["order"] for r in rows], [r["exact"] for r in rows], "x",
                label="closed form")
        ax.set_xlabel("moment order")
        ax.legend()

    return report, rows, ["order", "exact", "mc", "se", "sigmas", "pass"], \
        draw, ok


def _sim_config(args):
    from .mcsim import SimulationConfig
    _check_alpha(args.alpha)
    return SimulationConfig(sym=_sym(args.alpha), T=args.T, h=args.h,
                            paths=args.paths, seed=args.seed)


def cmd_simulate(args):
    from .enhanced_drift import sample_white_noise
    from .mcsim import euler_maruyama, mollify_drift
    _check_pow2(args.n_modes, "n_modes")
    cfg = _sim_config(args)
    grid = FourierGrid(args.n_modes, 1)
    drift = None
    if args.level > 0:
        xi = sample_white_noise(args.seed, args.level, grid)
        drift = mollify_drift(xi, args.level, times=uniform_times(args.T, 2))
    record = [args.T / 4.0, args.T / 2.0, args.T]
    positions, _, _ = euler_maruyama(cfg, drift, record)
    rows = [{"t": t, "mean": float(np.mean(positions[t])),
             "std": float(np.std(positions[t])),
             "q05": float(np.quantile(positions[t], 0.05)),
             "q95": float(np.quantile(positions[t], 0.95))} for t in record]
    report = {"alpha": args.alpha, "T": args.T, "h": args.h,
              "paths": args.paths, "level": args.level, "rows": rows}

    def draw(ax):
        ax.hist(positions[args.T], bins=80, density=True)
        ax.set_xlabel("X_T")
        ax.set_ylabel("density")

    return report, rows, ["t", "mean", "std", "q05", "q95"], draw, True


def _free_solution(grid, sym, T, m):
    terminal = PeriodicField.pure_mode(grid, 1, amplitude=1.0, real=True)
    times = uniform_times(T, m)
    coeffs = np.stack([semigroup_apply(sym, T - t, terminal).coeffs
                       for t in times])
    return TimeField(grid, times, coeffs, real=True)


def cmd_martingale_test(args):
    from .enhanced_drift import EnhancedDrift
    from .mcsim import martingale_test
    from .pde import BackwardData, default_theta, solve_young
    _check_pow2(args.n_modes, "n_modes")
    _require(args.mode in ("free", "matched", "negative"), "mode", args.mode,
             "set {'free', 'matched', 'negative'}")
    cfg = _sim_config(args)
    grid = FourierGrid(args.n_modes, 1)
    sym = cfg.sym
    T = args.T
    pairs = [(T / 4.0, T / 2.0), (T / 2.0, T)]
    f = None
    drift = None
    if args.mode == "free":
        u = _free_solution(grid, sym, T, 64)
    else:
        beta = 0.4
        times = uniform_times(T, 64)
        drift = _smooth_drift(grid, times, beta, args.seed + 1, kmax=4,
                              scale=0.5)
        enh = EnhancedDrift((drift,), None, beta, args.alpha)
        f = TimeField.constant_in_time(
            PeriodicField.pure_mode(grid, 2, amplitude=0.3, real=True), times)
        data = BackwardData(PeriodicField.pure_mode(grid, 1, amplitude=1.0,
                                                    real=True),
                            T, theta=default_theta(beta, args.alpha, rough=False),
                            f=f)
        u = solve_young(enh, data, sym, m=64)
        if args.mode == "negative":
            bad = u.coeffs.copy()
            bad[:, 0] += 0.25 * u.times
            u = TimeField(grid, u.times, bad, real=True)
    rep = martingale_test(u, f, cfg, drift, pairs)
    want_fail = args.mode == "negative"
    passed = (rep.max_sigmas() >= 5.0) if want_fail else rep.passed
    report = {"mode": args.mode, "alpha": args.alpha, "paths": args.paths,
              "h": args.h, "T": T, "rows": rep.rows,
              "max_sigmas": rep.max_sigmas(),
              "expected": "defect >= 5 SE" if want_fail else "all within 3 SE"}

    def draw(ax):
        idx = np.arange(len(rep.rows))
        ax.errorbar(idx, [r["estimate"] for r in rep.rows],
                    yerr=[3 * r["se"] for r in rep.rows], fmt="o")
        ax.axhline(0.0, color="k", lw=0.5)
        ax.set_xlabel("(pair, functional) index")
        ax.set_ylabel("defect estimate (3 SE bars)")

    return report, rep.rows, ["r", "t", "functional", "estimate", "se",
                              "sigmas", "pass"], draw, passed


def cmd_moment_scaling(args):
    from .enhanced_drift import sample_white_noise
    from .mcsim import drift_moment_scaling, mollify_drift
    from .pde import default_theta
    _check_pow2(args.n_modes, "n_modes")
    _require(args.rho in (2, 4), "rho", args.rho, "set {2, 4}")
    cfg = _sim_config(args)
    grid = FourierGrid(args.n_modes, 1)
    ts = sorted({round(t / cfg.h) * cfg.h
                 for t in np.geomspace(args.T / 64.0, args.T, 9)})
    theta = default_theta(-0.55, args.alpha, rough=True)
    threshold = theta * args.rho / args.alpha - 0.15
    rows_all, slopes = [], {}
    for n in args.levels:
        xi = sample_white_noise(args.seed, n, grid)
        drift = mollify_drift(xi, n, times=uniform_times(args.T, 2))
        r = drift_moment_scaling(cfg, drift, args.rho, ts)
        slopes[n] = r["slope"]
        rows_all += [{"level": n, **row} for row in r["rows"]]
    passed = all(s >= threshold for s in slopes.values())
    report = {"alpha": args.alpha, "rho": args.rho, "theta": theta,
              "threshold": threshold,
              "slopes": {str(k): v for k, v in slopes.items()},
              "levels": list(args.levels), "rows": rows_all}

    def draw(ax):
        for n in args.levels:
            sub = [r for r in rows_all if r["level"] == n]
            ax.loglog([r["gap"] for r in sub], [r["moment"] for r in sub],
                      "o-", ms=3, label=f"n={n} ({slopes[n]:.2f})")
        ax.set_xlabel("t - r")
        ax.set_ylabel(f"E|drift integral|^{args.rho}")
        ax.legend(fontsize=8)

    return report, rows_all, ["level", "gap", "moment", "se"], draw, passed


def cmd_brox_demo(args):
    from .mcsim import brox_demo
    _check_alpha(args.alpha)
    rep = brox_demo(args.seed, args.alpha, n_modes=args.n_modes,
                    m_times=args.m, paths=args.paths, h=args.h,
                    levels=tuple(args.levels), T=args.T)
    rows = []
    for n in sorted(rep["level_reports"]):
        lr = rep["level_reports"][n]
        rows.append({"level": n, "flat_pass": lr["flat_pass"],
                     "flat_max_sigmas": lr["flat_max_sigmas"],
                     "cos_defect": lr["cos_defect"],
                     "cos_max_sigmas": lr["cos_max_sigmas"]})
    slim = dict(rep)
    slim["level_reports"] = {
        str(n): {k: v for k, v in lr.items() if not k.endswith("_rows")}
        for n, lr in rep["level_reports"].items()}

    def draw(ax):
        ks_rows = rep["marginals"]["rows"]
        labels = [f"{r['n_low']}->{r['n_high']}@t={r['t']:g}" for r in ks_rows]
        ax.bar(range(len(ks_rows)), [r["ks_distance"] for r in ks_rows])
        ax.set_xticks(range(len(ks_rows)), labels, rotation=60, fontsize=7)
        ax.set_ylabel("KS distance between levels")

    return slim, rows, ["level", "flat_pass", "flat_max_sigmas", "cos_defect",
                        "cos_max_sigmas"], draw, rep["passed"]


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="parastable",
        description="spectral paracontrolled solver and Monte Carlo "
                    "verification harnesses for singular-drift stable SDEs")
    p.add_argument("--list", action="store_true", help="list commands and exit")
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", type=str, default="parastable-out")
        sp.add_argument("--quiet", action="store_true")

    sp = sub.add_parser("schauder-probe")
    common(sp)
    sp.add_argument("--alpha", type=float, default=1.8)
    sp.add_argument("--which", default="all",
                    choices=["all", "p_gain", "p_id", "j_space", "j_time"])
    sp.add_argument("--n-modes", type=int, default=512)
    sp.add_argument("--beta", type=float, default=0.3)
    sp.add_argument("--vartheta", type=float, default=0.8)

    sp = sub.add_parser("paraproduct-probe")
    common(sp)
    sp.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256, 512])
    sp.add_argument("--n-seeds", type=int, default=50)
    sp.add_argument("--theta", type=float, default=0.7)
    sp.add_argument("--beta", type=float, default=-0.4)

    sp = sub.add_parser("commutator-probe")
    common(sp)
    sp.add_argument("--alpha", type=float, default=1.8)
    sp.add_argument("--which", default="semigroup", choices=["jt", "semigroup"])
    sp.add_argument("--n-seeds", type=int, default=20)
    sp.add_argument("--n-halvings", type=int, default=3)

    for name in ("solve-young", "solve-rough"):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--alpha", type=float,
                        default=1.8 if name == "solve-young" else 1.9)
        sp.add_argument("--beta", type=float, default=0.4)
        sp.add_argument("--n-modes", type=int, default=128)
        sp.add_argument("--m", type=int,
                        default=256 if name == "solve-young" else 192)
        sp.add_argument("--T", type=float, default=0.5)
        sp.add_argument("--kmax", type=int, default=4)
        sp.add_argument("--drift-scale", type=float, default=0.5)
        sp.add_argument("--free", action="store_true",
                        help="solve with V = 0 (free snapshots)")

    sp = sub.add_parser("lift-white-noise")
    common(sp)
    sp.add_argument("--alpha", type=float, default=1.9)
    sp.add_argument("--n", type=int, default=32)
    sp.add_argument("--n-modes", type=int, default=128)
    sp.add_argument("--T", type=float, default=1.0)

    sp = sub.add_parser("chaos-oracle")
    common(sp)
    sp.add_argument("--alpha", type=float, default=1.9)
    sp.add_argument("--n", type=int, default=32)
    sp.add_argument("--j", type=int, default=5)
    sp.add_argument("--s", type=float, default=0.0)
    sp.add_argument("--t", type=float, default=0.5)
    sp.add_argument("--T", type=float, default=1.0)

    sp = sub.add_parser("stable-check")
    common(sp)
    sp.add_argument("--alpha", type=float, default=1.9)
    sp.add_argument("--samples", type=int, default=100000)

    sp = sub.add_parser("campbell-check")
    common(sp)
    sp.add_argument("--alpha", type=float, default=0.9)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--lam", type=float, default=-0.5)
    sp.add_argument("--dt", type=float, default=0.3)
    sp.add_argument("--intensity", type=float, default=1.0)
    sp.add_argument("--cutoff", type=float, default=1.0)
    sp.add_argument("--inner", type=float, default=0.05)
    sp.add_argument("--draws", type=int, default=100000)

    def sim_common(sp):
        sp.add_argument("--alpha", type=float, default=1.9)
        sp.add_argument("--T", type=float, default=1.0)
        sp.add_argument("--h", type=float, default=1.0 / 256.0)
        sp.add_argument("--paths", type=int, default=20000)
        sp.add_argument("--n-modes", type=int, default=64)

    sp = sub.add_parser("simulate")
    common(sp)
    sim_common(sp)
    sp.add_argument("--level", type=int, default=0,
                    help="white-noise drift truncation (0 = free)")

    sp = sub.add_parser("martingale-test")
    common(sp)
    sim_common(sp)
    sp.add_argument("--mode", default="free",
                    choices=["free", "matched", "negative"])

    sp = sub.add_parser("moment-scaling")
    common(sp)
    sim_common(sp)
    sp.set_defaults(n_modes=256, T=1.0 / 2048.0, h=1.0 / (2048.0 * 256.0))
    sp.add_argument("--rho", type=int, default=2)
    sp.add_argument("--levels", type=int, nargs="+", default=[16, 32, 64])

    sp = sub.add_parser("brox-demo")
    common(sp)
    sp.add_argument("--alpha", type=float, default=1.9)
    sp.add_argument("--n-modes", type=int, default=128)
    sp.add_argument("--m", type=int, default=64)
    sp.add_argument("--T", type=float, default=1.0)
    sp.add_argument("--h", type=float, default=1.0 / 256.0)
    sp.add_argument("--paths", type=int, default=4000)
    sp.add_argument("--levels", type=int, nargs="+", default=[8, 16, 32])
    return p


_DISPATCH = {
    "schauder-probe": cmd_schauder_probe,
    "paraproduct-probe": cmd_paraproduct_probe,
    "commutator-probe": cmd_commutator_probe,
    "solve-young": cmd_solve_young,
    "solve-rough": cmd_solve_rough,
    "lift-white-noise": cmd_lift_white_noise,
    "chaos-oracle": cmd_chaos_oracle,
    "stable-check": cmd_stable_check,
    "campbell-check": cmd_campbell_check,
    "simulate": cmd_simulate,
    "martingale-test": cmd_martingale_test,
    "moment-scaling": cmd_moment_scaling,
    "brox-demo": cmd_brox_demo,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.list:
        for name in COMMANDS:
            print(name)
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        report, rows, columns, draw, passed = _DISPATCH[args.command](args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    # the output directory is plumbing, not configuration: reports must be
    # byte-identical wherever they are written
    config = {k: v for k, v in sorted(vars(args).items())
              if k not in ("command", "quiet", "list", "out") and v is not None}
    report = {"command": args.command, "config": config,
              "passed": bool(passed), **report}
    name = args.command.replace("-", "_")
    result = write_report(args.out, name, report, rows=rows, columns=columns)
    if draw is not None:
        render_figure(args.out, name, draw)
    if not args.quiet:
        status = "PASS" if passed else "FAIL"
        print(f"{args.command}: {status} hash={result['hash'][:16]} "
              f"out={args.out}")
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
