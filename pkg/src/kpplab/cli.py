"""Command line entry point ``kpp``.

Each invocation writes into a fresh run directory under ``--output-dir``
(``<subcommand>-NNN``, never reused) and leaves a ``manifest.json`` there with
the argv, the resolved configuration, library versions, the kernel backend,
wall time and a SHA-256 of every artifact.

A ``--config`` TOML file may set any flag of the chosen subcommand (dashes or
underscores); values from the file override the command line.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import io as kio
from . import svg

SQRT2 = math.sqrt(2.0)
CHECKS = ("log-shift", "tail", "tameness", "rotated", "coupled-z", "coupled-w")
POTENTIAL_CHECKS = ("green", "eta", "anharmonic", "harmonicity")


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in str(text).replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _pair(text: str) -> tuple[float, float]:
    v = _floats(text)
    if len(v) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}")
    return (v[0], v[1])


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output-dir", default="runs")
    g.add_argument("--threads", type=int, default=None, help="worker threads (also KPP_THREADS)")
    g.add_argument("--config", default=None, help="TOML file; its keys override flags")
    g.add_argument("--svg", action="store_true", help="also render SVG plots")

    p = argparse.ArgumentParser(prog="kpp", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"kpplab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def bbm_flags(sp, replicas):
        sp.add_argument("--y0", type=float, default=1.0, help="starting height")
        sp.add_argument("--x0", type=float, default=0.0)
        sp.add_argument("--T", type=float, default=2.0, help="horizon")
        sp.add_argument("--checkpoints", type=_floats, default=None, help="comma-separated times <= T")
        sp.add_argument("--dt-max", type=float, default=0.01)
        sp.add_argument("--replicas", type=int, default=replicas)
        sp.add_argument("--no-killing", action="store_true")
        sp.add_argument("--population-cap", type=int, default=5_000_000)

    sp = sub.add_parser("simulate", parents=[common], help="BBM snapshots")
    bbm_flags(sp, 1)

    sp = sub.add_parser("martingales", parents=[common], help="martingale series along BBM paths")
    bbm_flags(sp, 200)
    sp.add_argument("--alpha", type=float, action="append", default=None, help="shaving level (repeatable)")
    sp.add_argument("--lam-mu", type=_pair, action="append", default=None, help="'lambda,mu' (repeatable)")

    sp = sub.add_parser("mc-wave", parents=[common], help="Monte Carlo wave on a probe grid")
    sp.add_argument("--x", type=_floats, default=[-2.0, -1.0, 0.0, 1.0, 2.0])
    sp.add_argument("--y", type=_floats, default=[1.0, 2.0, 3.0, 5.0, 8.0])
    sp.add_argument("--T", type=float, default=8.0)
    sp.add_argument("--replicas", type=int, default=2000)
    sp.add_argument("--alpha", type=float, default=8.0)
    sp.add_argument("--lam", type=float, default=None, help="supercritical lambda (needs --mu)")
    sp.add_argument("--mu", type=float, default=None)

    sp = sub.add_parser("ode-1d", parents=[common], help="1D wave of speed c, or the steady profile")
    sp.add_argument("--c", type=float, default=SQRT2)
    sp.add_argument("--steady", action="store_true", help="solve the steady half-line profile instead")
    sp.add_argument("--x-range", type=_pair, default=(-40.0, 30.0))
    sp.add_argument("--h", type=float, default=0.005)

    sp = sub.add_parser("fit-tail", parents=[common], help="fit K, a in the critical tail")
    sp.add_argument("--window", type=_pair, default=(12.0, 22.0))
    sp.add_argument("--profile", default=None, help="profile CSV from ode-1d (default: solve it)")

    sp = sub.add_parser("pde-wave", parents=[common], help="2D traveling wave by Newton continuation")
    sp.add_argument("--c", type=float, default=None, help="frame speed (default sqrt2 or from lambda, mu)")
    sp.add_argument("--lam", type=float, default=None)
    sp.add_argument("--mu", type=float, default=None)
    sp.add_argument("--x-lo", type=float, default=-10.0)
    sp.add_argument("--Lx", type=float, default=35.0, help="domain length in x")
    sp.add_argument("--Ly", type=float, default=40.0, help="domain height")
    sp.add_argument("--h", type=float, default=0.1)
    sp.add_argument("--order", type=int, choices=(2, 4), default=4)
    sp.add_argument("--left-bc", choices=("capped", "phi"), default="capped")
    sp.add_argument("--right-bc", choices=("far-field", "zero"), default="far-field")
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = sub.add_parser("verify", parents=[common], help="asymptotic checks on a 2D field")
    sp.add_argument("--check", choices=CHECKS, required=True)
    sp.add_argument("--field", default=None, help="field CSV from pde-wave (default: solve one)")
    sp.add_argument("--h", type=float, default=0.1)
    sp.add_argument("--lam", type=float, default=1.0)
    sp.add_argument("--mu", type=float, default=0.5)
    sp.add_argument("--T", type=float, default=6.0)
    sp.add_argument("--replicas", type=int, default=10_000)
    sp.add_argument("--ys", type=_floats, default=None)

    sp = sub.add_parser("potential", parents=[common], help="quarter-plane potential checks")
    sp.add_argument("--check", choices=POTENTIAL_CHECKS, required=True)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--quadrature-n", type=int, default=200)
    sp.add_argument("--h", type=_floats, default=[0.2, 0.1, 0.05])

    sp = sub.add_parser("accept", parents=[common], help="run the acceptance suite")
    sp.add_argument("--quick", action="store_true")
    sp.add_argument("--criteria", type=lambda s: [int(v) for v in _floats(s)], default=None)
    return p


def _load_config(path: str) -> dict:
    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    """Overlay TOML keys onto ``args``; unknown keys are a usage error."""
    if not args.config:
        return {}
    cfg = _load_config(args.config)
    section = cfg.get(args.command, {}) if isinstance(cfg.get(args.command), dict) else {}
    flat = {k: v for k, v in cfg.items() if not isinstance(v, dict)}
    flat.update(section)
    known = vars(args)
    for key, val in flat.items():
        dest = key.replace("-", "_")
        if dest not in known or dest in ("command", "config"):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        if isinstance(val, list) and dest in ("lam_mu",):
            val = [tuple(float(t) for t in v) for v in val]
        setattr(args, dest, val)
    return flat


# --------------------------------------------------------------------------
# run directories and manifest


def new_run_dir(base: str, command: str) -> Path:
    root = Path(base)
    root.mkdir(parents=True, exist_ok=True)
    k = 1
    while True:
        d = root / f"{command}-{k:03d}"
        try:
            d.mkdir()
            return d
        except FileExistsError:
            k += 1


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _versions() -> dict:
    import scipy

    from ._backend import BACKEND
    return dict(kpplab=__version__, python=platform.python_version(), numpy=np.__version__,
                scipy=scipy.__version__, backend=BACKEND)


def write_manifest(run: Path, argv, args, cfg: dict, seconds: float, status: int) -> Path:
    conf = {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(vars(args).items())}
    arts = {p.name: _sha256(p) for p in sorted(run.iterdir()) if p.is_file() and p.name != "manifest.json"}
    man = dict(command=args.command, argv=list(argv), config=conf, config_file=cfg,
               versions=_versions(), threads=int(os.environ.get("KPP_THREADS", "1")),
               wall_time_s=round(seconds, 3), exit_status=status, artifacts=arts)
    path = run / "manifest.json"
    path.write_text(json.dumps(man, indent=2, default=str) + "\n")
    return path


# --------------------------------------------------------------------------
# subcommands; each returns an exit status


def _sim_config(a):
    from .bbm_sim import SimConfig
    return SimConfig(origin_y=a.y0, origin_x=a.x0, horizon_T=a.T,
                     checkpoint_times=tuple(a.checkpoints) if a.checkpoints else None,
                     dt_max=a.dt_max, killing_enabled=not a.no_killing,
                     population_cap=a.population_cap, seed=a.seed)


def cmd_simulate(a, run: Path, out) -> int:
    from .bbm_sim import map_replicas, simulate_replica

    cfg = _sim_config(a)
    snaps = map_replicas(lambda r: simulate_replica(cfg, r), a.replicas)
    rows = (row for r, ss in enumerate(snaps) for row in kio.snapshot_rows(ss, r))
    kio.write_csv(run / "snapshots.csv", kio.SNAPSHOT_HEADER, rows)
    for r, ss in enumerate(snaps):
        out(f"replica {r}: " + ", ".join(f"t={s.t:g} n={len(s)}" for s in ss))
    if a.svg:
        series = [(f"replica {r}", [s.t for s in ss], [len(s) for s in ss]) for r, ss in enumerate(snaps[:6])]
        (run / "population.svg").write_text(svg.line_plot(series, "population size", "t", "particles"))
    return 0


def cmd_martingales(a, run: Path, out) -> int:
    from .martingales import martingale_trajectory, trajectory_rows

    tr = martingale_trajectory(_sim_config(a), alphas=tuple(a.alpha or ()),
                               lam_mu=tuple(tuple(p) for p in (a.lam_mu or ())), replicas=a.replicas)
    kio.write_csv(run / "series.csv", kio.SERIES_HEADER, trajectory_rows(tr))
    summ = tr.summary()
    kio.write_csv(run / "summary.csv", kio.SUMMARY_HEADER, ([s[k] for k in kio.SUMMARY_HEADER] for s in summ))
    for s in summ:
        if s["t"] == tr.times[-1]:
            out(f"{s['quantity']}{s['param'] and '(' + s['param'] + ')'} t={s['t']:g}: "
                f"mean {s['mean']:.5g} +- {s['se']:.2g}, median {s['median']:.5g}")
    if a.svg:
        series = [(q, list(tr.times), [s["mean"] for s in summ if s["quantity"] == q and not s["param"]])
                  for q in ("W", "Z", "A", "D")]
        (run / "means.svg").write_text(svg.line_plot(series, "martingale means", "t", "mean"))
    return 0


def cmd_mc_wave(a, run: Path, out) -> int:
    from .wave_mc import estimate_phi, estimate_phi_supercritical

    if (a.lam is None) != (a.mu is None):
        raise UsageError("--lam and --mu go together")
    rows = []
    for y in a.y:
        if a.lam is None:
            ests = estimate_phi(np.asarray(a.x), y, T=a.T, alpha=a.alpha, replicas=a.replicas, seed=a.seed)
        else:
            ests = estimate_phi_supercritical(np.asarray(a.x), y, a.lam, a.mu, T=a.T,
                                              replicas=a.replicas, seed=a.seed)
        for x, e in zip(a.x, ests):
            rows.append((x, y, e.value, e.std_error, e.replicas, e.horizon_T, a.alpha if a.lam is None else ""))
            out(f"x={x:g} y={y:g}: {e.value:.5f} +- {e.std_error:.5f}")
    kio.write_csv(run / "probe.csv", kio.PROBE_HEADER, rows)
    if a.svg:
        series = [(f"y={y:g}", [r[0] for r in rows if r[1] == y], [r[2] for r in rows if r[1] == y]) for y in a.y]
        (run / "probe.svg").write_text(svg.line_plot(series, "Monte Carlo wave", "x", "estimate"))
    return 0


def cmd_ode_1d(a, run: Path, out) -> int:
    from .waves_1d import check_speed, phi_residual, solve_steady_phi, solve_wave_1d, wave_steady_residual

    if a.steady:
        prof = solve_steady_phi(h=a.h)
        out(f"steady profile: phi'(0) = {prof.meta.get('slope0', float('nan')):.10f}, "
            f"residual {phi_residual(prof):.2e}")
    else:
        c = check_speed(a.c)
        prof = solve_wave_1d(c, tuple(a.x_range), a.h)
        out(f"wave c={c:.10g}: residual {wave_steady_residual(prof):.2e}")
    kio.write_profile(run / "profile.csv", prof)
    if a.svg:
        (run / "profile.svg").write_text(svg.line_plot([("profile", prof.grid, prof.values)], "profile", "x", "value"))
    return 0


def _read_profile(path):
    from .waves_1d import C_STAR, Profile1D

    d = np.loadtxt(path, delimiter=",", skiprows=1)
    return Profile1D(d[:, 0], d[:, 1], C_STAR, "w(0)=1/2")


def cmd_fit_tail(a, run: Path, out) -> int:
    from .waves_1d import C_STAR, fit_tail_constant, solve_wave_1d

    prof = _read_profile(a.profile) if a.profile else solve_wave_1d(C_STAR)
    fit = fit_tail_constant(prof, tuple(a.window))
    alt_win = (a.window[0] - 2.0, a.window[1] - 2.0)
    alt = fit_tail_constant(prof, alt_win)
    rel = abs(alt.K_star / fit.K_star - 1)
    win = f"{a.window[0]:g}-{a.window[1]:g}"
    rows = [("fit-tail", "K_star", "", fit.K_star, "", True),
            ("fit-tail", "a", "", fit.a, "", True),
            ("fit-tail", f"fit_residual[{win}]", "", fit.fit_residual, "", True),
            ("fit-tail", f"K_star_window_shift[{alt_win[0]:g}-{alt_win[1]:g}]", "", rel, 1e-2, rel <= 1e-2)]
    kio.write_csv(run / "report.csv", kio.REPORT_HEADER, rows)
    out(f"K_* = {fit.K_star:.6f}, a = {fit.a:.4f}, fit residual {fit.fit_residual:.1e}; "
        f"window shifted by -2: K_* = {alt.K_star:.6f} (rel {rel:.1e})")
    return 0 if rows[-1][-1] else 1


def cmd_pde_wave(a, run: Path, out) -> int:
    from .pde_2d import C_STAR, Domain, march_to_steady, residual, speed_of
    from .waves_1d import check_speed

    lam_mu = None
    if (a.lam is None) != (a.mu is None):
        raise UsageError("--lam and --mu go together")
    if a.lam is not None:
        lam_mu = (a.lam, a.mu)
        c = speed_of(*lam_mu)
        if a.c is not None and abs(a.c - c) > 1e-6:
            raise UsageError(f"--c {a.c} does not match the speed {c:.8f} of (lambda, mu)")
    else:
        c = check_speed(a.c if a.c is not None else C_STAR)
    dom = Domain(x_lo=a.x_lo, x_hi=a.x_lo + a.Lx, y_hi=a.Ly, hx=a.h, hy=a.h)
    dom.check()
    t0 = time.perf_counter()
    fld = march_to_steady(c, dom, tol=a.tol, lam_mu=lam_mu, right_bc=a.right_bc, left_bc=a.left_bc,
                          order=a.order)
    res = residual(fld)
    fld.meta.update(residual_sup=res.sup, residual_l2=res.l2, solve_seconds=time.perf_counter() - t0)
    kio.write_field(run / "field.csv", fld)
    out(f"c={c:.10g}, grid {fld.nx}x{fld.ny}: residual sup {res.sup:.2e}, L2 {res.l2:.2e}")
    if a.svg:
        (run / "field.svg").write_text(svg.heatmap(fld.values, fld.x_range, fld.y_range, f"wave c={c:.5g}"))
    return 0


def _critical_field(a, out):
    from .pde_2d import C_STAR, Domain, march_to_steady

    if a.field:
        return kio.read_field(a.field)
    out(f"solving the critical wave at h={a.h}")
    return march_to_steady(C_STAR, Domain(hx=a.h, hy=a.h))


def cmd_verify(a, run: Path, out) -> int:
    from . import asymptotics as asy
    from .pde_2d import C_STAR, Domain, march_to_steady, rotated_speed, speed_of
    from .waves_1d import fit_tail_constant, solve_wave_1d

    rows = []
    chk = a.check
    if chk == "log-shift":
        rep = asy.log_shift_sequence(_critical_field(a, out), solve_wave_1d(C_STAR), a.ys or (8.0, 16.0, 32.0))
        prev = math.inf
        for y, e, ce in zip(rep.ys, rep.errors, rep.control_errors):
            rows.append((chk, "error", y, e, prev, e < prev))
            rows.append((chk, "control_error", y, ce, "", True))
            prev = e
        rows.append((chk, "control_not_decreasing", "", float(rep.control_decreasing), 0, not rep.control_decreasing))
    elif chk == "tail":
        w = solve_wave_1d(C_STAR)
        fld = _critical_field(a, out)
        s = asy.fit_log_shift(fld, w, 32.0)
        rep = asy.tail_expansion_check(fld, fit_tail_constant(w).K_star, s)
        for R, e, ce in zip(rep.radius_caps, rep.sup_E_nested, rep.control_nested):
            rows.append((chk, f"sup_E[r<={R:g}]", "", e, "", True))
            rows.append((chk, f"sup_control[r<={R:g}]", "", ce, "", True))
        grows = all(q > p for p, q in zip(rep.control_nested, rep.control_nested[1:]))
        rows.append((chk, "sup_E", "", rep.sup_E, "", True))
        rows.append((chk, "control_grows", "", float(grows), 1, grows))
    elif chk == "tameness":
        t = asy.tameness_constant(_critical_field(a, out))
        rows.append((chk, f"C[x={t.x:g}]", t.y, t.C, "finite", math.isfinite(t.C)))
    elif chk == "rotated":
        lam, mu = a.lam, a.mu
        fld = kio.read_field(a.field) if a.field else march_to_steady(
            speed_of(lam, mu), Domain(x_lo=-10.0, x_hi=35.0, y_hi=40.0, hx=a.h, hy=a.h), lam_mu=(lam, mu))
        w = solve_wave_1d(rotated_speed(lam, mu))
        rep = asy.rotated_supercritical_check(fld, lam, mu, w, a.ys or (8.0, 16.0, 32.0))
        prev = math.inf
        for y, e in zip(rep.ys, rep.errors):
            rows.append((chk, f"lam={lam:g},mu={mu:g}", y, e, prev, e < prev))
            prev = e
    elif chk == "coupled-z":
        for r in asy.coupled_Z_over_y(a.ys or (2.0, 8.0, 32.0), a.T, a.replicas, a.seed):
            rows.append((chk, "l2", r.y, r.l2, "", True))
            rows.append((chk, "slope", r.y, r.slope, 4 * r.se_slope, abs(r.slope - r.y) <= 4 * r.se_slope))
    elif chk == "coupled-w":
        rep = asy.coupled_W_supercritical(a.lam, a.mu, a.ys or (2.0, 8.0), a.T, a.replicas, a.seed)
        for r in rep.rows:
            rows.append((chk, "mean_gap", r.y, r.mean_gap, 4 * r.se_gap,
                         abs(r.mean_gap - r.exact_mean) <= 4 * r.se_gap))
        rows.append((chk, "monotone_in_y", "", float(rep.monotone_every_replica), 1, rep.monotone_every_replica))
    return _finish_report(run, rows, out)


def _finish_report(run: Path, rows, out) -> int:
    kio.write_csv(run / "report.csv", kio.REPORT_HEADER, rows)
    for r in rows:
        at = f" y={kio.fmt(r[2])}" if r[2] != "" else ""
        out(f"{r[0]} {r[1]}{at}: {r[3]:.6g} (tol {kio.fmt(r[4]) or '-'}) "
            f"{'pass' if r[5] else 'FAIL'}")
    return 0 if all(r[5] for r in rows) else 1


def cmd_potential(a, run: Path, out) -> int:
    from . import potential as pot

    chk = a.check
    if chk == "green":
        ent = [(g.regime, "", v, g.bracket[k], g.passed)
               for g in pot.green_asymptotics_check(a.samples, a.seed)
               for k, v in ((0, g.min_ratio), (1, g.max_ratio))]
    elif chk == "eta":
        e = pot.eta_check(a.samples, a.seed)
        ent = [("roundtrip", "", e.max_roundtrip, 1e-10, e.max_roundtrip <= 1e-10),
               ("eta_minus_varpi", "", e.max_eta_minus_varpi, 2.0, e.max_eta_minus_varpi <= 2.0),
               ("boundary_real", "", e.max_boundary_real, "", True),
               ("inside_lambda", "", float(e.inside_lambda), 1, e.inside_lambda)]
    elif chk == "anharmonic":
        pts = [(0.5, 0.5), (1, 1), (1, 2), (2, 2), (2, 4), (5, 5), (5, 10), (20, 20), (20, 40), (40, 40)]
        ent = [(f"x={r.x:g}", r.y, r.ratio, pot.ANHARMONIC_MAX_RATIO,
                r.ratio <= pot.ANHARMONIC_MAX_RATIO and r.stable)
               for r in pot.anharmonic_bound_check(pts, a.quadrature_n)]
    else:
        hs = sorted(a.h, reverse=True)
        lap = [pot.green_harmonicity(h=h) for h in hs]
        ent = [(f"h={h:g}", "", v, "", True) for h, v in zip(hs, lap)]
        ent += [(f"ratio h={h:g}", "", p / q, 3.5, p / q >= 3.5) for h, p, q in zip(hs[1:], lap, lap[1:])]
    return _finish_report(run, pot.report_rows(chk, ent), out)


def cmd_accept(a, run: Path, out) -> int:
    from .acceptance import Suite

    suite = Suite(quick=a.quick, seed=a.seed or 20240601)
    results = suite.run_all(a.criteria, echo=out)
    out("")
    out(f"{'criterion':>9}  {'status':6}  name")
    for r in results:
        out(f"{r.number:>9}  {'PASS' if r.passed else 'FAIL':6}  {r.name}")
    kio.write_csv(run / "acceptance.csv", ("criterion", "name", "pass", "seconds", "details"),
                  ((r.number, r.name, r.passed, round(r.seconds, 3), " | ".join(r.lines)) for r in results))
    failed = [r.number for r in results if not r.passed]
    out(f"{len(results) - len(failed)}/{len(results)} passed" + (f"; failed: {failed}" if failed else ""))
    return 1 if failed else 0


COMMANDS = {"simulate": cmd_simulate, "martingales": cmd_martingales, "mc-wave": cmd_mc_wave,
            "ode-1d": cmd_ode_1d, "fit-tail": cmd_fit_tail, "pde-wave": cmd_pde_wave,
            "verify": cmd_verify, "potential": cmd_potential, "accept": cmd_accept}


def run(argv=None, out=print) -> int:
    """Parse ``argv``, execute the subcommand, write the manifest; returns the exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return int(exc.code or 0)
    try:
        cfg = apply_config(args, parser)
    except (UsageError, OSError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"kpp: error: {exc}", file=sys.stderr)
        return 2
    if args.threads is not None:
        if args.threads < 1:
            print("kpp: error: --threads must be >= 1", file=sys.stderr)
            return 2
        os.environ["KPP_THREADS"] = str(args.threads)
    run_dir = new_run_dir(args.output_dir, args.command)
    t0 = time.perf_counter()
    try:
        status = COMMANDS[args.command](args, run_dir, out)
    except (UsageError, ValueError) as exc:
        print(f"kpp {args.command}: error: {exc}", file=sys.stderr)
        status = 2
    write_manifest(run_dir, argv, args, cfg, time.perf_counter() - t0, status)
    out(f"outputs in {run_dir}")
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
