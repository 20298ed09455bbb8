"""The acceptance suite: twelve end-to-end criteria at fixed tolerances.

Every criterion is a function of a :class:`Suite`, which owns the expensive
shared objects (PDE fields, 1D profiles) and the problem sizes. ``quick``
shrinks replica counts and coarsens grids; tolerances never change.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from . import asymptotics as asy
from . import potential as pot
from .bbm_sim import SimConfig
from .martingales import martingale_trajectory
from .pde_2d import (C_STAR, Domain, Field2D, march_to_steady, pin_field, residual, rotated_speed,
                     speed_of, stationarity_check, subsolution_check)
from .wave_mc import estimate_extinction, pinned_phi_grid
from .waves_1d import (fit_tail_constant, solve_steady_phi, solve_wave_1d, tail_log_slope)

SQRT2 = math.sqrt(2.0)
SUPER_LM = (1.0, 0.5)
VANISH_LM = (1.5, 0.5)  # lambda^2 + mu^2 = 2.5
PROBE_X = (-2.0, -1.0, 0.0, 1.0, 2.0)
PROBE_Y = (1.0, 2.0, 3.0, 5.0, 8.0)
ENLARGE_H = 0.1  # domain-enlargement comparison is always made at this spacing


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    lines: list = field(default_factory=list)
    seconds: float = 0.0

    def summary(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d}: {self.name} ({self.seconds:.1f} s)"


def monotone_signs(values: np.ndarray) -> tuple[float, float]:
    """(max of x-differences, min of y-differences) away from the bottom row and side columns."""
    dx = np.diff(values, axis=1)[1:-1]
    dy = np.diff(values[:, 1:-1], axis=0)
    return float(dx.max()), float(dy.min())


class Suite:
    def __init__(self, quick: bool = False, seed: int = 20240601):
        self.quick = quick
        self.seed = seed
        self.h = 0.1 if quick else 0.05
        self.h_coarse = 0.2 if quick else 0.1
        self.n_mean = 10_000 if quick else 100_000
        self.n_median = 400 if quick else 2000
        self.n_ext = 2000 if quick else 20_000
        self.n_probe = 2000 if quick else 20_000
        self.n_coupled = 10_000
        self._fields: dict = {}

    # shared objects ---------------------------------------------------------

    @cached_property
    def phi(self):
        return solve_steady_phi()

    @cached_property
    def w_star(self):
        return solve_wave_1d(C_STAR)

    @cached_property
    def tail(self):
        return fit_tail_constant(self.w_star)

    def critical(self, h: float, x_hi: float = 25.0, y_hi: float = 40.0) -> Field2D:
        key = (h, x_hi, y_hi)
        if key not in self._fields:
            self._fields[key] = march_to_steady(C_STAR, Domain(x_hi=x_hi, y_hi=y_hi, hx=h, hy=h))
        return self._fields[key]

    @property
    def field(self) -> Field2D:
        return self.critical(self.h)

    @property
    def field_coarse(self) -> Field2D:
        return self.critical(self.h_coarse)

    @property
    def field_enlarged(self) -> Field2D:
        return self.critical(ENLARGE_H, 30.0, 50.0)

    @cached_property
    def field_super(self) -> Field2D:
        dom = Domain(x_lo=-10.0, x_hi=35.0, y_hi=40.0, hx=self.h, hy=self.h)
        return march_to_steady(speed_of(*SUPER_LM), dom, lam_mu=SUPER_LM)

    # criteria ---------------------------------------------------------------

    def c1_martingale_means(self, r: CriterionResult):
        cfg = SimConfig(origin_y=1.0, horizon_T=2.0, checkpoint_times=(1.0, 2.0), seed=self.seed)
        tr = martingale_trajectory(cfg, alphas=(2.0,), lam_mu=(SUPER_LM,), replicas=self.n_mean)
        targets = [("W", None, 1.0), ("Z", None, 0.0), ("Z_alpha", 2.0, 2.0), ("W_lm", SUPER_LM, math.sinh(0.5))]
        ok = True
        for name, key, target in targets:
            v = tr.values(name, key)
            for c, t in enumerate(tr.times):
                m = float(v[:, c].mean())
                se = float(v[:, c].std(ddof=1) / math.sqrt(v.shape[0]))
                good = abs(m - target) <= 4 * se
                ok &= good
                r.lines.append(f"{name}{'' if key is None else key} T={t:g}: mean {m:.5f} target {target:.5f} "
                               f"|d|/SE {abs(m - target) / se:.2f} {'ok' if good else 'BAD'}")
        return ok

    def c2_vanishing(self, r: CriterionResult):
        Ts = (2.0, 4.0, 6.0, 8.0)
        cfg = SimConfig(origin_y=1.0, horizon_T=8.0, checkpoint_times=Ts, seed=self.seed + 2)
        tr = martingale_trajectory(cfg, lam_mu=(VANISH_LM,), replicas=self.n_median)
        ok = True
        for name, key in (("W", None), ("W_lm", VANISH_LM)):
            med = np.median(tr.values(name, key), axis=0)
            good = bool(np.all(np.diff(med) < 0))
            ok &= good
            r.lines.append(f"median {name}{'' if key is None else key} over T={Ts}: "
                           + ", ".join(f"{m:.4g}" for m in med) + (" decreasing" if good else " NOT decreasing"))
        return ok

    def c3_extinction(self, r: CriterionResult):
        est = estimate_extinction(1.0, 8.0, self.n_ext, seed=self.seed + 3)
        target = 1.0 - float(self.phi(1.0))
        tol = max(3 * est.std_error, 0.01)
        r.lines.append(f"extinction {est.value:.5f} +- {est.std_error:.5f}, 1 - phi(1) = {target:.5f}, "
                       f"|d| = {abs(est.value - target):.5f}, tol {tol:.5f}")
        return abs(est.value - target) <= tol

    def c4_one_d(self, r: CriterionResult):
        slope = float(self.phi.derivative[0])
        e1 = abs(slope - math.sqrt(2.0 / 3.0))
        w2 = solve_wave_1d(2.0, x_range=(-40.0, 60.0))
        rate = tail_log_slope(w2, (20.0, 40.0))
        e2 = abs(rate / (2 - SQRT2) - 1)
        k1 = self.tail.K_star
        k2 = fit_tail_constant(self.w_star, (10.0, 20.0)).K_star
        e3 = abs(k2 / k1 - 1)
        r.lines += [f"phi'(0) = {slope:.10f}, sqrt(2/3) = {math.sqrt(2 / 3):.10f}, |d| = {e1:.2e} (tol 1e-4)",
                    f"c=2 tail rate {rate:.6f} vs 2 - sqrt2 = {2 - SQRT2:.6f}, rel {e2:.2e} (tol 2e-2)",
                    f"K* windows (12,22) {k1:.5f}, (10,20) {k2:.5f}, rel {e3:.2e} (tol 1e-2)"]
        return e1 <= 1e-4 and e2 <= 0.02 and e3 <= 0.01

    def c5_wave(self, r: CriterionResult):
        f = self.field
        own = residual(f)
        dxm, dym = monotone_signs(f.values)
        s1 = stationarity_check(f, C_STAR, 1.0)
        s2 = stationarity_check(f, 1.8, 1.0)
        r.lines += [f"grid {f.nx}x{f.ny}, h={f.hx}: residual sup {own.sup:.2e} (tol 1e-5)",
                    f"max dx Psi {dxm:.2e} (< 0), min dy Psi {dym:.2e} (> 0)",
                    f"stationarity drift at sqrt2 {s1:.2e} (tol 5e-3), at 1.8 {s2:.2e} (ratio {s2 / max(s1, 1e-300):.3g})"]
        return own.sup < 1e-5 and dxm < 0 and dym > 0 and s1 < 5e-3 and s2 >= 10 * s1

    def c6_mc_vs_pde(self, r: CriterionResult):
        grid = pinned_phi_grid(PROBE_X, PROBE_Y, T=8.0, alpha=8.0, replicas=self.n_probe, seed=self.seed + 6)
        fine, coarse = pin_field(self.field), pin_field(self.field_coarse)
        ok = True
        worst = (0.0, None)
        for j, y in enumerate(PROBE_Y):
            for i, x in enumerate(PROBE_X):
                p = float(fine(x, y))
                disc = abs(p - float(coarse(x, y)))
                d = abs(grid.value[j, i] - p)
                tol = max(3 * grid.std_error[j, i], 2 * disc)
                if d > tol:
                    ok = False
                if d / tol > worst[0]:
                    worst = (d / tol, (x, y, grid.value[j, i], grid.std_error[j, i], p, disc))
        x, y, v, se, p, disc = worst[1]
        r.lines.append(f"pin: MC x_pin {grid.pin:.4f} +- {grid.pin_se:.4f}; replicas {grid.replicas}, T=8")
        r.lines.append(f"worst probe (x={x:g}, y={y:g}): MC {v:.4f} +- {se:.4f}, PDE {p:.4f}, "
                       f"disc {disc:.1e}, |d|/tol {worst[0]:.2f}")
        diffs = grid.value - np.array([[float(fine(x, y)) for x in PROBE_X] for y in PROBE_Y])
        r.lines.append("MC - PDE by row y=" + ",".join(f"{y:g}" for y in PROBE_Y) + ": "
                       + " | ".join(" ".join(f"{d:+.3f}" for d in row) for row in diffs))
        return ok

    def c7_log_shift(self, r: CriterionResult):
        rep = asy.log_shift_sequence(self.field, self.w_star, (8.0, 16.0, 32.0))
        r.lines += [f"frozen shift {rep.shift:.5f}; errors " + ", ".join(f"{e:.2e}" for e in rep.errors),
                    "control errors " + ", ".join(f"{e:.3f}" for e in rep.control_errors)]
        return rep.decreasing and rep.errors[-1] < 0.05 and not rep.control_decreasing

    def _tail(self, f: Field2D):
        s = asy.fit_log_shift(f, self.w_star, 32.0)
        return asy.tail_expansion_check(f, self.tail.K_star, s)

    def c8_tail(self, r: CriterionResult):
        a, b = self._tail(self.field), self._tail(self.field_coarse)
        d, c = self._tail(self.critical(ENLARGE_H)), self._tail(self.field_enlarged)
        e_ref = abs(b.sup_E / a.sup_E - 1)
        e_dom = abs(c.sup_E / d.sup_E - 1)
        grows = c.sup_control > d.sup_control and all(
            q > p for p, q in zip(a.control_nested, a.control_nested[1:]))
        r.lines += [f"sup|E|: h={self.h} {a.sup_E:.4f}, h={self.h_coarse} {b.sup_E:.4f} (rel {e_ref:.3f}); "
                    f"h={ENLARGE_H} default {d.sup_E:.4f}, enlarged {c.sup_E:.4f} (rel {e_dom:.3f}); tol 0.15",
                    f"control sup: default {d.sup_control:.4f} -> enlarged {c.sup_control:.4f}; "
                    f"over radii {a.radius_caps}: " + ", ".join(f"{v:.3f}" for v in a.control_nested),
                    "sup|E| over the same radii: " + ", ".join(f"{v:.3f}" for v in a.sup_E_nested)]
        return e_ref <= 0.15 and e_dom <= 0.15 and grows

    def c9_rotated(self, r: CriterionResult):
        lam, mu = SUPER_LM
        c_t = rotated_speed(lam, mu)
        w = solve_wave_1d(c_t, x_range=(-40.0, 30.0))
        rep = asy.rotated_supercritical_check(self.field_super, lam, mu, w, (8.0, 16.0, 32.0))
        r.lines += [f"c(lambda, mu) = {c_t:.6f} (expected 1.45344)",
                    "errors at y=8,16,32: " + ", ".join(f"{e:.2e}" for e in rep.errors)]
        return rep.decreasing and abs(c_t - 1.45344) < 1e-5

    def c10_coupled(self, r: CriterionResult):
        rows = asy.coupled_Z_over_y((2.0, 8.0, 32.0), T=6.0, replicas=self.n_coupled, seed=self.seed + 10)
        ok = True
        for row in rows[:2]:
            good = abs(row.slope - row.y) <= 4 * row.se_slope
            ok &= good
            r.lines.append(f"y={row.y:g}: slope {row.slope:.3f} +- {row.se_slope:.3f} (target {row.y:g}) "
                           f"{'ok' if good else 'BAD'}")
        l2 = [row.l2 for row in rows]
        dec = all(b < a for a, b in zip(l2, l2[1:]))
        ok &= dec
        r.lines.append("L2 of Z/y - D over y=2,8,32: " + ", ".join(f"{v:.4g}" for v in l2))
        rep = asy.coupled_W_supercritical(*SUPER_LM, (2.0, 8.0), T=6.0, replicas=self.n_coupled,
                                          seed=self.seed + 11)
        for row in rep.rows:
            good = abs(row.mean_gap - row.exact_mean) <= 4 * row.se_gap
            ok &= good
            r.lines.append(f"gap y={row.y:g}: {row.mean_gap:.4f} +- {row.se_gap:.4f}, exact {row.exact_mean:.4f} "
                           f"{'ok' if good else 'BAD'}")
        return ok

    def c11_potential(self, r: CriterionResult):
        rng = np.random.default_rng(self.seed + 11)
        sym = bnd = 0.0
        for _ in range(100):
            z = rng.uniform(0.01, 20, 2)
            x = rng.uniform(0.01, 20, 2)
            sym = max(sym, abs(pot.green_quarter(z, x) - pot.green_quarter(x, z)))
            t = rng.uniform(0, 40)
            bnd = max(bnd, abs(pot.green_quarter(z, (0.0, t))), abs(pot.green_quarter(z, (t, 0.0))))
        hs = (0.2, 0.1, 0.05)
        lap = [pot.green_harmonicity(h=h) for h in hs]
        ratios = [a / b for a, b in zip(lap, lap[1:])]
        eta = pot.eta_check(1000, self.seed)
        regimes = pot.green_asymptotics_check(1000, self.seed)
        pts = [(0.5, 0.5), (1, 1), (1, 2), (2, 2), (2, 4), (5, 5), (5, 10), (20, 20), (20, 40), (40, 40)]
        anh = pot.anharmonic_bound_check(pts, 200)
        amax = max(a.ratio for a in anh)
        dbl = max(max(a.ratio, b.ratio) / min(a.ratio, b.ratio)
                  for a, b in zip(anh, anh[1:]) if a.x == b.x and b.y == 2 * a.y)
        r.lines += [f"Green symmetry {sym:.1e}, boundary {bnd:.1e} (tol 1e-12)",
                    "harmonicity sup|Lap_h G| at h=0.2,0.1,0.05: " + ", ".join(f"{v:.2e}" for v in lap)
                    + " ratios " + ", ".join(f"{q:.2f}" for q in ratios),
                    f"eta round trip {eta.max_roundtrip:.1e} (tol 1e-10), max|eta - varpi| {eta.max_eta_minus_varpi:.3f}",
                    "Green regimes: " + "; ".join(f"{g.regime} [{g.min_ratio:.3g}, {g.max_ratio:.3g}] in {g.bracket}"
                                                  for g in regimes),
                    f"anharmonic ratio max {amax:.3f} (<= {pot.ANHARMONIC_MAX_RATIO}), y-doubling factor {dbl:.4f}, "
                    f"stable {all(a.stable for a in anh)}"]
        return (sym <= 1e-12 and bnd <= 1e-12 and all(q >= 3.5 for q in ratios)
                and eta.max_roundtrip <= 1e-10 and eta.max_eta_minus_varpi <= 2
                and all(g.passed for g in regimes) and amax <= pot.ANHARMONIC_MAX_RATIO and dbl <= 2
                and all(a.stable for a in anh))

    def c12_subsolution(self, r: CriterionResult):
        rep = subsolution_check(0.3, 0.5, h=0.02)
        r.lines.append(f"max violation {rep.max_violation:.2e} at t in "
                       + ", ".join(f"{t:.3f}" for t in rep.times)
                       + f"; max inside support {rep.max_inside:.2e}; outside {rep.max_outside_support:.1e}")
        return rep.max_violation <= 1e-3

    CRITERIA: dict[int, tuple[str, str]] = {
        1: ("martingale means", "c1_martingale_means"),
        2: ("vanishing limits", "c2_vanishing"),
        3: ("extinction vs steady state", "c3_extinction"),
        4: ("1D solvers", "c4_one_d"),
        5: ("2D wave residual, monotonicity, stationarity", "c5_wave"),
        6: ("Monte Carlo vs PDE after pinning", "c6_mc_vs_pde"),
        7: ("logarithmic shift", "c7_log_shift"),
        8: ("tail expansion", "c8_tail"),
        9: ("rotated supercritical limit", "c9_rotated"),
        10: ("coupled limits", "c10_coupled"),
        11: ("potential toolkit", "c11_potential"),
        12: ("subsolution", "c12_subsolution"),
    }

    def run(self, number: int) -> CriterionResult:
        name, meth = self.CRITERIA[number]
        r = CriterionResult(number, name, False)
        t0 = time.perf_counter()
        r.passed = bool(getattr(self, meth)(r))
        r.seconds = time.perf_counter() - t0
        return r

    def run_all(self, numbers=None, echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
        out = []
        for n in numbers or sorted(self.CRITERIA):
            res = self.run(n)
            if echo:
                echo(res.summary())
                for line in res.lines:
                    echo("      " + line)
            out.append(res)
        return out
