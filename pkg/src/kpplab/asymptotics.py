"""Quantitative checks of the asymptotic structure of computed waves.

Field-based checks take a converged :class:`Field2D`; the coupled checks
simulate one whole-plane BBM per replica from (0, 0) and read every height
y off the same tree, keeping the particles whose path stayed above -y.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bbm_sim import SimConfig, map_replicas, simulate_replica
from .martingales import EXP_FLOOR
from .pde_2d import Field2D, rotated_speed
from .waves_1d import Profile1D, fit_shift

SQRT2 = math.sqrt(2.0)
PROBES = np.linspace(-6.0, 10.0, 41)
TOP_FRACTION = 0.8


# --------------------------------------------------------------------------
# level sets


@dataclass
class LevelCurve:
    s: float
    ys: np.ndarray
    sigma: np.ndarray
    skipped: list = field(default_factory=list)

    def slopes(self) -> np.ndarray:
        return np.diff(self.sigma) / np.diff(self.ys)

    def increasing(self) -> bool:
        return bool(np.all(np.diff(self.sigma) > 0))

    def at(self, y: float) -> float:
        return float(np.interp(y, self.ys, self.sigma))


def _crossing(xs: np.ndarray, row: np.ndarray, s: float) -> float | None:
    """x with row(x) = s on a nonincreasing row (bisection, then linear)."""
    if row[0] < s or row[-1] > s:
        return None
    lo, hi = 0, row.size - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if row[mid] >= s:
            lo = mid
        else:
            hi = mid
    a, b = row[lo], row[hi]
    t = 0.0 if a == b else (a - s) / (a - b)
    return float(xs[lo] + t * (xs[hi] - xs[lo]))


def level_set(fld: Field2D, s: float) -> LevelCurve:
    if not 0 < s < 1:
        raise ValueError("level must lie in (0, 1)")
    ys, sig, skipped = [], [], []
    xs = fld.x
    for j in range(1, fld.ny):
        x0 = _crossing(xs, fld.values[j], s)
        if x0 is None:
            skipped.append(float(j * fld.hy))
        else:
            ys.append(j * fld.hy)
            sig.append(x0)
    return LevelCurve(s, np.array(ys), np.array(sig), skipped)


def log_bound_constant(curve: LevelCurve, coef: float = 1.6, window=(10.0, 35.0)) -> float:
    """Smallest C with sigma(y) <= coef log y + C on ``window``."""
    sel = (curve.ys >= window[0]) & (curve.ys <= window[1])
    if not sel.any():
        raise ValueError("no resolved rows in the window")
    return float(np.max(curve.sigma[sel] - coef * np.log(curve.ys[sel])))


# --------------------------------------------------------------------------
# logarithmic shift


def _check_height(fld: Field2D, y: float):
    if y > TOP_FRACTION * fld.y_range[1] + 1e-12:
        raise ValueError(f"y={y} is within the top-boundary margin (> {TOP_FRACTION} y_hi)")


def _slice(fld: Field2D, y: float, use_log: bool, probes=PROBES) -> np.ndarray:
    off = math.log(y) / SQRT2 if use_log else 0.0
    return fld(probes + off, np.full_like(probes, y), outside=np.nan)


def fit_log_shift(fld: Field2D, w: Profile1D, y_fit: float, probes=PROBES) -> float:
    """Shift s with Psi(x + log(y)/sqrt2, y) ~ w(x - s) at y = y_fit (least squares)."""
    _check_height(fld, y_fit)
    target = _slice(fld, y_fit, True, probes)
    ok = np.isfinite(target)
    return fit_shift(w, probes[ok], target[ok])


def log_shift_error(fld: Field2D, w: Profile1D, y: float, shift: float, use_log: bool = True,
                    probes=PROBES) -> float:
    """sup over probes of |Psi(x + log(y)/sqrt2, y) - w(x - shift)| (no log term if not use_log)."""
    _check_height(fld, y)
    vals = _slice(fld, y, use_log, probes)
    ok = np.isfinite(vals)
    if not ok.any():
        raise ValueError("probe slice leaves the computed domain")
    return float(np.max(np.abs(vals[ok] - w(probes[ok] - shift))))


@dataclass(frozen=True)
class LogShiftReport:
    ys: tuple
    shift: float
    errors: tuple
    control_errors: tuple

    @property
    def decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.errors, self.errors[1:]))

    @property
    def control_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.control_errors, self.control_errors[1:]))


def log_shift_sequence(fld: Field2D, w: Profile1D, ys: Sequence[float] = (8.0, 16.0, 32.0)) -> LogShiftReport:
    """Errors with the shift fitted once at max(ys) and frozen; control drops log(y)/sqrt2."""
    ys = tuple(sorted(float(v) for v in ys))
    s = fit_log_shift(fld, w, ys[-1])
    err = tuple(log_shift_error(fld, w, y, s, True) for y in ys)
    ctl = tuple(log_shift_error(fld, w, y, s, False) for y in ys)
    return LogShiftReport(ys, s, err, ctl)


# --------------------------------------------------------------------------
# tameness and the tail expansion


@dataclass(frozen=True)
class Tameness:
    C: float
    x: float
    y: float
    near_top: bool


def tameness_constant(fld: Field2D, values: np.ndarray | None = None) -> Tameness:
    """max over the grid (y > 0) of Psi e^{sqrt2 x} / ((1 + x_+) y)."""
    v = fld.values if values is None else values
    X, Y = np.meshgrid(fld.x, fld.y[1:])
    r = v[1:] * np.exp(SQRT2 * X) / ((1.0 + np.maximum(X, 0.0)) * Y)
    k = np.unravel_index(int(np.argmax(r)), r.shape)
    y_at = float(Y[k])
    return Tameness(float(r[k]), float(X[k]), y_at, y_at > TOP_FRACTION * fld.y_range[1])


@dataclass(frozen=True)
class TailReport:
    sup_E: float
    sup_E_nested: tuple  # over |(x, y)| <= each radius cap
    radius_caps: tuple
    sup_control: float
    control_nested: tuple
    shift: float
    argmax: tuple
    points: int


def tail_statistic(fld: Field2D, K_star: float, shift: float = 0.0, with_log: bool = True,
                   x_margin: float = 2.0, y_margin: float | None = None):
    """E(x, y) on the tail region for the normalized field Phi(x, y) = Psi(x + shift, y).

    Grid nodes x_i map to x_i - shift, so no interpolation is involved.
    Returns (E values, x, y) over the region x > log_+(y)/sqrt2 within margins.
    """
    x_hi = fld.x_range[1] - x_margin
    y_top = TOP_FRACTION * fld.y_range[1] if y_margin is None else fld.y_range[1] - y_margin
    X, Y = np.meshgrid(fld.x, fld.y)
    xp = X - shift
    sel = (Y > 0) & (Y <= y_top) & (X <= x_hi)
    sel &= xp > np.log(np.maximum(Y, 1.0)) / SQRT2
    sel &= fld.values > 0
    if not sel.any():
        raise ValueError("tail region is empty")
    xs, ys, v = xp[sel], Y[sel], fld.values[sel]
    E = v * np.exp(SQRT2 * xs) / (K_star * ys) - xs
    if with_log:
        E = E + np.log(np.maximum(np.hypot(xs, ys), 1.0)) / SQRT2
    return E, xs, ys


def tail_expansion_check(fld: Field2D, K_star: float, shift: float = 0.0,
                         radius_caps: Sequence[float] = (10.0, 20.0, 40.0),
                         x_margin: float = 2.0) -> TailReport:
    """sup|E| on the tail region and on the parts of it inside growing radii.

    The control statistic drops the log term; its sup keeps growing with the
    radius while sup|E| levels off.
    """
    E, xs, ys = tail_statistic(fld, K_star, shift, True, x_margin)
    C, _, _ = tail_statistic(fld, K_star, shift, False, x_margin)
    r = np.hypot(xs, ys)

    def capped(v, R):
        sel = r <= R
        return float(np.max(np.abs(v[sel]))) if sel.any() else float("nan")

    k = int(np.argmax(np.abs(E)))
    return TailReport(float(np.max(np.abs(E))), tuple(capped(E, R) for R in radius_caps), tuple(radius_caps),
                      float(np.max(np.abs(C))), tuple(capped(C, R) for R in radius_caps),
                      shift, (float(xs[k]), float(ys[k])), int(E.size))


def ray_tail(fld: Field2D, K_star: float, y: float = 5.0, window=(10.0, 22.0), shift: float = 0.0):
    """Phi e^{sqrt2 x}/(K y) - (x - log(x)/sqrt2) along the ray of fixed height y."""
    row = fld.row(y)
    xp = fld.x - shift
    sel = (xp >= window[0]) & (xp <= window[1])
    return xp[sel], row[sel] * np.exp(SQRT2 * xp[sel]) / (K_star * y) - (xp[sel] - np.log(xp[sel]) / SQRT2)


# --------------------------------------------------------------------------
# rotated supercritical limit


def rotation_angle(lam: float, mu: float) -> float:
    return math.atan2(mu, lam)


def rotate(lam: float, mu: float, x, y):
    """Clockwise rotation by arctan(mu/lam): level lines lam X - mu Y = const become x = const."""
    th = rotation_angle(lam, mu)
    c, s = math.cos(th), math.sin(th)
    x = np.asarray(x, dtype=float)
    return x * c + y * s, -x * s + y * c


@dataclass(frozen=True)
class RotatedReport:
    lam: float
    mu: float
    c_target: float
    ys: tuple
    shift: float
    errors: tuple
    trimmed: tuple

    @property
    def decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.errors, self.errors[1:]))


def _rotated_slice(fld: Field2D, lam, mu, y, probes):
    X, Y = rotate(lam, mu, probes, y)
    inside = (X >= fld.x_range[0]) & (X <= fld.x_range[1]) & (Y <= TOP_FRACTION * fld.y_range[1])
    vals = np.where(Y < 0, 0.0, fld(X, np.maximum(Y, 0.0), outside=np.nan))
    return np.where(inside | (Y < 0), vals, np.nan)


def rotated_supercritical_check(fld: Field2D, lam: float, mu: float, w: Profile1D,
                                ys: Sequence[float] = (8.0, 16.0, 32.0), probes=PROBES) -> RotatedReport:
    """sup_x |Phi(R(x, y)) - w_c(x - shift)| with the shift fitted at max(ys) and frozen."""
    ys = tuple(sorted(float(v) for v in ys))
    tgt = _rotated_slice(fld, lam, mu, ys[-1], probes)
    ok = np.isfinite(tgt)
    s = fit_shift(w, probes[ok], tgt[ok])
    errs, trimmed = [], []
    for y in ys:
        v = _rotated_slice(fld, lam, mu, y, probes)
        ok = np.isfinite(v)
        trimmed.append(int((~ok).sum()))
        errs.append(float(np.max(np.abs(v[ok] - w(probes[ok] - s)))))
    return RotatedReport(lam, mu, rotated_speed(lam, mu), ys, s, tuple(errs), tuple(trimmed))


# --------------------------------------------------------------------------
# coupled martingale limits


def _whole_plane(T: float, seed, dt_max: float):
    return SimConfig(origin_y=0.0, horizon_T=float(T), killing_enabled=False, seed=int(seed), dt_max=dt_max)


def slope_jackknife(xv: np.ndarray, yv: np.ndarray) -> tuple[float, float]:
    """Slope of y on x through the origin, sum(xy)/sum(x^2), with its delete-one jackknife SE.

    D_T is heavy tailed, so single replicas can carry most of sum(x^2); the
    jackknife sees that leverage where sandwich formulas do not.
    """
    n = xv.size
    sxy = float(np.dot(xv, yv))
    sxx = float(np.dot(xv, xv))
    loo = (sxy - xv * yv) / (sxx - xv * xv)
    se = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    return sxy / sxx, se


@dataclass(frozen=True)
class CoupledZRow:
    y: float
    mean_Z: float
    se_Z: float
    l2: float
    se_l2: float
    slope: float
    se_slope: float


def coupled_Z_samples(y_values: Sequence[float], T: float = 6.0, replicas: int = 10_000, seed=0,
                      dt_max: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Per replica D_T and Z_T(y) for each y (array (replicas, len(y_values)))."""
    cfg = _whole_plane(T, seed, dt_max)
    ys = np.asarray(y_values, dtype=float)

    def one(r):
        s = simulate_replica(cfg, r)[-1]
        e = SQRT2 * s.x - 2.0 * T
        ok = e >= EXP_FLOOR
        w = np.exp(e[ok]) * (SQRT2 * T - s.x[ok])
        yy, mn = s.y[ok], s.min_y[ok]
        D = math.fsum(w)
        Z = [math.fsum(w[mn >= -h] * (yy[mn >= -h] + h)) for h in ys]
        return D, Z

    out = map_replicas(one, replicas)
    return np.array([o[0] for o in out]), np.array([o[1] for o in out]).reshape(len(out), ys.size)


def coupled_Z_over_y(y_values: Sequence[float] = (2.0, 8.0, 32.0), T: float = 6.0,
                     replicas: int = 10_000, seed=0, dt_max: float = 1.0) -> list[CoupledZRow]:
    D, Z = coupled_Z_samples(y_values, T, replicas, seed, dt_max)
    rows = []
    n = D.size
    for k, y in enumerate(y_values):
        z = Z[:, k]
        d2 = (z / y - D) ** 2
        b, se_b = slope_jackknife(D, z)
        rows.append(CoupledZRow(float(y), float(z.mean()), float(z.std(ddof=1) / math.sqrt(n)),
                                float(d2.mean()), float(d2.std(ddof=1) / math.sqrt(n)), b, se_b))
    return rows


@dataclass(frozen=True)
class CoupledWRow:
    y: float
    mean_gap: float
    se_gap: float
    exact_mean: float
    min_gap: float


@dataclass(frozen=True)
class CoupledWReport:
    lam: float
    mu: float
    rows: tuple
    monotone_every_replica: bool


def coupled_W_supercritical(lam: float, mu: float, y_values: Sequence[float] = (2.0, 8.0),
                            T: float = 6.0, replicas: int = 10_000, seed=0,
                            dt_max: float = 1.0) -> CoupledWReport:
    """A_T^{lam,mu} - e^{-mu y} W_T^{lam,mu}(y) per replica; exact mean (1 + e^{-2 mu y}) / 2."""
    if not (lam > 0 and mu > 0 and lam * lam + mu * mu < 2):
        raise ValueError("(lambda, mu) must lie in the open quarter disk")
    cfg = _whole_plane(T, seed, dt_max)
    ys = np.asarray(sorted(y_values), dtype=float)
    rate = 0.5 * lam * lam + 0.5 * mu * mu + 1.0

    def one(r):
        s = simulate_replica(cfg, r)[-1]
        expo = lam * s.x + mu * s.y - rate * T
        ok = expo >= EXP_FLOOR
        a = np.exp(expo[ok])
        yy, mn = s.y[ok], s.min_y[ok]
        A = math.fsum(a)
        gaps = []
        for h in ys:
            keep = mn >= -h
            # e^{-mu h} sinh(mu (Y + h)) e^{lam X - rate T} = a (1 - e^{-2 mu (Y + h)}) / 2
            gaps.append(A - math.fsum(a[keep] * 0.5 * -np.expm1(-2.0 * mu * (yy[keep] + h))))
        return gaps

    g = np.array(map_replicas(one, replicas)).reshape(-1, ys.size)
    n = g.shape[0]
    rows = tuple(CoupledWRow(float(h), float(g[:, k].mean()), float(g[:, k].std(ddof=1) / math.sqrt(n)),
                             0.5 * (1.0 + math.exp(-2.0 * mu * h)), float(g[:, k].min()))
                 for k, h in enumerate(ys))
    mono = bool(np.all(np.diff(g, axis=1) <= 1e-12 * np.maximum(1.0, np.abs(g[:, :-1]))))
    return CoupledWReport(lam, mu, rows, mono)
