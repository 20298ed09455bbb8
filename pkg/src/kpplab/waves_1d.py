"""One-dimensional profiles: the boundary steady state phi and the waves w_c.

phi solves  phi''/2 + phi - phi^2 = 0  on y > 0,  phi(0) = 0,  phi(inf) = 1.
w_c solves  w''/2 + c w' + w - w^2 = 0,  w(-inf) = 1,  w(+inf) = 0,  c >= sqrt(2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import CubicHermiteSpline, CubicSpline

SQRT2 = math.sqrt(2.0)
C_STAR = SQRT2
C_TOL = 1e-6


def check_speed(c: float) -> float:
    """Validate a wave speed; values within 1e-6 below sqrt(2) snap to sqrt(2)."""
    c = float(c)
    if c < C_STAR - C_TOL:
        raise ValueError(f"speed {c} is below the minimal speed sqrt(2)")
    return max(c, C_STAR) if c < C_STAR else c


def tail_rate(c: float) -> float:
    """Decay rate of w_c at +inf: smaller root of rho^2/2 - c rho + 1 = 0."""
    c = check_speed(c)
    return c - math.sqrt(max(c * c - 2.0, 0.0))


def left_rate(c: float) -> float:
    """Rate of 1 - w_c ~ e^{k x} at -inf: positive root of k^2/2 + c k - 1 = 0."""
    return -c + math.sqrt(c * c + 2.0)


@dataclass
class Profile1D:
    grid: np.ndarray
    values: np.ndarray
    speed_c: float | None
    pin: str
    derivative: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.derivative is not None:
            self._spline = CubicHermiteSpline(self.grid, self.values, self.derivative)
        else:
            self._spline = CubicSpline(self.grid, self.values)
        g, v = self.grid, self.values
        # exponential continuation past both ends, from the end log-slopes
        lo_gap = 1.0 - v[:2] if self.speed_c is not None else v[:2]
        self._left_slope = _log_slope(lo_gap, g[:2])
        self._right_slope = _log_slope(v[-2:] if self.speed_c is not None else 1.0 - v[-2:], g[-2:])

    @property
    def h(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        g, v = self.grid, self.values
        out = np.asarray(self._spline(np.clip(x, g[0], g[-1])), dtype=float)
        lo, hi = x < g[0], x > g[-1]
        if self.speed_c is not None:
            out = np.where(lo, 1.0 - (1.0 - v[0]) * np.exp(self._left_slope * (x - g[0])), out)
            out = np.where(hi, v[-1] * np.exp(self._right_slope * (x - g[-1])), out)
        else:
            out = np.where(lo, 0.0, out)
            out = np.where(hi, 1.0 - (1.0 - v[-1]) * np.exp(self._right_slope * (x - g[-1])), out)
        return out

    def shifted(self, s: float) -> "Profile1D":
        """Profile of x -> w(x - s)."""
        return Profile1D(self.grid + s, self.values, self.speed_c, f"{self.pin}; shifted by {s:+.6g}",
                         self.derivative, dict(self.meta))


def _log_slope(vals, xs) -> float:
    a, b = vals
    if a > 0 and b > 0:
        return float((math.log(b) - math.log(a)) / (xs[1] - xs[0]))
    return 0.0


# --------------------------------------------------------------------------
# phi by shooting


def _rk4_phi(s: float, h: float, n: int):
    """Integrate phi'' = 2(phi^2 - phi) from (0, s); stop on classification.

    Returns (phi, dphi, verdict) with verdict +1 (crossed 1), -1 (turned
    back below 1) or 0 (undecided at the end).
    """
    f = lambda p, q: (q, 2.0 * (p * p - p))
    p = np.empty(n + 1)
    q = np.empty(n + 1)
    p[0], q[0] = 0.0, s
    for k in range(n):
        a1, b1 = f(p[k], q[k])
        a2, b2 = f(p[k] + 0.5 * h * a1, q[k] + 0.5 * h * b1)
        a3, b3 = f(p[k] + 0.5 * h * a2, q[k] + 0.5 * h * b2)
        a4, b4 = f(p[k] + h * a3, q[k] + h * b3)
        p[k + 1] = p[k] + h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4)
        q[k + 1] = q[k] + h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)
        if p[k + 1] > 1.0:
            return p[: k + 2], q[: k + 2], 1
        if q[k + 1] < 0.0:
            return p[: k + 2], q[: k + 2], -1
    return p, q, 0


class ShootingError(RuntimeError):
    pass


def solve_steady_phi(y_max: float = 30.0, h: float = 0.005) -> Profile1D:
    """phi on [0, y_max] by RK4 shooting with bisection on phi'(0).

    The bounded solution is a separatrix, so any finite-precision slope
    eventually peels away from it. The two bracketing trajectories agree up to
    some height; past it the profile continues with the linearised tail
    1 - phi ~ C exp(-sqrt(2) y).
    """
    if y_max < 20 or h > 0.01:
        raise ValueError("need y_max >= 20 and h <= 0.01")
    n = int(round(y_max / h))
    h = y_max / n
    lo, hi = 0.5, 1.2
    _, _, v_lo = _rk4_phi(lo, h, n)
    _, _, v_hi = _rk4_phi(hi, h, n)
    if not (v_lo == -1 and v_hi == 1):
        raise ShootingError(f"bracket failed: verdicts {v_lo}, {v_hi} at slopes {lo}, {hi}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        _, _, v = _rk4_phi(mid, h, n)
        if v == 1:
            hi = mid
        elif v == -1:
            lo = mid
        else:
            lo = hi = mid
            break
    p_lo, q_lo, _ = _rk4_phi(lo, h, n)
    p_hi, q_hi, _ = _rk4_phi(hi, h, n)
    m = min(p_lo.size, p_hi.size)
    ok = (np.abs(p_lo[:m] - p_hi[:m]) < 1e-10) & (p_lo[:m] < 1.0) & (q_lo[:m] > 0)
    k_sep = int(np.argmin(ok)) if not ok.all() else m
    # trust the trajectory up to where 1 - phi is still well above the
    # separation error, then switch to the tail
    gap = 1.0 - p_lo[:k_sep]
    k_end = int(np.searchsorted(-gap, -1e-6)) if gap.size else 0
    k_end = max(1, min(k_end, k_sep - 1))
    y = np.linspace(0.0, y_max, n + 1)
    phi = np.empty(n + 1)
    dphi = np.empty(n + 1)
    phi[: k_end + 1] = p_lo[: k_end + 1]
    dphi[: k_end + 1] = q_lo[: k_end + 1]
    g0 = 1.0 - phi[k_end]
    tail = g0 * np.exp(-SQRT2 * (y[k_end + 1:] - y[k_end]))
    phi[k_end + 1:] = 1.0 - tail
    dphi[k_end + 1:] = SQRT2 * tail
    return Profile1D(y, phi, None, "phi(0) = 0", dphi,
                     meta=dict(slope0=float(lo), slope_bracket=(float(lo), float(hi)),
                               tail_from=float(y[k_end]), h=h))


def phi_residual(profile: Profile1D) -> float:
    """Sup of |phi''/2 + phi - phi^2| on the interior, fourth-order stencil."""
    v, h = profile.values, profile.h
    d2 = (-v[4:] + 16 * v[3:-1] - 30 * v[2:-2] + 16 * v[1:-3] - v[:-4]) / (12 * h * h)
    u = v[2:-2]
    return float(np.max(np.abs(0.5 * d2 + u - u * u)))


def phi_first_integral(profile: Profile1D) -> np.ndarray:
    """phi'^2/2 + phi^2 - 2 phi^3/3, which is 1/3 along the bounded branch."""
    p, q = profile.values, profile.derivative
    return 0.5 * q * q + p * p - (2.0 / 3.0) * p ** 3


# --------------------------------------------------------------------------
# w_c by Newton on the discrete steady problem


def _wave_residual(w, h, c, kl, i0):
    F = np.empty_like(w)
    F[0] = (w[1] - w[0]) / h + kl * (1.0 - 0.5 * (w[0] + w[1]))
    wi = w[1:-1]
    F[1:-1] = 0.5 * (w[2:] - 2.0 * wi + w[:-2]) / (h * h) + c * (w[2:] - w[:-2]) / (2 * h) + wi - wi * wi
    F[-1] = w[i0] - 0.5
    return F


def _wave_jacobian(w, h, c, kl, i0):
    n = w.size
    lo = np.full(n - 1, 0.5 / (h * h) - c / (2 * h))
    di = -1.0 / (h * h) + 1.0 - 2.0 * w
    up = np.full(n - 1, 0.5 / (h * h) + c / (2 * h))
    lo[-1] = 0.0
    di[0] = -1.0 / h - 0.5 * kl
    up[0] = 1.0 / h - 0.5 * kl
    di[-1] = 0.0
    J = sp.diags([lo, di, up], [-1, 0, 1], format="lil")
    J[n - 1, i0] = 1.0
    return J.tocsc()


def wave_steady_residual(profile: Profile1D) -> float:
    """Sup of the discrete steady residual on interior nodes."""
    w, h, c = profile.values, profile.h, profile.speed_c
    wi = w[1:-1]
    r = 0.5 * (w[2:] - 2.0 * wi + w[:-2]) / (h * h) + c * (w[2:] - w[:-2]) / (2 * h) + wi - wi * wi
    return float(np.max(np.abs(r)))


def solve_wave_1d(c: float, x_range: tuple[float, float] = (-40.0, 30.0), h: float = 0.005,
                  init: np.ndarray | None = None, max_iter: int = 100) -> Profile1D:
    """Monotone wave of speed c pinned by w(0) = 1/2.

    The left end carries the Robin condition of the unstable manifold of 1;
    the right end is free (both linear modes at 0 decay), so with the pin the
    discrete system is square. Newton works in variables scaled by the tail
    rate so that tail values keep relative precision.
    """
    c = check_speed(c)
    a, b = x_range
    n = int(round((b - a) / h))
    x = a + h * np.arange(n + 1)
    i0 = int(round(-a / h))
    if not (0 < i0 < n) or abs(x[i0]) > 1e-9 * h:
        raise ValueError("x_range must contain 0 on the grid")
    x[i0] = 0.0
    kl = left_rate(c)
    kr = tail_rate(c)
    if init is None:
        w = 1.0 / (1.0 + np.exp(np.clip(kr * x, -700, 700)))
    else:
        w = np.asarray(init, dtype=float).copy()
    s = np.exp(-kr * np.maximum(x, 0.0))
    rs = 1.0 / s
    rs[0] = rs[-1] = 1.0
    F = _wave_residual(w, h, c, kl, i0)
    norm = np.max(np.abs(F * rs))
    hist = [norm]
    for _ in range(max_iter):
        if norm < 1e-12:
            break
        J = _wave_jacobian(w, h, c, kl, i0)
        Js = sp.diags(rs) @ J @ sp.diags(s)
        dz = spla.spsolve(Js.tocsc(), -F * rs)
        dw = s * dz
        step = 1.0
        while step > 1e-6:
            wn = w + step * dw
            Fn = _wave_residual(wn, h, c, kl, i0)
            nn = np.max(np.abs(Fn * rs))
            if nn < norm or nn < 1e-12:
                break
            step *= 0.5
        if nn >= norm:
            break  # round-off floor of the scaled residual
        w, F, norm = wn, Fn, nn
        hist.append(norm)
    prof = Profile1D(x, w, c, "w(0) = 1/2",
                     meta=dict(h=h, x_range=(a, b), newton_history=hist, tail_rate=kr))
    prof.meta["residual"] = wave_steady_residual(prof)
    return prof


@dataclass(frozen=True)
class TailFit:
    K_star: float
    a: float
    fit_residual: float
    window: tuple


def fit_tail_constant(profile: Profile1D, window: tuple[float, float] = (12.0, 22.0)) -> TailFit:
    """Least squares of w(x) e^{sqrt(2) x} against K (x + a) on ``window``."""
    if profile.speed_c is None or abs(profile.speed_c - C_STAR) > C_TOL:
        raise ValueError("the tail form K(x + a) e^{-sqrt(2) x} holds only at the minimal speed")
    x, w = profile.grid, profile.values
    sel = (x >= window[0] - 1e-12) & (x <= window[1] + 1e-12)
    if sel.sum() < 20:
        raise ValueError("fit window has fewer than 20 grid points")
    if np.min(w[sel]) <= 1e-13:
        raise ValueError("profile is below 1e-13 inside the fit window")
    xs = x[sel]
    th = w[sel] * np.exp(SQRT2 * xs)
    slope, icpt = np.polyfit(xs, th, 1)
    K = float(slope)
    aa = float(icpt / slope)
    res = float(np.max(np.abs(th - K * (xs + aa))))
    return TailFit(K, aa, res, tuple(window))


def tail_log_slope(profile: Profile1D, window: tuple[float, float] = (15.0, 25.0)) -> float:
    """Fitted decay rate -d log w / dx over ``window``."""
    x, w = profile.grid, profile.values
    sel = (x >= window[0]) & (x <= window[1]) & (w > 0)
    return float(-np.polyfit(x[sel], np.log(w[sel]), 1)[0])


def fit_shift(profile: Profile1D, xs: np.ndarray, target: np.ndarray, bounds=(-10.0, 10.0)) -> float:
    """One-parameter least squares: s minimising sum (w(x - s) - target)^2."""
    from scipy.optimize import minimize_scalar

    xs = np.asarray(xs, dtype=float)
    target = np.asarray(target, dtype=float)
    res = minimize_scalar(lambda s: float(np.sum((profile(xs - s) - target) ** 2)),
                          bounds=bounds, method="bounded", options=dict(xatol=1e-10))
    return float(res.x)


# --------------------------------------------------------------------------
# 1D Laplace-transform wave by Monte Carlo


def shaved_derivative_1d(snapshot, alpha: float) -> float:
    from .martingales import evaluate_martingales

    return evaluate_martingales(snapshot, alphas=(alpha,)).D_alpha[alpha]


def laplace_wave_1d_proxies(T: float, replicas: int, seed, alpha: float = 8.0,
                            dt_max: float = 0.25) -> np.ndarray:
    """Per-replica D_T^alpha for a BBM from 0 without killing (1D projection)."""
    from .bbm_sim import SimConfig, map_replicas, simulate_replica

    cfg = SimConfig(origin_y=0.0, horizon_T=T, killing_enabled=False, seed=int(seed), dt_max=dt_max)
    return np.array(map_replicas(lambda r: shaved_derivative_1d(simulate_replica(cfg, r)[-1], alpha), replicas))


def laplace_wave_1d_mc(x, T: float = 8.0, replicas: int = 2000, seed=0, alpha: float = 8.0,
                       proxies: np.ndarray | None = None):
    """1 - E exp(-e^{-sqrt(2) x} D_T^alpha) with a replica-variance CI."""
    from .wave_mc import EstimateCI, laplace_estimate

    if replicas < 100:
        raise ValueError("need at least 100 replicas")
    if proxies is None:
        proxies = laplace_wave_1d_proxies(T, replicas, seed, alpha)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = [laplace_estimate(proxies, math.exp(-SQRT2 * xi), T, f"1d shaved D, alpha={alpha}")
           for xi in xs]
    return out[0] if np.ndim(x) == 0 else out
