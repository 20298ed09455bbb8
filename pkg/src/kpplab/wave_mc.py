"""Monte Carlo estimators of the traveling waves.

All estimators are Laplace transforms of per-replica martingale proxies,

    Phi(x, y) ~ 1 - E exp(-e^{-sqrt(2) x} Z_T^alpha(y)),

so one set of replicas serves every x (common random numbers). Replicas are
simulated with a coarse ``dt_max``: positions, killing and the running maxima
are sampled exactly at any step size, so this is a speed knob only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats
from scipy.optimize import brentq

from .bbm_sim import (PopulationCapExceeded, SimConfig, map_replicas, replica_key,
                      simulate_replica, simulate_tree)
from ._pykernels import M64, mix64
from .martingales import EXP_FLOOR, sinh_weight_exponent

SQRT2 = math.sqrt(2.0)
MC_DT = 1.0
MIN_REPLICAS = 100


@dataclass(frozen=True)
class EstimateCI:
    value: float
    std_error: float
    replicas: int
    horizon_T: float
    meta: str = ""

    def interval(self, z: float = 1.96) -> tuple[float, float]:
        return (self.value - z * self.std_error, self.value + z * self.std_error)


def mean_se(samples: np.ndarray) -> tuple[float, float]:
    s = np.asarray(samples, dtype=float)
    se = float(s.std(ddof=1) / math.sqrt(s.size)) if s.size > 1 else 0.0
    return float(s.mean()), se


def laplace_estimate(proxies: np.ndarray, scale: float, T: float, meta: str = "") -> EstimateCI:
    """1 - mean exp(-scale * proxy); proxies must be nonnegative."""
    g = -np.expm1(-scale * np.asarray(proxies, dtype=float))
    v, se = mean_se(g)
    return EstimateCI(min(max(v, 0.0), 1.0), se, int(g.size), float(T), meta)


def _need(replicas: int):
    if replicas < MIN_REPLICAS:
        raise ValueError(f"need at least {MIN_REPLICAS} replicas for a meaningful CI")


def _shaved_Z(snap, alpha: float) -> float:
    t = snap.t
    keep = snap.max_drift_excess <= alpha
    e = SQRT2 * snap.x[keep] - 2.0 * t
    ok = e >= EXP_FLOOR
    terms = np.exp(e[ok]) * ((SQRT2 * t + alpha - snap.x[keep]) * snap.y[keep])[ok]
    return math.fsum(terms)


# --------------------------------------------------------------------------
# proxies


def shaved_Z_proxies(y: float, T: float, alphas: Sequence[float] = (8.0,), replicas: int = 2000,
                     seed=0, dt_max: float = MC_DT) -> np.ndarray:
    """Array (len(alphas), replicas) of Z_T^alpha(y) for a killed BBM from (0, y)."""
    cfg = SimConfig(origin_y=float(y), horizon_T=float(T), seed=int(seed), dt_max=dt_max)
    alphas = tuple(float(a) for a in alphas)

    def one(r):
        s = simulate_replica(cfg, r)[-1]
        return [_shaved_Z(s, a) for a in alphas]

    return np.array(map_replicas(one, replicas), dtype=float).T.reshape(len(alphas), -1)


def supercritical_proxies(y: float, lam: float, mu: float, T: float, replicas: int, seed=0,
                          dt_max: float = MC_DT) -> np.ndarray:
    cfg = SimConfig(origin_y=float(y), horizon_T=float(T), seed=int(seed), dt_max=dt_max)

    def one(r):
        s = simulate_replica(cfg, r)[-1]
        expo, fac = sinh_weight_exponent(lam, mu, s.x, s.y, s.t)
        ok = expo >= EXP_FLOOR
        return math.fsum(np.exp(expo[ok]) * fac[ok])

    return np.array(map_replicas(one, replicas), dtype=float)


def check_quarter_disk(lam: float, mu: float):
    if not (lam > 0 and mu > 0 and lam * lam + mu * mu < 2.0):
        raise ValueError("(lambda, mu) must lie in the open quarter disk lambda, mu > 0, lambda^2 + mu^2 < 2")


# --------------------------------------------------------------------------
# wave estimators


def estimate_phi(x, y: float, T: float = 8.0, alpha: float = 8.0, replicas: int = 2000, seed=0,
                 dt_max: float = MC_DT, sensitivity_alpha: float | None = 6.0):
    """Estimate of the minimal-speed wave at (x, y); ``x`` may be an array (shared replicas)."""
    _need(replicas)
    if not y > 0:
        raise ValueError("y must be > 0")
    if T > 10:
        raise ValueError("T must be <= 10")
    alphas = [alpha] + ([sensitivity_alpha] if sensitivity_alpha not in (None, alpha) else [])
    prox = shaved_Z_proxies(y, T, alphas, replicas, seed, dt_max)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = []
    for xi in xs:
        scale = math.exp(-SQRT2 * xi)
        meta = f"shaved Z, alpha={alpha}, y={y}, seed={seed}"
        if len(alphas) > 1:
            alt = laplace_estimate(prox[1], scale, T)
            meta += f"; alpha={sensitivity_alpha}: {alt.value:.6g}"
        out.append(laplace_estimate(prox[0], scale, T, meta))
    return out[0] if np.ndim(x) == 0 else out


def estimate_phi_supercritical(x, y: float, lam: float, mu: float, T: float = 8.0,
                               replicas: int = 2000, seed=0, dt_max: float = MC_DT):
    _need(replicas)
    check_quarter_disk(lam, mu)
    if not y > 0:
        raise ValueError("y must be > 0")
    prox = supercritical_proxies(y, lam, mu, T, replicas, seed, dt_max)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = [laplace_estimate(prox, math.exp(-lam * xi), T, f"W^(lam={lam},mu={mu}), y={y}, seed={seed}")
           for xi in xs]
    return out[0] if np.ndim(x) == 0 else out


def estimate_extinction(y: float, T: float = 8.0, replicas: int = 2000, seed=0,
                        dt_max: float = MC_DT) -> EstimateCI:
    """Fraction of replicas with no survivors at T (meta: the same at T - 2)."""
    _need(replicas)
    stops = (T - 2.0, T) if T > 2 else (T,)
    cfg = SimConfig(origin_y=float(y), horizon_T=float(T), checkpoint_times=stops,
                    seed=int(seed), dt_max=dt_max)
    ext = np.array(map_replicas(lambda r: [len(s) == 0 for s in simulate_replica(cfg, r)], replicas),
                   dtype=float)
    v, se = mean_se(ext[:, -1])
    meta = f"y={y}, seed={seed}"
    if len(stops) == 2:
        v2, se2 = mean_se(ext[:, 0])
        meta += f"; at T-2: {v2:.6g} +- {se2:.2g}"
    return EstimateCI(v, se, replicas, float(T), meta)


# --------------------------------------------------------------------------
# pinning


@dataclass
class PinnedGrid:
    """MC wave on a probe grid after shifting its level set to x = 0 at y_star."""

    xs: np.ndarray
    ys: np.ndarray
    value: np.ndarray  # (len(ys), len(xs))
    std_error: np.ndarray
    pin: float
    pin_se: float
    replicas: int
    T: float
    alpha: float
    meta: dict = field(default_factory=dict)


def _pin_root(prox: np.ndarray, level: float) -> float:
    f = lambda x: float(np.mean(-np.expm1(-math.exp(-SQRT2 * x) * prox))) - level
    lo, hi = -20.0, 20.0
    if f(lo) < 0 or f(hi) > 0:
        raise ValueError("pinning level not bracketed")
    return brentq(f, lo, hi, xtol=1e-13)


def pinned_phi_grid(xs: Sequence[float], ys: Sequence[float], T: float = 8.0, alpha: float = 8.0,
                    replicas: int = 2000, seed=0, y_star: float = 5.0, level: float = 0.5,
                    dt_max: float = MC_DT) -> PinnedGrid:
    """Phi_MC(x + x_pin, y) with x_pin solving Phi_MC(x_pin, y_star) = level.

    The same replica seeds are used at every height, and the standard errors
    include the randomness of x_pin through per-replica influence functions.
    """
    _need(replicas)
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    heights = sorted(set(float(v) for v in ys) | {float(y_star)})
    prox = {h: shaved_Z_proxies(h, T, (alpha,), replicas, seed, dt_max)[0] for h in heights}
    p_star = prox[float(y_star)]
    x_pin = _pin_root(p_star, level)

    def f_and_dx(p, x):
        s = math.exp(-SQRT2 * x)
        e = np.exp(-s * p)
        return 1.0 - e, -SQRT2 * s * p * e  # per replica value and x-derivative

    f_star, d_star = f_and_dx(p_star, x_pin)
    D_star = float(d_star.mean())
    infl_pin = -(f_star - f_star.mean()) / D_star
    n = replicas
    val = np.empty((ys.size, xs.size))
    se = np.empty_like(val)
    for j, yv in enumerate(ys):
        for i, xv in enumerate(xs):
            fv, dv = f_and_dx(prox[float(yv)], xv + x_pin)
            infl = fv - fv.mean() + float(dv.mean()) * infl_pin
            val[j, i] = fv.mean()
            se[j, i] = infl.std(ddof=1) / math.sqrt(n)
    pin_se = float(infl_pin.std(ddof=1) / math.sqrt(n))
    return PinnedGrid(xs, ys, val, se, x_pin, pin_se, n, T, alpha,
                      dict(y_star=y_star, level=level, seed=seed))


# --------------------------------------------------------------------------
# McKean representation


def mckean_evolve(initial, t: float, x, y: float, replicas: int = 2000, seed=0,
                  dt_max: float = MC_DT):
    """1 - E prod_v [1 - initial(x - X_t(v), Y_t(v))] over the killed population.

    ``initial`` is a Field2D (bilinear, 0 off the grid) with values in [0, 1].
    ``x`` may be an array; all points share the same replicas.
    """
    _need(replicas)
    if t > 5:
        raise ValueError("t must be <= 5")
    vals = initial.values
    if vals.min() < 0.0 or vals.max() > 1.0:
        raise ValueError("initial field values must lie in [0, 1]")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    cfg = SimConfig(origin_y=float(y), horizon_T=float(t), seed=int(seed), dt_max=dt_max)

    def one(r):
        s = simulate_replica(cfg, r)[-1]
        if len(s) == 0:
            return np.zeros(xs.size)
        out = np.empty(xs.size)
        for k, xv in enumerate(xs):
            out[k] = 1.0 - np.prod(1.0 - initial(xv - s.x, s.y))
        return out

    samples = np.array(map_replicas(one, replicas))
    res = []
    for k in range(xs.size):
        v, se = mean_se(samples[:, k])
        res.append(EstimateCI(min(max(v, 0.0), 1.0), se, replicas, float(t), f"McKean, y={y}, seed={seed}"))
    return res[0] if np.ndim(x) == 0 else res


# --------------------------------------------------------------------------
# smoothing recursion


@dataclass(frozen=True)
class SmoothingReport:
    t: float
    T: float
    y: float
    alpha: float
    replicas: int
    lhs_mean: float
    rhs_mean: float
    mean_diff: float
    joint_se: float
    ks_statistic: float
    ks_pvalue: float


def _descendant_key(seed: int, replica: int, k: int) -> int:
    return mix64(replica_key(seed, replica) ^ mix64((k * 0x9E3779B97F4A7C15 + 1) & M64))


def smoothing_rhs(t: float, T: float, y: float, alpha: float, replica: int, seed: int,
                  dt_max: float = MC_DT) -> float:
    """One draw of sum_u e^{sqrt2 X_u - 2t} Z'_T^{alpha_u}(Y_u) over shaved u alive at t.

    alpha_u = alpha + sqrt(2) t - X_u is the threshold seen by the subtree of u,
    which makes the identity exact in law for the shaved proxy.
    """
    cfg = SimConfig(origin_y=float(y), horizon_T=float(t), seed=int(seed), dt_max=dt_max)
    s = simulate_replica(cfg, replica)[-1]
    total = []
    for k in range(len(s)):
        if s.max_drift_excess[k] > alpha:
            continue
        a_u = alpha + SQRT2 * t - s.x[k]
        key = _descendant_key(seed ^ 0x5DEECE66D, replica, k)
        status, t_stop, raw = simulate_tree(0, -1, 0.0, float(s.y[k]), 0.0, float(s.y[k]), 0.0, (T,),
                                            dt_max=dt_max, killing=True, cap=cfg.population_cap, key=key)
        if status != "ok":
            raise PopulationCapExceeded(replica, t + t_stop, cfg.population_cap)
        ids, par, xx, yy, md, mn, bt = raw[0]
        keep = md <= a_u
        e = SQRT2 * xx[keep] - 2.0 * T
        ok = e >= EXP_FLOOR
        z = math.fsum(np.exp(e[ok]) * ((SQRT2 * T + a_u - xx[keep]) * yy[keep])[ok])
        w = SQRT2 * s.x[k] - 2.0 * t
        if w >= EXP_FLOOR:
            total.append(math.exp(w) * z)
    return math.fsum(total)


def smoothing_consistency(t: float = 1.0, y: float = 1.0, T: float = 6.0, alpha: float = 8.0,
                          replicas: int = 10_000, seed=0, dt_max: float = MC_DT) -> SmoothingReport:
    """Compare Z_{t+T}^alpha(y) with the one-generation recursion assembled at time t."""
    _need(replicas)
    if not 0 <= t <= 2:
        raise ValueError("t must lie in [0, 2]")
    if t + T > 10:
        raise ValueError("t + T must be <= 10")
    lhs = shaved_Z_proxies(y, t + T, (alpha,), replicas, seed, dt_max)[0]
    seed_r = int(seed) ^ 0x2545F4914F6CDD1D
    rhs = np.array(map_replicas(lambda r: smoothing_rhs(t, T, y, alpha, r, seed_r, dt_max), replicas))
    ml, sl = mean_se(lhs)
    mr, sr = mean_se(rhs)
    ks = stats.ks_2samp(lhs, rhs)
    return SmoothingReport(t, T, y, alpha, replicas, ml, mr, ml - mr, math.hypot(sl, sr),
                           float(ks.statistic), float(ks.pvalue))
