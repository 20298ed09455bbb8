"""Martingale functionals of a population snapshot.

With t the snapshot time and e(u) = exp(sqrt(2) X_u - 2t):

    A = sum e(u)                      D = sum (sqrt(2) t - X_u) e(u)
    W = sum Y_u e(u)                  Z = sum (sqrt(2) t - X_u) Y_u e(u)
    D^a = sum_{shaved} (sqrt(2) t + a - X_u) e(u)
    Z^a = sum_{shaved} (sqrt(2) t + a - X_u) Y_u e(u)
    W^{l,m} = sum exp(l X_u - (l^2/2 + m^2/2 + 1) t) sinh(m Y_u)

"shaved" keeps particles whose ancestral path never exceeded sqrt(2) s + a.
Sums are exactly rounded (``math.fsum``) over particles in id order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .bbm_sim import PopulationSnapshot, SimConfig, map_replicas, simulate_replica

SQRT2 = math.sqrt(2.0)
EXP_FLOOR = -745.0


@dataclass(frozen=True)
class MartingaleReport:
    t: float
    A: float
    D: float
    D_alpha: dict
    W: float
    Z: float
    Z_alpha: dict
    W_lm: dict
    no_killing_variant: bool = False
    size: int = 0


def _check_params(alphas, lam_mu):
    for a in alphas:
        if not a > 0:
            raise ValueError("alpha must be > 0")
    for lam, mu in lam_mu:
        if not (lam > 0 and mu > 0):
            raise ValueError("lambda and mu must be > 0")


def _weighted_sum(expo: np.ndarray, factor: np.ndarray | None = None) -> float:
    # libm exp rather than numpy's SIMD exp: values must not depend on the CPU
    keep = expo >= EXP_FLOOR
    terms = np.array([math.exp(v) for v in expo[keep].tolist()])
    if factor is not None:
        terms = terms * factor[keep]
    return math.fsum(terms)


def sinh_weight_exponent(lam: float, mu: float, x: np.ndarray, y: np.ndarray, t: float):
    """Return (exponent, factor) with exp(exponent)*factor = e^{lam x - (..)t} sinh(mu y).

    Written as e^{lam x + mu y - (..)t} (1 - e^{-2 mu y}) / 2 to avoid overflow.
    """
    expo = lam * x + mu * y - (0.5 * lam * lam + 0.5 * mu * mu + 1.0) * t
    factor = 0.5 * -np.expm1(-2.0 * mu * y)
    return expo, factor


def evaluate_martingales(snapshot: PopulationSnapshot, alphas: Sequence[float] = (),
                         lam_mu: Sequence[tuple[float, float]] = ()) -> MartingaleReport:
    alphas = tuple(float(a) for a in alphas)
    lam_mu = tuple((float(l), float(m)) for l, m in lam_mu)
    _check_params(alphas, lam_mu)
    t = snapshot.t
    x, y, mde = snapshot.x, snapshot.y, snapshot.max_drift_excess
    e = SQRT2 * x - 2.0 * t
    gap = SQRT2 * t - x
    A = _weighted_sum(e)
    D = _weighted_sum(e, gap)
    W = _weighted_sum(e, y)
    Z = _weighted_sum(e, gap * y)
    D_alpha, Z_alpha = {}, {}
    for a in alphas:
        keep = mde <= a
        D_alpha[a] = _weighted_sum(e[keep], (gap + a)[keep])
        Z_alpha[a] = _weighted_sum(e[keep], ((gap + a) * y)[keep])
    W_lm = {}
    for lam, mu in lam_mu:
        expo, fac = sinh_weight_exponent(lam, mu, x, y, t)
        W_lm[(lam, mu)] = _weighted_sum(expo, fac)
    return MartingaleReport(t, A, D, D_alpha, W, Z, Z_alpha, W_lm,
                            no_killing_variant=not snapshot.killing_enabled, size=len(snapshot))


def additive_1d(x: Iterable[float], t: float) -> float:
    """Scalar reference for A (loop form, independent of the vectorised path)."""
    return math.fsum(math.exp(SQRT2 * xi - 2.0 * t) for xi in x if SQRT2 * xi - 2.0 * t >= EXP_FLOOR)


def derivative_1d(x: Iterable[float], t: float) -> float:
    """Scalar reference for D."""
    return math.fsum((SQRT2 * t - xi) * math.exp(SQRT2 * xi - 2.0 * t) for xi in x
                     if SQRT2 * xi - 2.0 * t >= EXP_FLOOR)


def richardson(v1: float, T1: float, v2: float, T2: float, rate: float = 0.5) -> float:
    """Two-horizon extrapolation assuming an error of order T^-rate (opt-in)."""
    if T1 == T2:
        raise ValueError("need two distinct horizons")
    w1, w2 = T1 ** rate, T2 ** rate
    return (v2 * w2 - v1 * w1) / (w2 - w1)


# --------------------------------------------------------------------------
# trajectories over replicas

QUANTITIES = ("A", "D", "W", "Z")


@dataclass
class Trajectory:
    config: SimConfig
    alphas: tuple
    lam_mu: tuple
    times: tuple
    reports: list = field(default_factory=list)  # reports[replica][checkpoint]

    def values(self, name: str, key=None) -> np.ndarray:
        """Array (replicas, checkpoints) of one quantity."""
        out = np.empty((len(self.reports), len(self.times)))
        for r, row in enumerate(self.reports):
            for c, rep in enumerate(row):
                v = getattr(rep, name)
                out[r, c] = v[key] if key is not None else v
        return out

    def summary(self) -> list[dict]:
        """Quartiles and mean/SE of every quantity at every checkpoint."""
        rows = []
        series = [(q, None) for q in QUANTITIES]
        series += [("D_alpha", a) for a in self.alphas] + [("Z_alpha", a) for a in self.alphas]
        series += [("W_lm", lm) for lm in self.lam_mu]
        for name, key in series:
            vals = self.values(name, key)
            for c, t in enumerate(self.times):
                v = vals[:, c]
                q1, med, q3 = np.quantile(v, [0.25, 0.5, 0.75])
                rows.append(dict(quantity=name, param="" if key is None else str(key), t=t,
                                 q1=q1, median=med, q3=q3, mean=float(v.mean()),
                                 se=float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0,
                                 replicas=v.size))
        return rows


def martingale_trajectory(config: SimConfig, alphas: Sequence[float] = (),
                          lam_mu: Sequence[tuple[float, float]] = (), replicas: int = 1000,
                          backend: str | None = None) -> Trajectory:
    if not config.checkpoints:
        raise ValueError("checkpoint_times must be nonempty")
    _check_params(alphas, lam_mu)

    def one(r):
        return [evaluate_martingales(s, alphas, lam_mu) for s in simulate_replica(config, r, backend)]

    traj = Trajectory(config, tuple(alphas), tuple(tuple(p) for p in lam_mu), config.checkpoints)
    traj.reports = map_replicas(one, replicas)
    return traj


def trajectory_rows(traj: Trajectory):
    """Long-format rows ``replica,t,A,D,W,Z,alpha,Z_alpha,lambda,mu,W_lm``."""
    alphas = traj.alphas or (None,)
    lms = traj.lam_mu or ((None, None),)
    for r, row in enumerate(traj.reports):
        for rep in row:
            for a in alphas:
                for lm in lms:
                    yield (r, rep.t, rep.A, rep.D, rep.W, rep.Z,
                           "" if a is None else a, "" if a is None else rep.Z_alpha[a],
                           "" if lm[0] is None else lm[0], "" if lm[1] is None else lm[1],
                           "" if lm[0] is None else rep.W_lm[tuple(lm)])
