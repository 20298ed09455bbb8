"""Binary branching Brownian motion in the plane with optional absorption at y = 0.

Particles branch at rate 1 into two. Between branch events each particle is
moved in sub-steps of length at most ``dt_max``; on every sub-step the running
minimum of Y and the running maximum of X_s - sqrt(2) s are drawn exactly from
their Brownian-bridge laws, so killing and shaving are exact in distribution
for any ``dt_max``.

Each particle owns a counter-based random stream keyed by (replica key,
particle id). Children of particle ``k`` get ids ``2k+1`` and ``2k+2``. A
killed particle therefore never perturbs anybody else's randomness, which is
what makes the killed population a literal subset of the unkilled one.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from ._backend import get_kernels
from ._pykernels import GAMMA, M64, mix64

SQRT2 = math.sqrt(2.0)
_STATUS = {0: "ok", 1: "cap", 2: "id-overflow", 3: "memory"}


class PopulationCapExceeded(RuntimeError):
    """A replica grew past its population cap; the replica is aborted."""

    def __init__(self, replica: int, t: float, cap: int):
        super().__init__(f"replica {replica}: population cap {cap} exceeded at t={t:.4g} (status 'cap')")
        self.replica = replica
        self.t = t
        self.cap = cap
        self.status = "cap"


@dataclass(frozen=True)
class ParticleRecord:
    id: int
    parent_id: int | None
    x: float
    y: float
    birth_time: float
    alive: bool
    killed: bool
    max_drift_excess: float
    min_y: float


@dataclass(frozen=True)
class SimConfig:
    origin_y: float
    horizon_T: float
    checkpoint_times: tuple[float, ...] | None = None
    dt_max: float = 0.01
    branch_rate: float = 1.0
    killing_enabled: bool = True
    population_cap: int = 5_000_000
    seed: int = 0
    origin_x: float = 0.0

    def __post_init__(self):
        if not self.origin_y >= 0:
            raise ValueError("origin_y must be >= 0")
        if not self.horizon_T >= 0:
            raise ValueError("horizon_T must be >= 0")
        if not self.dt_max > 0:
            raise ValueError("dt_max must be > 0")
        if self.branch_rate != 1.0:
            raise ValueError("branch_rate is fixed at 1")
        if self.population_cap <= 0:
            raise ValueError("population_cap must be > 0")
        cps = self.checkpoints
        if any(b < a for a, b in zip(cps, cps[1:])):
            raise ValueError("checkpoint_times must be sorted")
        if cps and (cps[0] < 0 or cps[-1] > self.horizon_T):
            raise ValueError("checkpoint_times must lie in [0, horizon_T]")

    @property
    def checkpoints(self) -> tuple[float, ...]:
        if self.checkpoint_times is None:
            return (float(self.horizon_T),)
        return tuple(float(t) for t in self.checkpoint_times)


@dataclass(frozen=True, eq=False)
class PopulationSnapshot:
    """Alive particles at time ``t``; arrays are sorted by id and read-only."""

    t: float
    ids: np.ndarray
    parent_ids: np.ndarray
    x: np.ndarray
    y: np.ndarray
    max_drift_excess: np.ndarray
    min_y: np.ndarray
    birth_time: np.ndarray
    replica_seed: int
    killing_enabled: bool
    origin_y: float
    replica: int = 0

    def __len__(self) -> int:
        return int(self.ids.size)

    @property
    def particles(self) -> list[ParticleRecord]:
        return [
            ParticleRecord(int(i), None if p < 0 else int(p), float(x), float(y), float(b),
                           True, False, float(m), float(n))
            for i, p, x, y, b, m, n in zip(self.ids, self.parent_ids, self.x, self.y,
                                           self.birth_time, self.max_drift_excess, self.min_y)
        ]


def replica_key(seed: int, replica: int) -> int:
    """64-bit key of replica ``replica``: seed xor splitmix(replica)."""
    return (int(seed) & M64) ^ mix64((int(replica) * GAMMA + GAMMA) & M64)


def thread_count() -> int:
    try:
        n = int(os.environ.get("KPP_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def make_snapshot(t, raw, key, killing, origin_y, replica=0) -> PopulationSnapshot:
    ids, par, xs, ys, md, mn, bt = raw
    order = np.argsort(ids, kind="stable")
    return PopulationSnapshot(
        float(t), _freeze(ids[order]), _freeze(par[order]), _freeze(xs[order]),
        _freeze(ys[order]), _freeze(md[order]), _freeze(mn[order]), _freeze(bt[order]),
        int(key), bool(killing), float(origin_y), int(replica))


def simulate_tree(root_id: int, root_parent: int, x0: float, y0: float, mde0: float,
                  miny0: float, t0: float, stops: Sequence[float], *, dt_max: float,
                  killing: bool, cap: int, key: int, backend: str | None = None):
    """Thin wrapper over the kernel; returns (status string, t, raw snapshots)."""
    k = get_kernels(backend)
    status, t_stop, raw = k.simulate_tree(
        int(root_id), int(root_parent), float(x0), float(y0), float(mde0), float(miny0),
        float(t0), np.asarray(stops, dtype=float), float(dt_max), bool(killing), int(cap),
        int(key) & M64)
    return _STATUS[status], t_stop, raw


def simulate_replica(config: SimConfig, replica: int = 0, backend: str | None = None) -> list[PopulationSnapshot]:
    """One replica: a snapshot at every checkpoint time.

    Raises :class:`PopulationCapExceeded` if the population outgrows the cap.
    """
    key = replica_key(config.seed, replica)
    stops = config.checkpoints
    status, t_stop, raw = simulate_tree(
        0, -1, config.origin_x, config.origin_y, config.origin_x, config.origin_y, 0.0, stops,
        dt_max=config.dt_max, killing=config.killing_enabled, cap=config.population_cap,
        key=key, backend=backend)
    if status == "cap":
        raise PopulationCapExceeded(replica, t_stop, config.population_cap)
    if status != "ok":
        raise RuntimeError(f"replica {replica}: simulation failed ({status})")
    return [make_snapshot(t, r, key, config.killing_enabled, config.origin_y, replica)
            for t, r in zip(stops, raw)]


def map_replicas(fn: Callable[[int], object], replicas: int | Iterable[int],
                 threads: int | None = None) -> list:
    """Apply ``fn`` to replica indices, returning results in index order."""
    idx = range(replicas) if isinstance(replicas, int) else list(replicas)
    threads = thread_count() if threads is None else threads
    if threads <= 1:
        return [fn(i) for i in idx]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, idx))


def bridge_kill(y0: float, y1: float, dt: float, u: float) -> bool:
    """Kill decision for a Brownian bridge from y0 to y1 over time dt.

    True with probability exp(-2 y0 y1 / dt) when ``u`` is uniform on (0,1).
    This is the same event as the bridge minimum being <= 0.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if y0 <= 0 or y1 <= 0:
        raise ValueError("bridge_kill needs both endpoints positive")
    return u < math.exp(-2.0 * y0 * y1 / dt)


def bridge_min(a: float, b: float, h: float, u: float) -> float:
    """Exact sample of the minimum of a Brownian bridge from a to b over time h."""
    d = b - a
    return 0.5 * (a + b - math.sqrt(d * d - 2.0 * h * math.log(u)))


def bridge_max(a: float, b: float, h: float, u: float) -> float:
    d = b - a
    return 0.5 * (a + b + math.sqrt(d * d - 2.0 * h * math.log(u)))


def sample_bessel3(start: float, t: float, n_steps: int, seed=None) -> np.ndarray:
    """Bessel(3) path on ``n_steps + 1`` equally spaced times in [0, t].

    Built as the norm of a 3D Brownian motion from (start, 0, 0), which is
    exact in law at the grid points.
    """
    if not start > 0:
        raise ValueError("start must be > 0")
    if t < 0 or n_steps < 1:
        raise ValueError("need t >= 0 and n_steps >= 1")
    rng = np.random.default_rng(seed)
    h = t / n_steps
    inc = rng.standard_normal((n_steps, 3)) * math.sqrt(h)
    pos = np.vstack([[start, 0.0, 0.0], inc]).cumsum(axis=0)
    return np.linalg.norm(pos, axis=1)


def sample_bessel3_endpoints(start: float, t: float, size: int, seed=None) -> np.ndarray:
    """Independent Bessel(3) values at time t (the KS oracle)."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((size, 3)) * math.sqrt(t)
    g[:, 0] += start
    return np.linalg.norm(g, axis=1)


# --------------------------------------------------------------------------
# spine decompositions


@dataclass(frozen=True)
class SpineKind:
    name: str
    alpha: float | None = None
    lam: float | None = None
    mu: float | None = None

    @staticmethod
    def critical_additive() -> "SpineKind":
        return SpineKind("critical_additive")

    @staticmethod
    def shaved_derivative(alpha: float) -> "SpineKind":
        if not alpha > 0:
            raise ValueError("alpha must be > 0")
        return SpineKind("shaved_derivative", alpha=float(alpha))

    @staticmethod
    def supercritical(lam: float, mu: float) -> "SpineKind":
        if not (lam > 0 and mu > 0):
            raise ValueError("need lambda, mu > 0")
        return SpineKind("supercritical", lam=float(lam), mu=float(mu))


@dataclass
class SpineRun:
    kind: SpineKind
    times: np.ndarray
    x: np.ndarray
    y: np.ndarray
    max_drift_excess: np.ndarray
    branch_times: np.ndarray
    snapshots: list[PopulationSnapshot] = field(default_factory=list)
    spine_ids: list[int] = field(default_factory=list)


def _conditioned_drift_step(rng, y: float, mu: float, h: float) -> float:
    """One exact step of BM with drift mu conditioned to stay positive.

    Rejection from the drifted killed kernel with acceptance h(y') where
    h(y) = 1 - exp(-2 mu y) is the harmonic function of the conditioning.
    """
    for _ in range(100000):
        y1 = y + mu * h + math.sqrt(h) * rng.standard_normal()
        if y1 <= 0:
            continue
        if rng.random() < math.exp(-2.0 * y * y1 / h):
            continue
        if rng.random() < 1.0 - math.exp(-2.0 * mu * y1):
            return y1
    raise RuntimeError("conditioned step rejection sampler did not terminate")


def simulate_spine(kind: SpineKind, origin_y: float, horizon_T: float, seed=0,
                   checkpoint_times: Sequence[float] | None = None, dt_max: float = 0.01,
                   population_cap: int = 5_000_000, backend: str | None = None) -> SpineRun:
    """Spine decomposition of the size-biased half-plane BBM.

    The spine branches at rate 2; at each spine branch point the sibling
    starts an ordinary killed BBM. Spine motion depends on ``kind``:

    * critical_additive: X = B + sqrt(2) t, Y = Bessel(3) from origin_y
    * shaved_derivative(alpha): X = sqrt(2) t + alpha - S, Y = S', with S, S'
      independent Bessel(3) from alpha and origin_y
    * supercritical(lam, mu): X = BM with drift lam, Y = BM with drift mu
      conditioned to stay positive
    """
    if not isinstance(kind, SpineKind):
        raise ValueError("kind must be a SpineKind")
    if kind.name == "supercritical":
        if not (kind.lam > 0 and kind.mu > 0):
            raise ValueError("need lambda, mu > 0")
    elif kind.name == "shaved_derivative":
        if not (kind.alpha and kind.alpha > 0):
            raise ValueError("alpha must be > 0")
    elif kind.name != "critical_additive":
        raise ValueError(f"unknown spine kind {kind.name!r}")
    if not origin_y > 0:
        raise ValueError("origin_y must be > 0")
    cps = tuple(float(t) for t in (checkpoint_times if checkpoint_times is not None else (horizon_T,)))
    rng = np.random.default_rng(seed)
    key = replica_key(int(rng.integers(0, 2**63)), 0)

    # branch times of the spine: Poisson process of rate 2
    bts = []
    s = rng.exponential(0.5)
    while s < horizon_T:
        bts.append(s)
        s += rng.exponential(0.5)
    n_mesh = max(1, int(math.ceil(horizon_T / dt_max))) if horizon_T > 0 else 0
    grid = np.unique(np.concatenate([np.linspace(0.0, horizon_T, n_mesh + 1), bts, cps]))
    grid = grid[(grid >= 0) & (grid <= horizon_T)]

    n = grid.size
    xs = np.empty(n)
    ys = np.empty(n)
    md = np.empty(n)
    xs[0], ys[0], md[0] = 0.0, origin_y, 0.0
    if kind.name == "critical_additive":
        v3 = np.array([origin_y, 0.0, 0.0])
    elif kind.name == "shaved_derivative":
        v3 = np.array([origin_y, 0.0, 0.0])
        s3 = np.array([kind.alpha, 0.0, 0.0])
    for k in range(1, n):
        h = grid[k] - grid[k - 1]
        sh = math.sqrt(h)
        if kind.name == "critical_additive":
            xs[k] = xs[k - 1] + SQRT2 * h + sh * rng.standard_normal()
            v3 = v3 + sh * rng.standard_normal(3)
            ys[k] = float(np.linalg.norm(v3))
            a = xs[k - 1] - SQRT2 * grid[k - 1]
            b = xs[k] - SQRT2 * grid[k]
            md[k] = max(md[k - 1], bridge_max(a, b, h, 1.0 - rng.random()))
        elif kind.name == "shaved_derivative":
            s3 = s3 + sh * rng.standard_normal(3)
            xs[k] = SQRT2 * grid[k] + kind.alpha - float(np.linalg.norm(s3))
            v3 = v3 + sh * rng.standard_normal(3)
            ys[k] = float(np.linalg.norm(v3))
            md[k] = max(md[k - 1], xs[k] - SQRT2 * grid[k])
        else:
            xs[k] = xs[k - 1] + kind.lam * h + sh * rng.standard_normal()
            ys[k] = _conditioned_drift_step(rng, ys[k - 1], kind.mu, h)
            a = xs[k - 1] - SQRT2 * grid[k - 1]
            b = xs[k] - SQRT2 * grid[k]
            md[k] = max(md[k - 1], bridge_max(a, b, h, 1.0 - rng.random()))
    miny = np.minimum.accumulate(ys)

    # subtrees hanging off the spine
    spine_id = 0
    spine_ids = [0]
    subtree_raw: list[tuple[float, list]] = []
    for tb in bts:
        k = int(np.searchsorted(grid, tb))
        c1, c2 = 2 * spine_id + 1, 2 * spine_id + 2
        if rng.random() < 0.5:
            c1, c2 = c2, c1
        later = [t for t in cps if t >= tb]
        status, t_stop, raw = simulate_tree(
            c2, spine_id, xs[k], ys[k], md[k], miny[k], tb, later, dt_max=dt_max,
            killing=True, cap=population_cap, key=key, backend=backend)
        if status == "cap":
            raise PopulationCapExceeded(0, t_stop, population_cap)
        subtree_raw.append((tb, raw))
        spine_id = c1
        spine_ids.append(spine_id)

    snaps = []
    for ci, t in enumerate(cps):
        k = int(np.searchsorted(grid, t))
        cur = [i for i, tb in enumerate(bts) if tb <= t]
        sid = spine_ids[len(cur)]
        spar = spine_ids[len(cur) - 1] if cur else -1
        sb = bts[cur[-1]] if cur else 0.0
        parts = [(np.array([sid]), np.array([spar]), np.array([xs[k]]), np.array([ys[k]]),
                  np.array([md[k]]), np.array([miny[k]]), np.array([sb]))]
        for tb, raw in subtree_raw:
            if tb <= t:
                later = [tt for tt in cps if tt >= tb]
                parts.append(raw[later.index(t)])
        merged = tuple(np.concatenate([p[j] for p in parts]) for j in range(7))
        merged = (merged[0].astype(np.int64), merged[1].astype(np.int64)) + merged[2:]
        snaps.append(make_snapshot(t, merged, key, True, origin_y))
    return SpineRun(kind, grid, xs, ys, md, np.asarray(bts), snaps, spine_ids)
