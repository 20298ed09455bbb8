"""Pure-Python fallback for the compiled kernels.

Every expression follows the operation order of ``_kernels.pyx`` so both
backends return bit-identical trees for the same key.
"""
from __future__ import annotations

import math

import numpy as np

M64 = 0xFFFFFFFFFFFFFFFF
GAMMA = 0x9E3779B97F4A7C15
INV53 = 1.1102230246251565e-16
TWO_PI = 6.283185307179586
SQRT2 = 1.4142135623730951
MAX_PARENT_ID = 2305843009213693951

ST_OK, ST_CAP, ST_IDS, ST_MEM = 0, 1, 2, 3


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def _next_open(state: list, i: int) -> float:
    s = (state[i] + GAMMA) & M64
    state[i] = s
    return ((mix64(s) >> 11) + 0.5) * INV53


def stream_uniforms(key: int, pid: int, n: int) -> np.ndarray:
    state = [mix64((key & M64) ^ mix64(pid & M64))]
    return np.array([_next_open(state, 0) for _ in range(n)])


class _Pop:
    __slots__ = ("x", "y", "mde", "miny", "birth", "t", "clock", "pid",
                 "parent", "rng", "alive", "nalive")

    def __init__(self):
        for name in self.__slots__[:-1]:
            setattr(self, name, [])
        self.nalive = 0

    def add(self, pid, parent, x, y, mde, miny, birth, key):
        self.pid.append(pid)
        self.parent.append(parent)
        self.x.append(x)
        self.y.append(y)
        self.mde.append(mde)
        self.miny.append(miny)
        self.birth.append(birth)
        self.t.append(birth)
        self.alive.append(True)
        self.rng.append(mix64(key ^ mix64(pid & M64)))
        self.clock.append(0.0)
        i = len(self.pid) - 1
        self.clock[i] = birth - math.log(_next_open(self.rng, i))

    def reset(self, i, pid, parent, birth, key):
        self.pid[i] = pid
        self.parent[i] = parent
        self.birth[i] = birth
        self.t[i] = birth
        self.alive[i] = True
        self.rng[i] = mix64(key ^ mix64(pid & M64))
        self.clock[i] = birth - math.log(_next_open(self.rng, i))


def _advance(p: _Pop, i, stop, dt_max, killing, key, cap) -> int:
    while True:
        t = p.t[i]
        t1 = p.clock[i]
        if stop < t1:
            t1 = stop
        if t + dt_max < t1:
            t1 = t + dt_max
        h = t1 - t
        if h > 0.0:
            u1 = _next_open(p.rng, i)
            u2 = _next_open(p.rng, i)
            u3 = _next_open(p.rng, i)
            u4 = _next_open(p.rng, i)
            r = math.sqrt(-2.0 * math.log(u1))
            th = TWO_PI * u2
            sh = math.sqrt(h)
            x1 = p.x[i] + sh * (r * math.cos(th))
            y1 = p.y[i] + sh * (r * math.sin(th))
            a = p.x[i] - SQRT2 * t
            b = x1 - SQRT2 * t1
            d = b - a
            m = 0.5 * (a + b + math.sqrt(d * d - 2.0 * h * math.log(u3)))
            if m > p.mde[i]:
                p.mde[i] = m
            d = y1 - p.y[i]
            m = 0.5 * (p.y[i] + y1 - math.sqrt(d * d - 2.0 * h * math.log(u4)))
            if m < p.miny[i]:
                p.miny[i] = m
            p.x[i] = x1
            p.y[i] = y1
            p.t[i] = t1
            if killing and m <= 0.0:
                p.alive[i] = False
                p.nalive -= 1
                return ST_OK
        if t1 == p.clock[i]:
            k = p.pid[i]
            if k > MAX_PARENT_ID:
                return ST_IDS
            p.add(2 * k + 2, k, p.x[i], p.y[i], p.mde[i], p.miny[i], t1, key)
            p.reset(i, 2 * k + 1, k, t1, key)
            p.nalive += 1
            if p.nalive > cap:
                return ST_CAP
        if t1 >= stop:
            return ST_OK


def _compact(p: _Pop) -> None:
    keep = [i for i, a in enumerate(p.alive) if a]
    for name in ("x", "y", "mde", "miny", "birth", "t", "clock", "pid",
                 "parent", "rng", "alive"):
        col = getattr(p, name)
        setattr(p, name, [col[i] for i in keep])


def _snapshot(p: _Pop):
    return (np.array(p.pid, dtype=np.int64), np.array(p.parent, dtype=np.int64),
            np.array(p.x, dtype=float), np.array(p.y, dtype=float),
            np.array(p.mde, dtype=float), np.array(p.miny, dtype=float),
            np.array(p.birth, dtype=float))


def simulate_tree(root_id, root_parent, x0, y0, mde0, miny0, t0, stops,
                  dt_max, killing, cap, key):
    """Run one branching tree from a single root through ``stops``.

    Returns ``(status, t_stop, snapshots)`` where each snapshot is the tuple
    ``(ids, parents, x, y, max_drift_excess, min_y, birth)`` in storage order.
    A nonzero status means the run stopped early at ``t_stop``.
    """
    key = int(key) & M64
    stops = [float(s) for s in np.asarray(stops, dtype=float)]
    p = _Pop()
    p.add(int(root_id), int(root_parent), float(x0), float(y0), float(mde0),
          float(miny0), float(t0), key)
    p.nalive = 1
    if killing and y0 <= 0.0:
        p.alive[0] = False
        p.nalive = 0
    out = []
    for stop in stops:
        i = 0
        while i < len(p.pid):
            if p.alive[i] and p.t[i] < stop:
                st = _advance(p, i, stop, dt_max, killing, key, cap)
                if st != ST_OK:
                    return st, stop, out
            i += 1
        _compact(p)
        out.append(_snapshot(p))
    return ST_OK, (stops[-1] if stops else t0), out


def steady_operator(u, hx, hy, c, order=2):
    """Interior values of Lap u/2 + c u_x + u - u^2 (order 4: 2nd order next to the edges)."""
    ihx2 = 1.0 / (hx * hx)
    ihy2 = 1.0 / (hy * hy)
    i2hx = 0.5 / hx
    v = u[1:-1, 1:-1]
    d2x = (u[1:-1, 2:] - 2.0 * v + u[1:-1, :-2]) * ihx2
    d2y = (u[2:, 1:-1] - 2.0 * v + u[:-2, 1:-1]) * ihy2
    d1x = (u[1:-1, 2:] - u[1:-1, :-2]) * i2hx
    if order == 4:
        i12hx2 = 1.0 / (12.0 * hx * hx)
        i12hy2 = 1.0 / (12.0 * hy * hy)
        i12hx = 1.0 / (12.0 * hx)
        w = u[1:-1, 2:-2]
        d2x[:, 1:-1] = (-u[1:-1, 4:] + 16.0 * u[1:-1, 3:-1] - 30.0 * w + 16.0 * u[1:-1, 1:-3] - u[1:-1, :-4]) * i12hx2
        d1x[:, 1:-1] = (-u[1:-1, 4:] + 8.0 * u[1:-1, 3:-1] - 8.0 * u[1:-1, 1:-3] + u[1:-1, :-4]) * i12hx
        w = u[2:-2, 1:-1]
        d2y[1:-1, :] = (-u[4:, 1:-1] + 16.0 * u[3:-1, 1:-1] - 30.0 * w + 16.0 * u[1:-3, 1:-1] - u[:-4, 1:-1]) * i12hy2
    elif order != 2:
        raise ValueError("order must be 2 or 4")
    return 0.5 * (d2x + d2y) + c * d1x + v - v * v


def stencil_step(u, out, hx, hy, c, dt, order=2):
    """Explicit Euler update of interior nodes (vectorised)."""
    out[1:-1, 1:-1] = u[1:-1, 1:-1] + dt * steady_operator(u, hx, hy, c, order)
