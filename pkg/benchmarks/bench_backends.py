"""Compiled vs pure-Python kernels: wall time and bit equality.

    python3 benchmarks/bench_backends.py [--replicas 20] [--repeat 3]

Runs the BBM tree kernel and the explicit stencil step on both backends,
checks the outputs agree bit for bit, and prints a timing table.
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from kpplab._backend import native_kernels
from kpplab.bbm_sim import SimConfig, simulate_replica
from kpplab.pde_2d import C_STAR, Domain, make_boundary, product_guess


def best_of(fn, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_bbm(backend, replicas, T):
    cfg = SimConfig(origin_y=2.0, horizon_T=T, checkpoint_times=(T / 2, T), seed=11, dt_max=0.01)

    def go():
        return [simulate_replica(cfg, r, backend) for r in range(replicas)]
    return go


def same_trees(a, b):
    for ra, rb in zip(a, b):
        for sa, sb in zip(ra, rb):
            for f in ("ids", "parent_ids", "x", "y", "max_drift_excess", "min_y"):
                if not np.array_equal(getattr(sa, f), getattr(sb, f)):
                    return False
    return True


def bench_stencil(kernels, u0, steps, h, dt):
    def go():
        a = u0.copy()
        b = a.copy()
        for _ in range(steps):
            kernels.stencil_step(a, b, h, h, C_STAR, dt, 2)
            a, b = b, a
        return a
    return go


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--replicas", type=int, default=20)
    p.add_argument("--T", type=float, default=4.0)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--repeat", type=int, default=3)
    a = p.parse_args(argv)
    if native_kernels is None:
        print("compiled kernels not built; only the fallback can be timed")
        return 1
    from kpplab import _pykernels as py

    rows = []
    tp, outp = best_of(bench_bbm("python", a.replicas, a.T), a.repeat)
    tc, outc = best_of(bench_bbm("cython", a.replicas, a.T), a.repeat)
    n = sum(len(s) for r in outc for s in r)
    rows.append((f"BBM trees ({a.replicas} replicas, T={a.T:g}, {n} recorded particles)", tp, tc,
                 same_trees(outp, outc)))

    dom = Domain(hx=0.1, hy=0.1)
    _, b = make_boundary(C_STAR, dom)
    u0 = np.ascontiguousarray(product_guess(dom, C_STAR, b))
    dt = 0.9 / (2 / dom.hx**2 + C_STAR / dom.hx + 1)
    tp, up = best_of(bench_stencil(py, u0, a.steps, dom.hx, dt), a.repeat)
    tc, uc = best_of(bench_stencil(native_kernels, u0, a.steps, dom.hx, dt), a.repeat)
    rows.append((f"stencil ({dom.nx}x{dom.ny}, {a.steps} steps)", tp, tc, bool(np.array_equal(up, uc))))

    print(f"{'kernel':<58} {'python s':>9} {'cython s':>9} {'speedup':>8}  identical")
    for name, tp, tc, same in rows:
        print(f"{name:<58} {tp:9.3f} {tc:9.3f} {tp / tc:8.1f}  {same}")
    return 0 if all(r[3] for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
