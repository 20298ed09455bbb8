"""Compiled hot loops.

``simulate_tree`` propagates one branching Brownian tree through a list of
stop times. ``stencil_step`` is one explicit Euler update of the moving-frame
KPP equation. ``_pykernels`` mirrors both line for line; the arithmetic order
here must stay identical to it.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, cos, sin
from libc.stdlib cimport malloc, realloc, free
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef double INV53 = 1.1102230246251565e-16
cdef double TWO_PI = 6.283185307179586
cdef double SQRT2 = 1.4142135623730951
cdef int64_t MAX_PARENT_ID = 2305843009213693951  # 2**61 - 1

cdef int ST_OK = 0
cdef int ST_CAP = 1
cdef int ST_IDS = 2
cdef int ST_MEM = 3


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double next_open(uint64_t *s) nogil:
    s[0] += GAMMA
    return (<double>(mix64(s[0]) >> 11) + 0.5) * INV53


def stream_uniforms(unsigned long long key, long long pid, Py_ssize_t n):
    """First ``n`` open-interval uniforms of a particle stream (testing aid)."""
    cdef uint64_t s = mix64(<uint64_t>key ^ mix64(<uint64_t>pid))
    out = np.empty(n)
    cdef double[::1] o = out
    cdef Py_ssize_t k
    for k in range(n):
        o[k] = next_open(&s)
    return out


cdef struct Pop:
    Py_ssize_t n
    Py_ssize_t capacity
    Py_ssize_t nalive
    double *x
    double *y
    double *mde
    double *miny
    double *birth
    double *t
    double *clock
    int64_t *pid
    int64_t *parent
    uint64_t *rng
    char *alive


cdef int pop_alloc(Pop *p, Py_ssize_t cap) nogil:
    p.n = 0
    p.nalive = 0
    p.capacity = cap
    p.x = <double *>malloc(cap * sizeof(double))
    p.y = <double *>malloc(cap * sizeof(double))
    p.mde = <double *>malloc(cap * sizeof(double))
    p.miny = <double *>malloc(cap * sizeof(double))
    p.birth = <double *>malloc(cap * sizeof(double))
    p.t = <double *>malloc(cap * sizeof(double))
    p.clock = <double *>malloc(cap * sizeof(double))
    p.pid = <int64_t *>malloc(cap * sizeof(int64_t))
    p.parent = <int64_t *>malloc(cap * sizeof(int64_t))
    p.rng = <uint64_t *>malloc(cap * sizeof(uint64_t))
    p.alive = <char *>malloc(cap * sizeof(char))
    if (p.x == NULL or p.y == NULL or p.mde == NULL or p.miny == NULL
            or p.birth == NULL or p.t == NULL or p.clock == NULL
            or p.pid == NULL or p.parent == NULL or p.rng == NULL
            or p.alive == NULL):
        return ST_MEM
    return ST_OK


cdef void pop_free(Pop *p) nogil:
    free(p.x)
    free(p.y)
    free(p.mde)
    free(p.miny)
    free(p.birth)
    free(p.t)
    free(p.clock)
    free(p.pid)
    free(p.parent)
    free(p.rng)
    free(p.alive)


cdef int pop_grow(Pop *p) nogil:
    cdef Py_ssize_t cap = 2 * p.capacity
    cdef void *q
    q = realloc(p.x, cap * sizeof(double))
    if q == NULL:
        return ST_MEM
    p.x = <double *>q
    q = realloc(p.y, cap * sizeof(double))
    if q == NULL:
        return ST_MEM
    p.y = <double *>q
    q = realloc(p.mde, cap * sizeof(double))
    if q == NULL:
        return ST_MEM
    p.mde = <double *>q
    q = realloc(p.miny, cap * sizeof(double))
    if q == NULL:
        return ST_MEM
    p.miny = <double *>q
    q = realloc(p.birth, cap * sizeof(double))
    if q == NULL:
        return ST_MEM
    p.birth = <double *>q
    q = realloc(p.t, cap * sizeof(double))
    if q == NULL:
        return ST_MEM
    p.t = <double *>q
    q = realloc(p.clock, cap * sizeof(double))
    if q == NULL:
        return ST_MEM
    p.clock = <double *>q
    q = realloc(p.pid, cap * sizeof(int64_t))
    if q == NULL:
        return ST_MEM
    p.pid = <int64_t *>q
    q = realloc(p.parent, cap * sizeof(int64_t))
    if q == NULL:
        return ST_MEM
    p.parent = <int64_t *>q
    q = realloc(p.rng, cap * sizeof(uint64_t))
    if q == NULL:
        return ST_MEM
    p.rng = <uint64_t *>q
    q = realloc(p.alive, cap * sizeof(char))
    if q == NULL:
        return ST_MEM
    p.alive = <char *>q
    p.capacity = cap
    return ST_OK


cdef inline void set_particle(Pop *p, Py_ssize_t i, int64_t pid, int64_t parent,
                              double x, double y, double mde, double miny,
                              double birth, uint64_t key) nogil:
    p.pid[i] = pid
    p.parent[i] = parent
    p.x[i] = x
    p.y[i] = y
    p.mde[i] = mde
    p.miny[i] = miny
    p.birth[i] = birth
    p.t[i] = birth
    p.alive[i] = 1
    p.rng[i] = mix64(key ^ mix64(<uint64_t>pid))
    p.clock[i] = birth - log(next_open(&p.rng[i]))


cdef int advance(Pop *p, Py_ssize_t i, double stop, double dt_max,
                 bint killing, uint64_t key, Py_ssize_t cap) nogil:
    cdef double t, t1, h, u1, u2, u3, u4, r, th, sh, x1, y1, a, b, d, m
    cdef int64_t k
    cdef int st
    while True:
        t = p.t[i]
        t1 = p.clock[i]
        if stop < t1:
            t1 = stop
        if t + dt_max < t1:
            t1 = t + dt_max
        h = t1 - t
        if h > 0.0:
            u1 = next_open(&p.rng[i])
            u2 = next_open(&p.rng[i])
            u3 = next_open(&p.rng[i])
            u4 = next_open(&p.rng[i])
            r = sqrt(-2.0 * log(u1))
            th = TWO_PI * u2
            sh = sqrt(h)
            x1 = p.x[i] + sh * (r * cos(th))
            y1 = p.y[i] + sh * (r * sin(th))
            # exact running maximum of X_s - sqrt(2) s over the sub-step
            a = p.x[i] - SQRT2 * t
            b = x1 - SQRT2 * t1
            d = b - a
            m = 0.5 * (a + b + sqrt(d * d - 2.0 * h * log(u3)))
            if m > p.mde[i]:
                p.mde[i] = m
            # exact running minimum of Y_s over the sub-step
            d = y1 - p.y[i]
            m = 0.5 * (p.y[i] + y1 - sqrt(d * d - 2.0 * h * log(u4)))
            if m < p.miny[i]:
                p.miny[i] = m
            p.x[i] = x1
            p.y[i] = y1
            p.t[i] = t1
            if killing and m <= 0.0:
                p.alive[i] = 0
                p.nalive -= 1
                return ST_OK
        if t1 == p.clock[i]:
            k = p.pid[i]
            if k > MAX_PARENT_ID:
                return ST_IDS
            if p.n == p.capacity:
                st = pop_grow(p)
                if st != ST_OK:
                    return st
            set_particle(p, p.n, 2 * k + 2, k, p.x[i], p.y[i], p.mde[i],
                         p.miny[i], t1, key)
            p.n += 1
            set_particle(p, i, 2 * k + 1, k, p.x[i], p.y[i], p.mde[i],
                         p.miny[i], t1, key)
            p.nalive += 1
            if p.nalive > cap:
                return ST_CAP
        if t1 >= stop:
            return ST_OK


cdef int run_segment(Pop *p, double stop, double dt_max, bint killing,
                     uint64_t key, Py_ssize_t cap) nogil:
    cdef Py_ssize_t i = 0
    cdef int st
    while i < p.n:
        if p.alive[i] and p.t[i] < stop:
            st = advance(p, i, stop, dt_max, killing, key, cap)
            if st != ST_OK:
                return st
        i += 1
    return ST_OK


cdef void compact(Pop *p) nogil:
    cdef Py_ssize_t i, j = 0
    for i in range(p.n):
        if p.alive[i]:
            if j != i:
                p.x[j] = p.x[i]
                p.y[j] = p.y[i]
                p.mde[j] = p.mde[i]
                p.miny[j] = p.miny[i]
                p.birth[j] = p.birth[i]
                p.t[j] = p.t[i]
                p.clock[j] = p.clock[i]
                p.pid[j] = p.pid[i]
                p.parent[j] = p.parent[i]
                p.rng[j] = p.rng[i]
                p.alive[j] = 1
            j += 1
    p.n = j


cdef tuple snapshot(Pop *p):
    cdef Py_ssize_t n = p.n, i
    ids = np.empty(n, dtype=np.int64)
    par = np.empty(n, dtype=np.int64)
    xs = np.empty(n)
    ys = np.empty(n)
    md = np.empty(n)
    mn = np.empty(n)
    bt = np.empty(n)
    cdef int64_t[::1] vi = ids
    cdef int64_t[::1] vp = par
    cdef double[::1] vx = xs
    cdef double[::1] vy = ys
    cdef double[::1] vm = md
    cdef double[::1] vn = mn
    cdef double[::1] vb = bt
    for i in range(n):
        vi[i] = p.pid[i]
        vp[i] = p.parent[i]
        vx[i] = p.x[i]
        vy[i] = p.y[i]
        vm[i] = p.mde[i]
        vn[i] = p.miny[i]
        vb[i] = p.birth[i]
    return (ids, par, xs, ys, md, mn, bt)


def simulate_tree(long long root_id, long long root_parent, double x0,
                  double y0, double mde0, double miny0, double t0, stops,
                  double dt_max, bint killing, Py_ssize_t cap,
                  unsigned long long key):
    """Run one tree from a single root; see ``_pykernels.simulate_tree``."""
    cdef double[::1] st_arr = np.ascontiguousarray(stops, dtype=np.float64)
    cdef Py_ssize_t ns = st_arr.shape[0], s
    cdef Pop pop
    cdef int status = ST_OK
    cdef double stop
    cdef uint64_t ukey = <uint64_t>key
    out = []
    if pop_alloc(&pop, 64) != ST_OK:
        pop_free(&pop)
        raise MemoryError("particle arrays")
    try:
        set_particle(&pop, 0, root_id, root_parent, x0, y0, mde0, miny0, t0, ukey)
        pop.n = 1
        pop.nalive = 1
        if killing and y0 <= 0.0:
            pop.alive[0] = 0
            pop.nalive = 0
        for s in range(ns):
            stop = st_arr[s]
            with nogil:
                status = run_segment(&pop, stop, dt_max, killing, ukey, cap)
                if status == ST_OK:
                    compact(&pop)
            if status != ST_OK:
                return status, stop, out
            out.append(snapshot(&pop))
        return status, st_arr[ns - 1] if ns else t0, out
    finally:
        pop_free(&pop)


def stencil_step(double[:, ::1] u, double[:, ::1] out, double hx, double hy,
                 double c, double dt, int order=2):
    """Explicit Euler update of interior nodes: u + dt*(Lap/2 + c*u_x + u - u^2).

    order=4 uses five-point differences except next to the edges.
    """
    cdef Py_ssize_t ny = u.shape[0], nx = u.shape[1], i, j
    cdef double ihx2 = 1.0 / (hx * hx)
    cdef double ihy2 = 1.0 / (hy * hy)
    cdef double i2hx = 0.5 / hx
    cdef double i12hx2 = 1.0 / (12.0 * hx * hx)
    cdef double i12hy2 = 1.0 / (12.0 * hy * hy)
    cdef double i12hx = 1.0 / (12.0 * hx)
    cdef double v, d2x, d2y, d1x
    cdef bint hi = order == 4
    if order != 2 and order != 4:
        raise ValueError("order must be 2 or 4")
    with nogil:
        for j in range(1, ny - 1):
            for i in range(1, nx - 1):
                v = u[j, i]
                if hi and i >= 2 and i <= nx - 3:
                    d2x = (-u[j, i + 2] + 16.0 * u[j, i + 1] - 30.0 * v + 16.0 * u[j, i - 1] - u[j, i - 2]) * i12hx2
                    d1x = (-u[j, i + 2] + 8.0 * u[j, i + 1] - 8.0 * u[j, i - 1] + u[j, i - 2]) * i12hx
                else:
                    d2x = (u[j, i + 1] - 2.0 * v + u[j, i - 1]) * ihx2
                    d1x = (u[j, i + 1] - u[j, i - 1]) * i2hx
                if hi and j >= 2 and j <= ny - 3:
                    d2y = (-u[j + 2, i] + 16.0 * u[j + 1, i] - 30.0 * v + 16.0 * u[j - 1, i] - u[j - 2, i]) * i12hy2
                else:
                    d2y = (u[j + 1, i] - 2.0 * v + u[j - 1, i]) * ihy2
                out[j, i] = v + dt * (0.5 * (d2x + d2y) + c * d1x + v - v * v)
