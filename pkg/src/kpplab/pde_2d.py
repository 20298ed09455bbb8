"""Finite differences for the half-plane traveling wave.

Steady equation on a truncated box [x_lo, x_hi] x [0, y_hi]:

    Psi_xx/2 + Psi_yy/2 + c Psi_x + Psi - Psi^2 = 0

with Psi = 0 at the bottom, phi(y) on the left, a 1D wave on the top and, on
the right, either 0 or a tail condition (the tilted field e^{k x} Psi is
continued linearly for the minimal speed and constantly for supercritical
speeds). The discrete steady state is found by pseudo-transient continuation
(implicit pseudo-time steps that become Newton steps) on a ladder of grids.
Explicit Euler marching with the usual stability bound is used for the
time-dependent diagnostics.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import RegularGridInterpolator
from scipy.optimize import brentq
from scipy.special import j0 as bessel_j0

from ._backend import get_kernels
from ._pykernels import steady_operator
from .waves_1d import (C_STAR, C_TOL, Profile1D, check_speed, solve_steady_phi,
                       solve_wave_1d, tail_rate)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Domain:
    x_lo: float = -10.0
    x_hi: float = 25.0
    y_hi: float = 40.0
    hx: float = 0.05
    hy: float = 0.05

    @property
    def nx(self) -> int:
        return int(round((self.x_hi - self.x_lo) / self.hx)) + 1

    @property
    def ny(self) -> int:
        return int(round(self.y_hi / self.hy)) + 1

    def refined(self, factor: float) -> "Domain":
        return replace(self, hx=self.hx * factor, hy=self.hy * factor)

    def check(self):
        for L, h in ((self.x_hi - self.x_lo, self.hx), (self.y_hi, self.hy)):
            if abs(L / h - round(L / h)) > 1e-9:
                raise ValueError("domain lengths must be multiples of the spacings")
        if self.nx < 5 or self.ny < 5:
            raise ValueError("grid too small")


@dataclass
class Boundary:
    left: np.ndarray
    top: np.ndarray
    right_mode: str = "tail"
    a1: float | np.ndarray = 0.0  # right column: a1 * (column N-1) + a2 * (column N-2), per row
    a2: float | np.ndarray = 0.0
    desc: dict = field(default_factory=dict)
    right: np.ndarray | None = None


@dataclass
class Field2D:
    x_lo: float
    hx: float
    hy: float
    values: np.ndarray  # shape (ny, nx); values[j, i] at (x_lo + i hx, j hy)
    frame_speed_c: float
    boundary: Boundary | None = None
    meta: dict = field(default_factory=dict)
    order: int = 4

    @property
    def ny(self) -> int:
        return self.values.shape[0]

    @property
    def nx(self) -> int:
        return self.values.shape[1]

    @property
    def x(self) -> np.ndarray:
        return self.x_lo + self.hx * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return self.hy * np.arange(self.ny)

    @property
    def x_range(self) -> tuple[float, float]:
        return (self.x_lo, self.x_lo + self.hx * (self.nx - 1))

    @property
    def y_range(self) -> tuple[float, float]:
        return (0.0, self.hy * (self.ny - 1))

    @property
    def bc(self) -> dict:
        return dict(self.boundary.desc) if self.boundary is not None else {}

    def __call__(self, x, y, outside: float = 0.0) -> np.ndarray:
        """Bilinear interpolation; ``outside`` off the grid, 0 for y < 0."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        fx = (x - self.x_lo) / self.hx
        fy = y / self.hy
        inside = (fx >= 0) & (fx <= self.nx - 1) & (fy >= 0) & (fy <= self.ny - 1)
        i = np.clip(np.floor(fx).astype(int), 0, self.nx - 2)
        j = np.clip(np.floor(fy).astype(int), 0, self.ny - 2)
        tx = np.clip(fx - i, 0.0, 1.0)
        ty = np.clip(fy - j, 0.0, 1.0)
        v = self.values
        val = ((1 - tx) * (1 - ty) * v[j, i] + tx * (1 - ty) * v[j, i + 1]
               + (1 - tx) * ty * v[j + 1, i] + tx * ty * v[j + 1, i + 1])
        out = np.where(inside, val, outside)
        return np.where(y < 0, 0.0, out)

    def shifted(self, s: float) -> "Field2D":
        """Field of (x, y) -> Psi(x - s, y)."""
        meta = dict(self.meta)
        meta["x_shift"] = meta.get("x_shift", 0.0) + s
        return replace(self, x_lo=self.x_lo + s, meta=meta)

    def row(self, y: float) -> np.ndarray:
        j = int(round(y / self.hy))
        if abs(j * self.hy - y) > 1e-9:
            raise ValueError(f"y={y} is not a grid row")
        return self.values[j]

    def sidecar(self) -> dict:
        out = dict(x_range=self.x_range, y_range=self.y_range, hx=self.hx, hy=self.hy,
                   nx=self.nx, ny=self.ny, frame_speed_c=self.frame_speed_c, bc=self.bc,
                   order=self.order)
        for k, v in self.meta.items():
            if isinstance(v, (int, float, str, bool, list, tuple, dict)) or v is None:
                out[k] = v
        return json.loads(json.dumps(out, default=float))


# --------------------------------------------------------------------------
# boundary data


_PROFILE_CACHE: dict = {}


def cached_phi() -> Profile1D:
    if "phi" not in _PROFILE_CACHE:
        _PROFILE_CACHE["phi"] = solve_steady_phi(30.0, 0.005)
    return _PROFILE_CACHE["phi"]


def cached_wave(c: float) -> Profile1D:
    c = check_speed(c)
    key = ("wave", round(c, 12))
    if key not in _PROFILE_CACHE:
        rng = (-40.0, 30.0) if c < 1.6 else (-40.0, 60.0)
        _PROFILE_CACHE[key] = solve_wave_1d(c, rng, 0.005)
    return _PROFILE_CACHE[key]


def speed_of(lam: float, mu: float) -> float:
    """x-speed (lam^2 + mu^2 + 2) / (2 lam) of the supercritical wave."""
    return (lam * lam + mu * mu + 2.0) / (2.0 * lam)


def rotated_speed(lam: float, mu: float) -> float:
    """c(lam, mu) = (lam^2 + mu^2 + 2) / (2 sqrt(lam^2 + mu^2))."""
    r = math.hypot(lam, mu)
    return (lam * lam + mu * mu + 2.0) / (2.0 * r)


def _tail_fit():
    if "tail" not in _PROFILE_CACHE:
        from .waves_1d import fit_tail_constant
        _PROFILE_CACHE["tail"] = fit_tail_constant(cached_wave(C_STAR))
    return _PROFILE_CACHE["tail"]


def make_boundary(c: float, dom: Domain, lam_mu: tuple[float, float] | None = None,
                  right_bc: str = "far-field", phi: Profile1D | None = None,
                  wave: Profile1D | None = None, left_bc: str = "capped") -> tuple[float, Boundary]:
    """Boundary data and the tail rate used for the right edge and scaling.

    ``left_bc="capped"`` uses min(phi(y), top profile continued down the left
    edge), which agrees with phi except near the top-left corner and makes
    the two Dirichlet data meet there; ``"phi"`` is plain phi(y).
    """
    if left_bc not in ("capped", "phi"):
        raise ValueError("left_bc must be 'capped' or 'phi'")
    c = check_speed(c)
    phi = phi or cached_phi()
    x = dom.x_lo + dom.hx * np.arange(dom.nx)
    y = dom.hy * np.arange(dom.ny)
    left = phi(y)
    left[0] = 0.0
    critical = abs(c - C_STAR) <= C_TOL and lam_mu is None
    if critical:
        w = wave or cached_wave(C_STAR)
        top = w(x - math.log(dom.y_hi) / SQRT2)
        edge = w(dom.x_lo - np.log(np.maximum(y, 1.0)) / SQRT2)
        kappa = SQRT2
        desc = dict(top=f"w_c*(x - log(y_hi)/sqrt2), y_hi={dom.y_hi}")
    elif lam_mu is not None:
        lam, mu = lam_mu
        if not (lam > 0 and mu > 0 and lam * lam + mu * mu < 2):
            raise ValueError("(lambda, mu) must lie in the open quarter disk")
        if abs(speed_of(lam, mu) - c) > 1e-9:
            raise ValueError(f"frame speed {c} does not match (lambda, mu) speed {speed_of(lam, mu)}")
        rho = math.hypot(lam, mu)
        w = wave or cached_wave(rotated_speed(lam, mu))
        top = w((lam * x - mu * dom.y_hi) / rho)
        edge = w((lam * dom.x_lo - mu * y) / rho)
        kappa = lam
        desc = dict(top=f"w_c(lam,mu)((lam x - mu y_hi)/rho), lam={lam}, mu={mu}")
    else:
        w = wave or cached_wave(c)
        top = w(x)
        edge = np.full_like(y, top[0])
        kappa = tail_rate(c)
        desc = dict(top=f"w_c(x), c={c}")
    if left_bc == "capped":
        left = np.minimum(left, edge)
    left[-1] = top[0]
    e = math.exp(-kappa * dom.hx)
    if right_bc == "tail" or (right_bc == "asymptotic" and not critical):
        a1, a2 = (2.0 * e, -e * e) if critical else (e, 0.0)
    elif right_bc == "asymptotic":
        # Theta = e^{sqrt2 x} Psi ~ y (x - log|(x, y)|/sqrt2 + const): Theta_xx = g Theta_x
        xm = dom.x_hi - dom.hx
        yy = y[1:-1]
        r2 = xm * xm + yy * yy
        g = ((xm * xm - yy * yy) / (SQRT2 * r2 * r2)) / (1.0 - xm / (SQRT2 * r2))
        gh = 0.5 * g * dom.hx
        a1 = 2.0 * e / (1.0 - gh)
        a2 = -(1.0 + gh) * e * e / (1.0 - gh)
    elif right_bc in ("zero", "far-field"):
        a1 = a2 = 0.0
    else:
        raise ValueError("right_bc must be 'far-field', 'asymptotic', 'tail' or 'zero'")
    right = None
    if right_bc == "far-field":
        xr = dom.x_hi
        yy = y[1:-1]
        if critical:
            # Psi ~ K y (x - log|(x, y)|/sqrt2 + a) e^{-sqrt2 x}, with K, a from the 1D tail
            tf = _tail_fit()
            r = np.maximum(np.hypot(xr, yy), 1.0)
            right = tf.K_star * yy * (xr - np.log(r) / SQRT2 + tf.a) * math.exp(-SQRT2 * xr)
        elif lam_mu is not None:
            # linear tail mode e^{-lam x} sinh(mu y), matched to the top-right corner
            mu = lam_mu[1]
            right = top[-1] * np.sinh(mu * yy) / math.sinh(mu * dom.y_hi)
        else:
            right = top[-1] * yy / dom.y_hi
    desc.update(bottom="Dirichlet 0",
                left="Dirichlet phi(y)" if left_bc == "phi" else "Dirichlet min(phi(y), top profile at x_lo)",
                right=right_bc,
                right_rate=kappa)
    return kappa, Boundary(left, top, right_bc, a1, a2, desc, right)


def apply_bc(u: np.ndarray, b: Boundary) -> np.ndarray:
    u[0, :] = 0.0
    u[:, 0] = b.left
    if b.right is not None:
        u[1:-1, -1] = b.right
    else:
        u[1:-1, -1] = b.a1 * u[1:-1, -2] + b.a2 * u[1:-1, -3]
    u[-1, :] = b.top
    return u


# --------------------------------------------------------------------------
# residual and Jacobian


def interior_residual(u: np.ndarray, hx: float, hy: float, c: float, order: int = 4) -> np.ndarray:
    return steady_operator(u, hx, hy, c, order)


@dataclass(frozen=True)
class ResidualNorms:
    sup: float
    l2: float


def residual(field: Field2D, c: float | None = None, order: int | None = None) -> ResidualNorms:
    """Sup and grid-L2 norms of the steady residual on interior nodes.

    ``order`` picks the difference stencils (default: the field's own, so a
    converged field scores at solver tolerance; 2 gives the truncation view).
    """
    c = field.frame_speed_c if c is None else c
    order = field.order if order is None else order
    r = interior_residual(field.values, field.hx, field.hy, c, order)
    if r.size == 0:
        return ResidualNorms(0.0, 0.0)
    return ResidualNorms(float(np.max(np.abs(r))), float(np.sqrt(np.sum(r * r) * field.hx * field.hy)))


def _stencil_terms(q: int, m: int, hx: float, hy: float, c: float, order: int):
    """(di, dj, coefficient array) of the linear part on the (q, m) interior."""
    terms = []
    ax2 = np.full((q, m), 0.5 / hx**2)
    ax1 = np.full((q, m), c / (2 * hx))
    ay2 = np.full((q, m), 0.5 / hy**2)
    x4 = np.zeros((q, m), bool)
    y4 = np.zeros((q, m), bool)
    if order == 4:
        x4[:, 1:-1] = True
        y4[1:-1, :] = True
    a = 0.5 / (12 * hx**2)
    b = c / (12 * hx)
    e = 0.5 / (12 * hy**2)
    center = np.where(x4, -30 * a, -2 * ax2) + np.where(y4, -30 * e, -2 * ay2)
    terms.append((0, 0, center))
    terms.append((-1, 0, np.where(x4, 16 * a - 8 * b, ax2 - ax1)))
    terms.append((1, 0, np.where(x4, 16 * a + 8 * b, ax2 + ax1)))
    terms.append((0, -1, np.where(y4, 16 * e, ay2)))
    terms.append((0, 1, np.where(y4, 16 * e, ay2)))
    if order == 4:
        terms.append((-2, 0, np.where(x4, -a + b, 0.0)))
        terms.append((2, 0, np.where(x4, -a - b, 0.0)))
        terms.append((0, -2, np.where(y4, -e, 0.0)))
        terms.append((0, 2, np.where(y4, -e, 0.0)))
    return terms


def _jacobian(u: np.ndarray, hx: float, hy: float, c: float, b: Boundary, order: int = 4) -> sp.csc_matrix:
    q, m = u.shape[0] - 2, u.shape[1] - 2
    N = q * m
    jj, ii = np.meshgrid(np.arange(q), np.arange(m), indexing="ij")
    rows, cols, vals = [], [], []

    def add(mask, r_j, r_i, t_j, t_i, v):
        rows.append((r_j * m + r_i)[mask])
        cols.append((t_j * m + t_i)[mask])
        vals.append(v[mask])

    for di, dj, coef in _stencil_terms(q, m, hx, hy, c, order):
        if di == 0 and dj == 0:
            coef = coef + 1.0 - 2.0 * u[1:-1, 1:-1]
        ti, tj = ii + di, jj + dj
        nz = coef != 0.0
        inner = nz & (ti >= 0) & (ti < m) & (tj >= 0) & (tj < q)
        add(inner, jj, ii, tj, ti, coef)
        right = nz & (ti == m) & (tj >= 0) & (tj < q)
        if right.any():
            tjc = np.clip(tj, 0, q - 1)
            a1 = np.broadcast_to(b.a1, (q,))[tjc]
            a2 = np.broadcast_to(b.a2, (q,))[tjc]
            add(right & (a1 != 0), jj, ii, tj, np.full_like(ti, m - 1), coef * a1)
            add(right & (a2 != 0), jj, ii, tj, np.full_like(ti, m - 2), coef * a2)
    return sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(N, N))


class SteadyStateError(RuntimeError):
    def __init__(self, msg, history):
        super().__init__(msg)
        self.history = history


def _ptc_solve(u: np.ndarray, dom: Domain, c: float, b: Boundary, kappa: float,
               tau0: float, tol: float, max_iter: int, verbose: bool = False, order: int = 4):
    hx, hy = dom.hx, dom.hy
    x = dom.x_lo + hx * np.arange(dom.nx)
    s = np.exp(-kappa * np.maximum(x[1:-1], 0.0))
    S = np.broadcast_to(s, (dom.ny - 2, dom.nx - 2)).ravel()
    apply_bc(u, b)
    F = interior_residual(u, hx, hy, c, order)
    norm = float(np.max(np.abs(F.ravel() / S)))
    hist = [(norm, float(np.max(np.abs(F))), tau0)]
    tau = tau0
    Sd = sp.diags(S)
    Rd = sp.diags(1.0 / S)
    N = S.size
    lu = None  # reused while steps contract strongly (chord iteration)
    factorizations = 0
    for it in range(max_iter):
        if float(np.max(np.abs(F))) < tol and norm < 1e3 * tol:
            break
        if lu is None:
            J = _jacobian(u, hx, hy, c, b, order)
            A = (Rd @ (sp.identity(N, format="csc") / tau - J) @ Sd).tocsc()
            lu = spla.splu(A, permc_spec="MMD_AT_PLUS_A")
            factorizations += 1
        dz = lu.solve(F.ravel() / S)
        un = u.copy()
        un[1:-1, 1:-1] += (S * dz).reshape(F.shape)
        apply_bc(un, b)
        Fn = interior_residual(un, hx, hy, c, order)
        nn = float(np.max(np.abs(Fn.ravel() / S)))
        if not np.isfinite(nn) or nn > 10 * norm:
            tau *= 0.25
            lu = None
            hist.append((norm, float(np.max(np.abs(F))), tau))
            if tau < 1e-8:
                raise SteadyStateError("pseudo-time step collapsed", hist)
            continue
        if nn > 0.1 * norm:
            lu = None
        tau = min(tau * max(norm / max(nn, 1e-300), 0.5), 1e12)
        u, F, norm = un, Fn, nn
        hist.append((norm, float(np.max(np.abs(F))), tau))
        if verbose:
            print(f"  it {it}: scaled {norm:.3e} abs {hist[-1][1]:.3e} tau {tau:.3e}")
        if len(hist) > 6 and norm >= 0.5 * min(h[0] for h in hist[-6:-3]):
            if tau >= 1e12 or hist[-1][1] < tol:
                break  # round-off floor
    return u, hist, factorizations


def product_guess(dom: Domain, c: float, b: Boundary, lam_mu=None, phi=None, wave=None) -> np.ndarray:
    """phi(y) w_c(x), the default starting field."""
    phi = phi or cached_phi()
    c = check_speed(c)
    if lam_mu is not None:
        w = wave or cached_wave(rotated_speed(*lam_mu))
    else:
        w = wave or cached_wave(c)
    x = dom.x_lo + dom.hx * np.arange(dom.nx)
    y = dom.hy * np.arange(dom.ny)
    return apply_bc(np.outer(phi(y), w(x)), b)


def _interp_to(field_vals: np.ndarray, src: Domain, dst: Domain) -> np.ndarray:
    xs = src.x_lo + src.hx * np.arange(src.nx)
    ys = src.hy * np.arange(src.ny)
    f = RegularGridInterpolator((ys, xs), field_vals, bounds_error=False, fill_value=None)
    xd = dst.x_lo + dst.hx * np.arange(dst.nx)
    yd = dst.hy * np.arange(dst.ny)
    Y, X = np.meshgrid(yd, xd, indexing="ij")
    return f(np.stack([Y.ravel(), X.ravel()], axis=1)).reshape(Y.shape)


def march_to_steady(c: float = C_STAR, domain: Domain = Domain(), tol: float = 1e-10,
                    init: str | Field2D = "product_guess", lam_mu=None, right_bc: str = "far-field",
                    left_bc: str = "capped",
                    method: str = "newton", ladder: bool = True, max_iter: int = 80,
                    max_steps: int = 200000, order: int = 4, verbose: bool = False) -> Field2D:
    """Steady traveling wave of the moving-frame equation on ``domain``.

    ``method="newton"`` (default) reaches the discrete steady state by
    pseudo-transient continuation, optionally through coarser grids first;
    ``method="explicit"`` marches explicit Euler until the max update per step
    drops below ``tol * dt`` (practical only on small grids).
    """
    c = check_speed(c)
    if lam_mu is not None:
        c_lm = speed_of(*lam_mu)
        if abs(c_lm - c) > 1e-6:
            raise ValueError("frame speed does not match (lambda, mu)")
        c = c_lm
    domain.check()
    kappa, b = make_boundary(c, domain, lam_mu, right_bc, left_bc=left_bc)
    if isinstance(init, Field2D):
        if init.values.shape != (domain.ny, domain.nx):
            raise ValueError("initial field does not match the domain grid")
        u0 = apply_bc(init.values.copy(), b)
    elif init in ("product", "product_guess"):
        u0 = None
    elif init == "zero":
        u0 = np.zeros((domain.ny, domain.nx))
    else:
        raise ValueError(f"unknown init {init!r}")

    if method == "explicit":
        if u0 is None:
            u0 = product_guess(domain, c, b, lam_mu)
        u, hist, converged = _explicit_to_steady(u0, domain, c, b, tol, max_steps, order)
        if not converged:
            raise SteadyStateError("explicit marching did not converge", hist)
        meta = dict(method="explicit", history_tail=[float(h) for h in hist[-5:]], steps=len(hist))
    elif method == "newton":
        levels = [domain]
        if ladder and u0 is None:
            d = domain
            while d.hx * 2 <= 0.2 + 1e-12 and d.hy * 2 <= 0.2 + 1e-12:
                d2 = d.refined(2.0)
                try:
                    d2.check()
                except ValueError:
                    break
                levels.insert(0, d2)
                d = d2
        hist_all = []
        u = None
        prev = None
        for lev in levels:
            k_l, b_l = make_boundary(c, lev, lam_mu, right_bc, left_bc=left_bc)
            if u is None:
                start = u0 if u0 is not None else product_guess(lev, c, b_l, lam_mu)
                tau0 = 0.5
            else:
                start = _interp_to(u, prev, lev)
                tau0 = 1e3
            if verbose:
                print(f"level hx={lev.hx} hy={lev.hy} ({lev.nx}x{lev.ny})")
            u, hist, nfac = _ptc_solve(start.copy(), lev, c, b_l, k_l, tau0, tol, max_iter, verbose, order)
            hist_all.append(dict(hx=lev.hx, hy=lev.hy, iterations=len(hist) - 1, factorizations=nfac,
                                 final_abs=hist[-1][1], final_scaled=hist[-1][0]))
            prev = lev
        meta = dict(method="newton-ptc", levels=hist_all)
    else:
        raise ValueError("method must be 'newton' or 'explicit'")
    fld = Field2D(domain.x_lo, domain.hx, domain.hy, u, c, b, meta, order)
    rn = residual(fld)
    fld.meta.update(residual_sup=rn.sup, residual_l2=rn.l2, right_bc=right_bc, left_bc=left_bc,
                    lam_mu=list(lam_mu) if lam_mu is not None else None)
    return fld


# --------------------------------------------------------------------------
# explicit dynamics


def stable_dt(hx: float, hy: float, c: float, order: int = 2) -> float:
    if order == 2:
        return 0.9 / (1.0 / hx**2 + 1.0 / hy**2 + abs(c) / hx + 1.0)
    # five-point differences: second-difference symbol up to 4/3 of the three-point one
    return 0.9 / (4.0 / 3.0 * (1.0 / hx**2 + 1.0 / hy**2) + 1.4 * abs(c) / hx + 1.0)


def evolve(u: np.ndarray, hx: float, hy: float, c: float, t: float, b: Boundary | None,
           order: int = 4, backend: str | None = None) -> np.ndarray:
    """Explicit Euler for time t (boundaries held by ``b``; none: kept as given)."""
    k = get_kernels(backend)
    dt0 = stable_dt(hx, hy, c, order)
    n = max(1, int(math.ceil(t / dt0))) if t > 0 else 0
    if n == 0:
        return u.copy()
    dt = t / n
    a = np.ascontiguousarray(u, dtype=float).copy()
    bbuf = a.copy()
    for _ in range(n):
        k.stencil_step(a, bbuf, hx, hy, c, dt, order)
        if b is not None:
            apply_bc(bbuf, b)
        a, bbuf = bbuf, a
    return a


def _explicit_to_steady(u, dom, c, b, tol, max_steps, order=4):
    dt = stable_dt(dom.hx, dom.hy, c, order)
    k = get_kernels()
    a = np.ascontiguousarray(u, dtype=float).copy()
    nb = a.copy()
    hist = []
    for step in range(max_steps):
        k.stencil_step(a, nb, dom.hx, dom.hy, c, dt, order)
        apply_bc(nb, b)
        upd = float(np.max(np.abs(nb - a)))
        a, nb = nb, a
        if step % 100 == 0 or upd < tol * dt:
            hist.append(upd)
        if upd < tol * dt:
            return a, hist, True
    return a, hist, False


def stationarity_check(field: Field2D, frame_speed: float, t: float = 1.0, margin: float = 0.05,
                       backend: str | None = None) -> float:
    """Sup drift after evolving for time t in the frame moving at ``frame_speed``."""
    if t > 2:
        raise ValueError("t must be <= 2")
    u1 = evolve(field.values, field.hx, field.hy, frame_speed, t, field.boundary, field.order, backend)
    ny, nx = field.values.shape
    mj, mi = max(1, int(margin * ny)), max(1, int(margin * nx))
    d = np.abs(u1 - field.values)[mj:ny - mj, mi:nx - mi]
    return float(d.max()) if d.size else 0.0


def pin_field(field: Field2D, level: float = 0.5, y_star: float = 5.0) -> Field2D:
    """Shift the field so that Psi(0, y_star) = level."""
    xs = field.x
    row = field(xs, np.full_like(xs, y_star))
    k = int(np.argmax(row < level))
    if k == 0 or row[k - 1] < level:
        raise ValueError("level not crossed on the pinning row")
    x0 = xs[k - 1] + (row[k - 1] - level) / (row[k - 1] - row[k]) * field.hx
    f = field.shifted(-x0)
    f.meta["pin"] = dict(level=level, y_star=y_star, shift=float(-x0))
    return f


def log_derivative_min(field: Field2D, floor: float = 1e-10) -> tuple[float, float]:
    """(min of the centered d/dx log Psi over nodes with Psi > floor, the bound -sqrt2 - 10 hx)."""
    v = field.values[1:]
    lv = np.log(np.maximum(v, 1e-300))
    d = (lv[:, 2:] - lv[:, :-2]) / (2.0 * field.hx)
    ok = (v[:, 2:] > floor) & (v[:, :-2] > floor)
    m = float(d[ok].min()) if ok.any() else math.inf
    return m, -SQRT2 - 10.0 * field.hx


@dataclass(frozen=True)
class ComparisonReport:
    min_gap: float  # min(upper - lower) over all steps and nodes
    min_value: float
    max_value: float
    steps: int


def comparison_check(lower: np.ndarray, upper: np.ndarray, hx: float, hy: float, c: float, t: float,
                     b: Boundary | None = None, order: int = 2) -> ComparisonReport:
    """March two initial data side by side and track their ordering and range."""
    k = get_kernels()
    dt0 = stable_dt(hx, hy, c, order)
    n = max(1, int(math.ceil(t / dt0)))
    dt = t / n
    u, v = (np.ascontiguousarray(a, dtype=float).copy() for a in (lower, upper))
    bu, bv = u.copy(), v.copy()
    gap, lo, hi = float((v - u).min()), float(min(u.min(), v.min())), float(max(u.max(), v.max()))
    for _ in range(n):
        k.stencil_step(u, bu, hx, hy, c, dt, order)
        k.stencil_step(v, bv, hx, hy, c, dt, order)
        if b is not None:
            apply_bc(bu, b)
            apply_bc(bv, b)
        u, bu, v, bv = bu, u, bv, v
        gap = min(gap, float((v - u).min()))
        lo = min(lo, float(u.min()), float(v.min()))
        hi = max(hi, float(u.max()), float(v.max()))
    return ComparisonReport(gap, lo, hi, n)


# --------------------------------------------------------------------------
# compactly supported subsolution


def first_bessel_zero() -> float:
    return brentq(bessel_j0, 2.0, 3.0, xtol=1e-15)


@dataclass(frozen=True)
class Subsolution:
    eps: float
    alpha: float
    c_eps: float
    lam: float
    R: float
    mu: float
    j0: float

    @property
    def t_end(self) -> float:
        return math.log(1.0 / self.alpha) / self.lam

    def b(self, t):
        return 1.0 / (1.0 + self.alpha / self.lam * np.expm1(self.lam * t))

    def __call__(self, t, x, y):
        xs = x + self.eps * t
        r = np.hypot(xs, y) / self.R
        psi = np.where(r < 1.0, bessel_j0(self.j0 * np.minimum(r, 1.0)), 0.0)
        return self.alpha * self.b(t) * np.exp(self.lam * t - self.c_eps * (xs + self.R)) * psi


def make_subsolution(eps: float, alpha: float) -> Subsolution:
    if not (0 < eps <= 2 ** -0.5):
        raise ValueError("eps must lie in (0, 2^-1/2]")
    if not (0 < alpha <= 1):
        raise ValueError("alpha must lie in (0, 1]")
    j0 = first_bessel_zero()
    mu = 0.5 * j0 * j0
    c_eps = C_STAR - eps
    return Subsolution(eps, alpha, c_eps, eps * c_eps, math.sqrt(2.0 * mu) / eps, mu, j0)


@dataclass(frozen=True)
class SubsolutionReport:
    max_violation: float
    max_outside_support: float
    max_inside: float
    times: tuple


def subsolution_operator(sub: Subsolution, t: float, h: float = 0.02, pad: float = 1.0):
    """Grid values of d_t w - Lap w / 2 - sqrt(2) d_x w - w + w^2, and distances to the center."""
    cx = -sub.eps * t
    n = int(math.ceil((sub.R + pad) / h))
    xs = cx + h * np.arange(-n, n + 1)
    ys = h * np.arange(-n, n + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    w = sub(t, X, Y)
    dtau = 1e-5
    t_lo = max(t - dtau, 0.0)
    t_hi = t + dtau
    wt = (sub(t_hi, X, Y) - sub(t_lo, X, Y)) / (t_hi - t_lo)
    lap = np.zeros_like(w)
    lap[1:-1, 1:-1] = ((w[2:, 1:-1] - 2 * w[1:-1, 1:-1] + w[:-2, 1:-1])
                       + (w[1:-1, 2:] - 2 * w[1:-1, 1:-1] + w[1:-1, :-2])) / (h * h)
    wx = np.zeros_like(w)
    wx[1:-1, 1:-1] = (w[2:, 1:-1] - w[:-2, 1:-1]) / (2 * h)
    op = wt - 0.5 * lap - C_STAR * wx - w + w * w
    op[0, :] = op[-1, :] = op[:, 0] = op[:, -1] = 0.0
    return op, np.hypot(X - cx, Y)


def subsolution_check(eps: float, alpha: float, h: float = 0.02, times=None) -> SubsolutionReport:
    """Largest value of the parabolic operator applied to the subsolution."""
    sub = make_subsolution(eps, alpha)
    if times is None:
        times = (0.0, 0.5 * sub.t_end, sub.t_end)
    for t in times:
        if t < 0 or t > sub.t_end + 1e-12:
            raise ValueError("times must lie in [0, log(1/alpha)/lambda]")
    mv, mo, mi = -np.inf, 0.0, -np.inf
    for t in times:
        op, dist = subsolution_operator(sub, t, h)
        mv = max(mv, float(op.max()))
        outside = dist > sub.R + 2 * h
        mo = max(mo, float(np.abs(op[outside]).max()) if outside.any() else 0.0)
        mi = max(mi, float(op[dist < sub.R - 3 * h].max()))
    return SubsolutionReport(mv, mo, mi, tuple(times))
