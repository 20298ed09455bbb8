"""Quarter-plane potential theory: Green function by images and the map eta.

Q = (0, inf)^2. For an interior pole z = (u, v),

    G_z(x) = (1/pi) log(|x - (u,-v)| |x - (-u,v)| / (|x - z| |x + z|))

vanishes on the boundary of Q and is symmetric in (z, x). The map eta is
defined through its inverse eta^{-1}(z) = z - log(z + 1)/sqrt2, which sends
Lambda = {0 < y < sqrt(e^{2 sqrt2 x} - (x + 1)^2)} onto Q; the forward map is
computed by Newton's method started at varpi(z) = z + log(z + 1)/sqrt2.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

SQRT2 = math.sqrt(2.0)

# Ratio brackets for the three regimes of G, frozen after a dense scan over
# pole angles (G and its comparators are scale invariant). In the middle
# regime the ratio dips to ~0.009 on the inner circle |x - z| = (u ^ v)/10.
NEAR_BRACKET = (0.2, 1.5)
MID_BRACKET = (0.005, 20.0)
FAR_BRACKET = (0.05, 20.0)
POLE_ANGLES = (0.0, math.pi / 2)
ANHARMONIC_MAX_RATIO = 50.0


@dataclass(frozen=True)
class QuarterPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (self.x >= 0 and self.y >= 0):
            raise ValueError("quarter-plane points need nonnegative coordinates")

    @property
    def interior(self) -> bool:
        return self.x > 0 and self.y > 0


class SingularPointError(ValueError):
    """Raised when the Green function is evaluated at its pole."""


# --------------------------------------------------------------------------
# Green function


def green_quarter(z, x) -> float:
    """Green function of Q with pole z, evaluated at x (both (u, v) pairs)."""
    u, v = float(z[0]), float(z[1])
    a, b = float(x[0]), float(x[1])
    if not (u > 0 and v > 0):
        raise ValueError("pole must be interior")
    if a < 0 or b < 0:
        raise ValueError("evaluation point must lie in the closed quarter plane")
    d = math.hypot(a - u, b - v)
    if d == 0.0:
        raise SingularPointError("x = z: logarithmic singularity")
    num = math.hypot(a - u, b + v) * math.hypot(a + u, b - v)
    den = d * math.hypot(a + u, b + v)
    return math.log(num / den) / math.pi


def green_quarter_array(z, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Vectorised G_z on arrays (pole excluded by the caller)."""
    u, v = float(z[0]), float(z[1])
    r2 = (X - u) ** 2 + (Y - v) ** 2
    num = ((X - u) ** 2 + (Y + v) ** 2) * ((X + u) ** 2 + (Y - v) ** 2)
    den = r2 * ((X + u) ** 2 + (Y + v) ** 2)
    return np.log(num / den) / (2.0 * math.pi)


@dataclass(frozen=True)
class RegimeStats:
    regime: str
    n: int
    min_ratio: float
    max_ratio: float
    bracket: tuple

    @property
    def passed(self) -> bool:
        return self.bracket[0] <= self.min_ratio and self.max_ratio <= self.bracket[1]


def _sample_pole(rng: np.random.Generator):
    th = rng.uniform(*POLE_ANGLES)
    while th == 0.0:
        th = rng.uniform(*POLE_ANGLES)
    r = math.exp(rng.uniform(math.log(0.1), math.log(100.0)))
    return r * math.cos(th), r * math.sin(th)


def green_asymptotics_check(samples: int = 1000, seed: int = 0) -> list[RegimeStats]:
    """min/max of G over its comparator in the near, middle and far regimes."""
    if samples < 1000:
        raise ValueError("samples must be >= 1000")
    rng = np.random.default_rng(seed)
    ratios = {"near": [], "mid": [], "far": []}
    for _ in range(samples):
        u, v = _sample_pole(rng)
        nz = math.hypot(u, v)
        m = min(u, v)
        # near: inside B_{m/10}(z)
        rr = m / 10 * math.sqrt(rng.uniform(1e-6, 1.0))
        ph = rng.uniform(0, 2 * math.pi)
        x = (u + rr * math.cos(ph), v + rr * math.sin(ph))
        ratios["near"].append(green_quarter((u, v), x) / math.log(m / rr))
        # middle: B_{2|z|} minus B_{m/10}(z), inside Q
        while True:
            a, b = rng.uniform(0, 2 * nz, size=2)
            if a > 0 and b > 0 and math.hypot(a, b) < 2 * nz and math.hypot(a - u, b - v) >= m / 10:
                break
        comp = (u * v / nz**2) * (a * b / ((a - u) ** 2 + (b - v) ** 2))
        ratios["mid"].append(green_quarter((u, v), (a, b)) / comp)
        # far: outside B_{2|z|}, radius log-uniform over four decades
        R = 2 * nz * math.exp(rng.uniform(0, math.log(1e4)))
        ph = rng.uniform(0.01, math.pi / 2 - 0.01)
        a, b = R * math.cos(ph), R * math.sin(ph)
        ratios["far"].append(green_quarter((u, v), (a, b)) / (u * v * a * b / R**4))
    out = []
    for name, br in (("near", NEAR_BRACKET), ("mid", MID_BRACKET), ("far", FAR_BRACKET)):
        r = np.asarray(ratios[name])
        out.append(RegimeStats(name, r.size, float(r.min()), float(r.max()), br))
    return out


# --------------------------------------------------------------------------
# conformal maps


def varpi(z: complex) -> complex:
    return z + cmath.log(z + 1) / SQRT2


def eta_inverse(z: complex) -> complex:
    return z - cmath.log(z + 1) / SQRT2


def eta_inverse_derivative(z: complex) -> complex:
    return 1.0 - 1.0 / (SQRT2 * (z + 1))


class NewtonError(RuntimeError):
    pass


def conformal_eta(z: complex, direction: str = "forward", tol: float = 1e-13, max_iter: int = 50) -> complex:
    """eta(z) (``forward``, Newton from varpi(z)) or the closed-form ``inverse``."""
    z = complex(z)
    if direction == "inverse":
        return eta_inverse(z)
    if direction != "forward":
        raise ValueError("direction must be 'forward' or 'inverse'")
    zeta = varpi(z)
    hist = []
    for _ in range(max_iter):
        f = eta_inverse(zeta) - z
        hist.append(abs(f))
        zeta_new = zeta - f / eta_inverse_derivative(zeta)
        if abs(f) <= tol * max(1.0, abs(z)):
            return zeta_new  # one polishing step past the tolerance
        zeta = zeta_new
    raise NewtonError(f"Newton did not converge for z={z}; |residual| history {hist[-5:]}")


def lambda_boundary(x):
    """Upper boundary curve of Lambda: y = sqrt(e^{2 sqrt2 x} - (x + 1)^2), x > 0."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.exp(2 * SQRT2 * x) - (x + 1) ** 2)


def in_lambda(z: complex) -> bool:
    x, y = z.real, z.imag
    if not (x > 0 and y > 0):
        return False
    return math.log(y * y + (x + 1) ** 2) < 2 * SQRT2 * x


def sample_quarter(n: int, seed: int, r_max: float = 1e3) -> np.ndarray:
    """Points of Q with modulus log-uniform on [1e-3, r_max] and uniform angle."""
    rng = np.random.default_rng(seed)
    r = np.exp(rng.uniform(math.log(1e-3), math.log(r_max), n))
    th = rng.uniform(0, math.pi / 2, n)
    return r * np.exp(1j * th)


@dataclass(frozen=True)
class EtaReport:
    samples: int
    max_roundtrip: float
    max_eta_minus_varpi: float
    derivative_range: tuple
    max_boundary_real: float
    inside_lambda: bool


def eta_check(samples: int = 1000, seed: int = 0) -> EtaReport:
    zs = sample_quarter(samples, seed)
    rt, gap, inside = 0.0, 0.0, True
    dmod = []
    for z in zs:
        e = conformal_eta(z)
        rt = max(rt, abs(eta_inverse(e) - z))
        gap = max(gap, abs(e - varpi(z)))
        inside &= in_lambda(e) or abs(z.real) < 1e-9 or abs(z.imag) < 1e-9
        dmod.append(abs(eta_inverse_derivative(z)))
    xs = np.linspace(1e-3, 10, 400)
    bnd = xs + 1j * lambda_boundary(xs)
    bre = max(abs(eta_inverse(b).real) for b in bnd)
    return EtaReport(samples, rt, gap, (min(dmod), max(dmod)), bre, bool(inside))


# --------------------------------------------------------------------------
# anharmonic integral


def anharmonic_weight(u, v):
    """(u + 1)^2 v e^{-sqrt2 u}: the comparison source term."""
    return (u + 1) ** 2 * v * np.exp(-SQRT2 * u)


def _gl(a: float, b: float, n: int):
    t, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * t + 0.5 * (b + a), 0.5 * (b - a) * w


def _semi_infinite(a: float, L: float, n: int):
    """Nodes/weights for [a, inf) via s = a + L t/(1 - t)."""
    t, w = _gl(0.0, 1.0, n)
    return a + L * t / (1 - t), w * L / (1 - t) ** 2


def _axis_panels(c: float, rho: float, scale: float, n: int):
    """1D rules on [0, c - rho], [c + rho, inf) (gaps left for the singular square)."""
    pts, wts = [], []
    lo, hi = c - rho, c + rho
    if lo > 0:
        p, w = _gl(0.0, lo, n)
        pts.append(p)
        wts.append(w)
    edges = [hi, hi + scale, hi + 4 * scale]
    for a, b in zip(edges, edges[1:]):
        p, w = _gl(a, b, n)
        pts.append(p)
        wts.append(w)
    p, w = _semi_infinite(edges[-1], 4 * scale, n)
    pts.append(p)
    wts.append(w)
    return np.concatenate(pts), np.concatenate(wts)


def _theta_integral(x, y, n: int) -> float:
    """int_Q G_x(z) F(z) dz by product Gauss rules, singular square in polar form."""
    rho = 0.5 * min(x, y)
    pole = (x, y)
    total = 0.0
    # outer region: all products of panels except the centre square
    su, wu = _axis_panels(x, rho, max(x, 2.0), n)
    sv, wv = _axis_panels(y, rho, max(y, 2.0), n)
    cu, cwu = _gl(x - rho, x + rho, n)
    cv, cwv = _gl(y - rho, y + rho, n)
    for (pu, qu), (pv, qv) in (((su, wu), (sv, wv)), ((su, wu), (cv, cwv)), ((cu, cwu), (sv, wv))):
        U, V = np.meshgrid(pu, pv, indexing="ij")
        g = green_quarter_array(pole, U, V)
        total += float(np.einsum("i,ij,j->", qu, g * anharmonic_weight(U, V), qv))
    # centre square around the pole: r = R(theta) s^2 removes the log singularity
    s, ws = _gl(0.0, 1.0, n)
    for k in range(4):
        th, wth = _gl(-math.pi / 4 + k * math.pi / 2, math.pi / 4 + k * math.pi / 2, n)
        R = rho / np.maximum(np.abs(np.cos(th)), np.abs(np.sin(th)))
        r = R[:, None] * s[None, :] ** 2
        jac = r * 2 * R[:, None] * s[None, :]
        U = x + r * np.cos(th)[:, None]
        V = y + r * np.sin(th)[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            g = green_quarter_array(pole, U, V)
        integrand = np.where(r > 0, g * anharmonic_weight(U, V) * jac, 0.0)
        total += float(np.einsum("i,ij,j->", wth, integrand, ws))
    return total


@dataclass(frozen=True)
class AnharmonicRow:
    x: float
    y: float
    theta: float
    ratio: float
    refined_ratio: float
    stable: bool


def anharmonic_bound_check(points: Sequence[tuple[float, float]], quadrature_n: int = 200) -> list[AnharmonicRow]:
    """Theta(x, y) = int_Q G_(x,y)(z) F(z) dz and Theta/y at each point, with a refinement check."""
    if quadrature_n < 200:
        raise ValueError("quadrature_n must be >= 200")
    rows = []
    for x, y in points:
        if not (0.5 <= x <= 40 and 0.5 <= y <= 40):
            raise ValueError("test points need both coordinates in [0.5, 40]")
        t1 = _theta_integral(x, y, quadrature_n)
        t2 = _theta_integral(x, y, int(quadrature_n * 1.5))
        stable = abs(t2 - t1) <= 0.05 * abs(t2)
        rows.append(AnharmonicRow(x, y, t2, t2 / y, t1 / y, stable))
    return rows


# --------------------------------------------------------------------------
# discrete harmonicity


def discrete_laplacian(f: Callable, X: np.ndarray, Y: np.ndarray, h: float) -> np.ndarray:
    """Five-point Laplacian of a vectorised f at the points (X, Y)."""
    return (f(X + h, Y) + f(X - h, Y) + f(X, Y + h) + f(X, Y - h) - 4.0 * f(X, Y)) / (h * h)


def harmonicity_check(f: Callable, box: tuple[float, float, float, float], h: float,
                      singular: Sequence[tuple[float, float]] = (), exclude: float = 1.0) -> float:
    """sup |Delta_h f| over grid nodes of ``box`` at distance >= ``exclude`` from singular points."""
    if singular and exclude < 10 * h:
        raise ValueError("exclusion radius must be at least 10 h")
    x0, x1, y0, y1 = box
    xs = np.arange(x0, x1 + 0.5 * h, h)
    ys = np.arange(y0, y1 + 0.5 * h, h)
    X, Y = np.meshgrid(xs, ys)
    keep = np.ones_like(X, dtype=bool)
    for a, b in singular:
        keep &= np.hypot(X - a, Y - b) >= exclude
    lap = discrete_laplacian(f, X[keep], Y[keep], h)
    return float(np.max(np.abs(lap))) if lap.size else 0.0


def green_harmonicity(z=(2.0, 3.0), h: float = 0.1, box=(0.5, 6.0, 0.5, 7.0), exclude: float = 2.5) -> float:
    return harmonicity_check(lambda X, Y: green_quarter_array(z, X, Y), box, h, [tuple(z)], exclude)


def report_rows(check: str, entries) -> list[tuple]:
    """Rows ``check,param,y,value,tolerance,pass`` for the check report CSV."""
    return [(check, p, y, v, t, bool(ok)) for p, y, v, t, ok in entries]
