import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kpplab import pde_2d as pd
from kpplab.asymptotics import tameness_constant
from kpplab.pde_2d import C_STAR, Boundary, Domain, Field2D

SQRT2 = math.sqrt(2.0)


def small_domain():
    return Domain(x_lo=-4.0, x_hi=6.0, y_hi=8.0, hx=0.2, hy=0.2)


def test_zero_is_steady():
    d = small_domain()
    z = np.zeros((d.ny, d.nx))
    b = Boundary(np.zeros(d.ny), np.zeros(d.nx), "zero")
    for order in (2, 4):
        assert np.all(pd.evolve(z, d.hx, d.hy, C_STAR, 1.0, b, order) == 0.0)
        assert np.all(pd.evolve(z, d.hx, d.hy, C_STAR, 1.0, None, order) == 0.0)


def test_nonconvergence_reports_history():
    with pytest.raises(pd.SteadyStateError) as e:
        pd.march_to_steady(C_STAR, small_domain(), init="zero", method="explicit", max_steps=10)
    assert len(e.value.history) >= 1


def test_zero_field_has_zero_residual_and_drift():
    d = small_domain()
    for v in (0.0, 1.0):
        f = Field2D(d.x_lo, d.hx, d.hy, np.full((d.ny, d.nx), v), C_STAR)
        for order in (2, 4):
            assert pd.residual(f, order=order).sup == 0.0
    zero = Field2D(d.x_lo, d.hx, d.hy, np.zeros((d.ny, d.nx)), C_STAR)
    for s in (SQRT2, 1.8, 3.0):
        assert pd.stationarity_check(zero, s, 1.0) == 0.0


def test_phi_profile_stays_put_with_phi_side_data(phi):
    d = small_domain()
    y = d.hy * np.arange(d.ny)
    p = phi(y)
    p[0] = 0.0
    u = np.tile(p[:, None], (1, d.nx))
    b = Boundary(p.copy(), np.full(d.nx, p[-1]), "far-field", 0.0, 0.0, {}, p[1:-1].copy())
    drift = {o: float(np.abs(pd.evolve(u, d.hx, d.hy, C_STAR, 1.0, b, o) - u).max()) for o in (2, 4)}
    # only the O(h^2) / O(h^4) mismatch between the ODE and the discrete operator moves it
    assert drift[2] < 2e-3 and drift[4] < 5e-4
    assert drift[4] < drift[2]


def test_default_wave_residual_and_signs(fine_field):
    assert pd.residual(fine_field).sup < 1e-5
    v = fine_field.values
    assert np.all(v >= 0) and np.all(v <= 1)
    assert np.all(v[0] == 0)
    assert np.diff(v, axis=1)[1:-1].max() < 0
    assert np.diff(v[:, 1:-1], axis=0).min() > 0


def test_second_order_refinement(medium_field, fine_field):
    r1 = pd.residual(medium_field, order=2).l2
    r2 = pd.residual(fine_field, order=2).l2
    assert r1 / r2 >= 3.5


def test_stationarity_identifies_the_speed(medium_field):
    s1 = pd.stationarity_check(medium_field, C_STAR, 1.0)
    s2 = pd.stationarity_check(medium_field, 1.8, 1.0)
    assert s1 < 5e-3 and s2 >= 10 * s1
    with pytest.raises(ValueError):
        pd.stationarity_check(medium_field, C_STAR, 3.0)


def _smooth_random(shape, rng, k=4):
    ny, nx = shape
    yy, xx = np.meshgrid(np.linspace(0, 1, ny), np.linspace(0, 1, nx), indexing="ij")
    f = np.zeros(shape)
    for a, b in rng.integers(1, k + 1, size=(k, 2)):
        f += rng.normal() * np.sin(math.pi * a * xx) * np.sin(math.pi * b * yy)
    return f


@given(seed=st.integers(0, 2**32 - 1))
def test_comparison_principle(seed):
    rng = np.random.default_rng(seed)
    d = small_domain()
    base = _smooth_random((d.ny, d.nx), rng)
    lower = 1.0 / (1.0 + np.exp(-3.0 * base)) * 0.8
    upper = np.minimum(lower + 0.2 * _smooth_random((d.ny, d.nx), rng) ** 2, 1.0)
    rep = pd.comparison_check(lower, upper, d.hx, d.hy, C_STAR, 0.5)
    assert rep.min_gap >= -1e-15
    assert 0.0 <= rep.min_value and rep.max_value <= 1.0


def test_log_derivative_bound(coarse_field, medium_field):
    for f in (coarse_field, medium_field):
        m, bound = pd.log_derivative_min(f)
        assert m >= bound


def test_tameness_stable_under_refinement(coarse_field, medium_field):
    a, b = tameness_constant(coarse_field), tameness_constant(medium_field)
    assert math.isfinite(a.C) and a.C > 0
    assert abs(a.C / b.C - 1) < 0.1


def test_pin_field(medium_field):
    p = pd.pin_field(medium_field)
    assert float(p(0.0, 5.0)) == pytest.approx(0.5, abs=2e-3)
    assert p.meta["pin"]["level"] == 0.5
    with pytest.raises(ValueError):
        pd.pin_field(medium_field, level=1.5)


def test_field_interpolation_and_shift(coarse_field):
    f = coarse_field
    assert float(f(f.x[7], f.y[3])) == pytest.approx(f.values[3, 7], abs=1e-15)
    assert float(f(0.0, -1.0)) == 0.0
    g = f.shifted(1.5)
    assert float(g(1.5 + f.x[7], f.y[3])) == pytest.approx(f.values[3, 7], abs=1e-12)
    with pytest.raises(ValueError):
        f.row(0.05)


def test_domain_and_solver_arguments():
    with pytest.raises(ValueError):
        Domain(hx=0.3).check()
    with pytest.raises(ValueError):
        Domain(x_lo=0.0, x_hi=0.4, hx=0.2).check()
    with pytest.raises(ValueError):
        pd.march_to_steady(1.2, small_domain())
    with pytest.raises(ValueError):
        pd.march_to_steady(C_STAR, small_domain(), init="nonsense")
    with pytest.raises(ValueError):
        pd.march_to_steady(1.7, small_domain(), lam_mu=(1.0, 0.5))
    with pytest.raises(ValueError):
        pd.make_boundary(C_STAR, small_domain(), left_bc="other")


def test_stable_dt():
    assert pd.stable_dt(0.1, 0.1, SQRT2) == pytest.approx(0.9 / (200 + SQRT2 / 0.1 + 1))
    assert pd.stable_dt(0.1, 0.1, SQRT2, order=4) < pd.stable_dt(0.1, 0.1, SQRT2)


# subsolution ---------------------------------------------------------------


def test_subsolution_violation_and_support():
    rep = pd.subsolution_check(0.3, 0.5, h=0.02, times=(0.0,))
    assert rep.max_violation <= 1e-3
    assert rep.max_outside_support == 0.0
    assert rep.max_inside < 0


def test_subsolution_b_bound():
    for eps, alpha in ((0.3, 0.5), (0.7, 0.1), (0.1, 0.9)):
        sub = pd.make_subsolution(eps, alpha)
        assert alpha * math.exp(sub.lam * sub.t_end) == pytest.approx(1.0)
        assert sub.b(sub.t_end) > 1.0 / (1.0 + 1.0 / sub.lam)
        assert sub.b(0.0) == 1.0


def test_subsolution_parameters():
    assert pd.first_bessel_zero() == pytest.approx(2.404825557695773, abs=1e-12)
    for eps, alpha in ((0.0, 0.5), (0.8, 0.5), (0.3, 0.0), (0.3, 1.2)):
        with pytest.raises(ValueError):
            pd.make_subsolution(eps, alpha)
    sub = pd.make_subsolution(0.3, 0.5)
    with pytest.raises(ValueError):
        pd.subsolution_check(0.3, 0.5, times=(sub.t_end + 1.0,))
