import math

import numpy as np
import pytest

from kpplab import waves_1d as w1

SQRT2 = math.sqrt(2.0)


def test_phi_boundary_values_and_slope(phi):
    assert phi.values[0] == 0.0
    assert abs(phi.derivative[0] - math.sqrt(2.0 / 3.0)) < 1e-4
    assert 1 - 1e-3 <= phi.values[-1] <= 1.0
    d = np.diff(phi.values)
    assert np.all(d >= 0)
    assert np.all(d[1.0 - phi.values[1:] > 1e-12] > 0)  # strict until 1 - phi rounds away


def test_phi_residual_and_first_integral(phi):
    assert w1.phi_residual(phi) < 1e-6
    assert np.max(np.abs(w1.phi_first_integral(phi) - 1.0 / 3.0)) < 1e-6


def test_phi_refinement(phi):
    fine = w1.solve_steady_phi(h=0.0025)
    assert np.max(np.abs(fine(phi.grid) - phi.values)) < 1e-4


def test_phi_preconditions():
    with pytest.raises(ValueError):
        w1.solve_steady_phi(y_max=10.0)
    with pytest.raises(ValueError):
        w1.solve_steady_phi(h=0.02)


def test_speed_guard():
    assert w1.check_speed(1.4142135) == SQRT2
    assert w1.check_speed(1.7) == 1.7
    with pytest.raises(ValueError):
        w1.check_speed(1.0)
    with pytest.raises(ValueError):
        w1.solve_wave_1d(1.3)


def test_minimal_wave_pin_monotone_residual(w_star):
    assert float(w_star(0.0)) == pytest.approx(0.5, abs=1e-12)
    assert np.all(np.diff(w_star.values) < 0)
    assert np.all((w_star.values >= 0) & (w_star.values <= 1))
    assert w1.wave_steady_residual(w_star) < 1e-8


def test_supercritical_tail_rate():
    w = w1.solve_wave_1d(2.0, x_range=(-40.0, 60.0))
    assert abs(w1.tail_log_slope(w, (20.0, 40.0)) / (2 - SQRT2) - 1) < 0.02
    assert w1.tail_rate(2.0) == pytest.approx(2 - SQRT2)


def test_wave_uniqueness_up_to_shift(w_star):
    init = 1.0 / (1.0 + np.exp(3.0 * (np.arange(-40.0, 30.0 + 1e-9, 0.005) - 2.0)))
    other = w1.solve_wave_1d(w1.C_STAR, init=init)
    xs = np.linspace(-10, 10, 81)
    s = w1.fit_shift(w_star, xs, other(xs))
    assert np.max(np.abs(w_star(xs - s) - other(xs))) < 1e-6


def test_wave_refinement(w_star):
    coarse = w1.solve_wave_1d(w1.C_STAR, h=0.01)
    xs = np.linspace(-20, 20, 401)
    assert np.max(np.abs(coarse(xs) - w_star(xs))) < 1e-4


def test_tail_constant(w_star):
    fit = w1.fit_tail_constant(w_star)
    assert fit.K_star == pytest.approx(5.0317, abs=2e-3)
    assert fit.fit_residual / fit.K_star < 1e-2
    alt = w1.fit_tail_constant(w_star, (10.0, 20.0))
    assert abs(alt.K_star / fit.K_star - 1) < 1e-2


def test_tail_fit_rejections(w_star):
    with pytest.raises(ValueError):
        w1.fit_tail_constant(w1.solve_wave_1d(2.0))
    with pytest.raises(ValueError):
        w1.fit_tail_constant(w_star, (12.0, 12.05))
    with pytest.raises(ValueError):
        w1.fit_tail_constant(w_star, (20.0, 30.0))  # profile below 1e-13 there


def test_laplace_wave_mc_matches_shifted_ode(w_star):
    prox = w1.laplace_wave_1d_proxies(8.0, 4000, seed=5)
    far = w1.laplace_wave_1d_mc(40.0, proxies=prox, replicas=4000)
    assert far.value <= max(far.std_error, 1e-15)  # the exact value is ~1e-23
    xs = np.linspace(-2.0, 2.0, 9)
    est = w1.laplace_wave_1d_mc(xs, proxies=prox, replicas=4000)
    v = np.array([e.value for e in est])
    se = np.array([e.std_error for e in est])
    assert np.all(np.diff(v) < 0)
    s = w1.fit_shift(w_star, xs, v)
    assert np.all(np.abs(v - w_star(xs - s)) <= np.maximum(3 * se, 1e-2))


def test_laplace_wave_mc_shape_bias_shrinks_with_horizon(w_star):
    xs = np.linspace(-2.0, 2.0, 9)

    def bias(T):
        prox = w1.laplace_wave_1d_proxies(T, 2000, seed=5)
        v = np.array([e.value for e in w1.laplace_wave_1d_mc(xs, proxies=prox, replicas=2000)])
        s = w1.fit_shift(w_star, xs, v)
        return float(np.sqrt(np.mean((v - w_star(xs - s)) ** 2)))

    b = [bias(T) for T in (2.0, 4.0, 8.0)]
    assert b[0] > b[1] > b[2]
