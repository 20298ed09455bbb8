import math

import numpy as np
import pytest

from kpplab import wave_mc as wm
from kpplab.bbm_sim import SimConfig, map_replicas, simulate_replica
from kpplab.pde_2d import Field2D, speed_of

SQRT2 = math.sqrt(2.0)


def test_phi_vanishes_far_right():
    e = wm.estimate_phi(40.0, 1.0, T=4.0, replicas=500, seed=1)
    assert e.value <= max(e.std_error, 1e-15)
    e = wm.estimate_phi_supercritical(40.0, 1.0, 1.0, 0.5, T=4.0, replicas=500, seed=1)
    assert e.value <= max(e.std_error, 1e-15)


def test_phi_vanishes_near_the_boundary():
    e = wm.estimate_phi(0.0, 1e-3, T=4.0, replicas=500, seed=2)
    assert e.value <= 2 * e.std_error + 1e-12
    assert 0.0 <= e.value <= 1.0


def test_phi_strictly_decreasing_in_x_with_common_numbers():
    est = wm.estimate_phi(np.array([-1.0, 0.0, 1.0]), 2.0, T=6.0, replicas=1000, seed=3)
    v = [e.value for e in est]
    assert v[0] > v[1] > v[2]
    assert all(0 <= x <= 1 for x in v)
    assert "alpha=6" in est[0].meta


def test_supercritical_speed_and_monotone_in_y():
    assert speed_of(1.0, 0.5) == pytest.approx(1.625, abs=1e-14)
    v = [wm.estimate_phi_supercritical(0.0, y, 1.0, 0.5, T=4.0, replicas=1000, seed=4).value
         for y in (0.5, 1.0, 2.0)]
    assert v[0] < v[1] < v[2]


def test_estimator_preconditions():
    with pytest.raises(ValueError):
        wm.estimate_phi(0.0, 1.0, replicas=99)
    with pytest.raises(ValueError):
        wm.estimate_phi(0.0, 1.0, T=10.5, replicas=200)
    with pytest.raises(ValueError):
        wm.estimate_phi(0.0, 0.0, replicas=200)
    for lam, mu in ((1.0, 1.0), (0.0, 0.5), (1.0, 0.0), (1.5, -0.1)):
        with pytest.raises(ValueError):
            wm.estimate_phi_supercritical(0.0, 1.0, lam, mu, replicas=200)


def test_extinction_limits():
    e = wm.estimate_extinction(1e-3, T=4.0, replicas=500, seed=5)
    assert abs(e.value - 1.0) <= 2 * e.std_error + 1e-12
    e = wm.estimate_extinction(10.0, T=4.0, replicas=500, seed=5)
    assert e.value <= max(3 * e.std_error, 0.01)
    assert "T-2" in e.meta


def test_extinction_matches_one_minus_phi(phi):
    e = wm.estimate_extinction(1.0, T=8.0, replicas=4000, seed=6)
    assert abs(e.value - (1 - float(phi(1.0)))) <= max(3 * e.std_error, 0.01)


def _const_field(v, coarse_field):
    return Field2D(coarse_field.x_lo, coarse_field.hx, coarse_field.hy,
                   np.full_like(coarse_field.values, v), coarse_field.frame_speed_c)


def test_mckean_zero_and_one(coarse_field):
    xs = np.array([-1.0, 0.0, 2.0])
    zero = wm.mckean_evolve(_const_field(0.0, coarse_field), 1.0, xs, 1.0, replicas=300, seed=7)
    assert all(e.value == 0.0 and e.std_error == 0.0 for e in zero)
    one = wm.mckean_evolve(_const_field(1.0, coarse_field), 1.0, 0.0, 1.0, replicas=300, seed=7)
    cfg = SimConfig(origin_y=1.0, horizon_T=1.0, seed=7, dt_max=wm.MC_DT)
    surv = np.mean(map_replicas(lambda r: len(simulate_replica(cfg, r)[-1]) > 0, 300))
    assert one.value == pytest.approx(surv, abs=1e-12)


def test_mckean_rejects_bad_data(coarse_field):
    with pytest.raises(ValueError):
        wm.mckean_evolve(_const_field(1.5, coarse_field), 1.0, 0.0, 1.0, replicas=200)
    with pytest.raises(ValueError):
        wm.mckean_evolve(coarse_field, 6.0, 0.0, 1.0, replicas=200)


def test_mckean_transports_the_pde_wave(coarse_field, medium_field):
    xs = np.array([-1.0, 0.0, 1.0, 2.0])
    y, t = 3.0, 1.0
    est = wm.mckean_evolve(medium_field, t, xs + SQRT2 * t, y, replicas=3000, seed=8)
    grid_err = np.abs(coarse_field(xs, np.full(4, y)) - medium_field(xs, np.full(4, y)))
    target = medium_field(xs, np.full(4, y))
    for e, tv, g in zip(est, target, grid_err):
        assert abs(e.value - tv) <= max(3 * e.std_error, 2 * g), (e.value, tv, e.std_error, g)


def test_smoothing_at_time_zero_is_trivial():
    r = wm.smoothing_consistency(t=0.0, y=1.0, T=4.0, replicas=500, seed=9)
    assert abs(r.mean_diff) <= 4 * r.joint_se
    assert r.ks_pvalue > 0.01


def test_smoothing_recursion_holds_in_law():
    r = wm.smoothing_consistency(t=1.0, y=1.0, T=6.0, replicas=10_000, seed=10)
    assert abs(r.mean_diff) <= 4 * r.joint_se
    assert r.ks_pvalue > 0.01


def test_smoothing_preconditions():
    with pytest.raises(ValueError):
        wm.smoothing_consistency(t=3.0, replicas=200)
    with pytest.raises(ValueError):
        wm.smoothing_consistency(t=1.0, T=9.5, replicas=200)


def test_pinned_grid_is_pinned():
    g = wm.pinned_phi_grid([-1.0, 0.0, 1.0], [5.0], T=4.0, replicas=500, seed=11)
    assert g.value[0, 1] == pytest.approx(0.5, abs=1e-9)
    assert np.all(np.diff(g.value[0]) < 0)
    assert np.all(g.std_error >= 0) and g.pin_se > 0


def test_estimate_interval():
    e = wm.EstimateCI(0.5, 0.1, 100, 8.0)
    lo, hi = e.interval()
    assert lo == pytest.approx(0.304) and hi == pytest.approx(0.696)
