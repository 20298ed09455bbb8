import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kpplab import martingales as mg
from kpplab.bbm_sim import SimConfig, map_replicas, simulate_replica


def root(y=1.0):
    return simulate_replica(SimConfig(origin_y=y, horizon_T=0.0))[0]


def test_single_particle_at_time_zero():
    r = mg.evaluate_martingales(root(), alphas=(2.0,), lam_mu=((1.0, 0.5),))
    assert r.W == 1.0 and r.Z == 0.0 and r.A == 1.0 and r.D == 0.0
    assert r.Z_alpha[2.0] == 2.0
    assert r.W_lm[(1.0, 0.5)] == pytest.approx(math.sinh(0.5), rel=1e-15)
    assert math.sinh(0.5) == pytest.approx(0.521095, abs=1e-6)


def test_empty_snapshot_gives_zero():
    c = SimConfig(origin_y=0.01, horizon_T=2.0, seed=0)
    s = next(s for r in range(200) for s in simulate_replica(c, r) if len(s) == 0)
    rep = mg.evaluate_martingales(s, (1.0,), ((1.0, 0.5),))
    assert (rep.A, rep.D, rep.W, rep.Z, rep.Z_alpha[1.0], rep.W_lm[(1.0, 0.5)]) == (0, 0, 0, 0, 0, 0)


def test_parameter_validation():
    with pytest.raises(ValueError):
        mg.evaluate_martingales(root(), alphas=(0.0,))
    with pytest.raises(ValueError):
        mg.evaluate_martingales(root(), lam_mu=((1.0, 0.0),))


@given(seed=st.integers(0, 2**40), T=st.floats(0.2, 3.0))
def test_shaving_identities_and_signs(seed, T):
    s = simulate_replica(SimConfig(origin_y=1.0, horizon_T=T, seed=seed))[-1]
    alphas = (0.5, 1.0, 2.0, 8.0)
    r = mg.evaluate_martingales(s, alphas, ((1.0, 0.5), (1.5, 0.5)))
    assert r.A >= 0 and r.W >= 0 and all(v >= 0 for v in r.W_lm.values())
    za = [r.Z_alpha[a] for a in alphas]
    assert all(v >= 0 for v in za)
    assert all(b >= a for a, b in zip(za, za[1:]))
    top = float(s.max_drift_excess.max()) if len(s) else -math.inf
    for a in alphas:
        if top <= a:
            ref = r.Z + a * r.W
            assert abs(r.Z_alpha[a] - ref) <= 1e-12 * max(1.0, abs(ref), r.Z_alpha[a])


@given(seed=st.integers(0, 2**40))
def test_one_dimensional_projection_matches_scalar_reference(seed):
    s = simulate_replica(SimConfig(origin_y=0.0, horizon_T=2.0, killing_enabled=False, seed=seed))[-1]
    r = mg.evaluate_martingales(s)
    assert r.no_killing_variant
    assert r.A == mg.additive_1d(s.x, s.t)
    assert r.D == mg.derivative_1d(s.x, s.t)


def test_exponent_floor_drops_only_negligible_terms():
    expo = np.array([-800.0, -744.0, 0.0])
    assert mg._weighted_sum(expo) == math.fsum([math.exp(-744.0), 1.0])


def test_sinh_weight_matches_direct_formula():
    x, y = np.array([0.3, -1.0]), np.array([0.2, 4.0])
    e, f = mg.sinh_weight_exponent(1.0, 0.5, x, y, 1.5)
    direct = np.sinh(0.5 * y) * np.exp(x - (0.5 + 0.125 + 1.0) * 1.5)
    assert np.allclose(np.exp(e) * f, direct, rtol=1e-14)


def test_richardson():
    # v(T) = L + c T^-1/2 is extrapolated exactly
    v = lambda T: 3.0 + 2.0 / math.sqrt(T)
    assert mg.richardson(v(4.0), 4.0, v(9.0), 9.0) == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(ValueError):
        mg.richardson(1.0, 2.0, 1.0, 2.0)


def test_mean_identities_at_two_checkpoints():
    c = SimConfig(origin_y=1.0, horizon_T=2.0, checkpoint_times=(1.0, 2.0), seed=17)
    tr = mg.martingale_trajectory(c, alphas=(2.0,), lam_mu=((1.0, 0.5),), replicas=20_000)
    for name, key, target in (("W", None, 1.0), ("Z", None, 0.0), ("Z_alpha", 2.0, 2.0),
                              ("W_lm", (1.0, 0.5), math.sinh(0.5))):
        v = tr.values(name, key)
        for k in range(v.shape[1]):
            se = v[:, k].std(ddof=1) / math.sqrt(v.shape[0])
            assert abs(v[:, k].mean() - target) <= 4 * se, (name, k)


def test_trajectory_rows_and_summary():
    c = SimConfig(origin_y=1.0, horizon_T=1.0, checkpoint_times=(0.5, 1.0), seed=2)
    tr = mg.martingale_trajectory(c, alphas=(1.0, 2.0), lam_mu=((1.0, 0.5),), replicas=5)
    rows = list(mg.trajectory_rows(tr))
    assert len(rows) == 5 * 2 * 2
    assert all(len(r) == 11 for r in rows)
    summ = tr.summary()
    assert {s["quantity"] for s in summ} >= {"A", "D", "W", "Z", "Z_alpha", "W_lm"}
    assert all(s["q1"] <= s["median"] <= s["q3"] for s in summ)
    with pytest.raises(ValueError):
        mg.martingale_trajectory(SimConfig(origin_y=1.0, horizon_T=1.0, checkpoint_times=()), replicas=1)
