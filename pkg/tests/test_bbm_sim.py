import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from kpplab import bbm_sim as bs
from kpplab._backend import native_kernels

needs_native = pytest.mark.skipif(native_kernels is None, reason="compiled kernels not built")


def cfg(**kw):
    base = dict(origin_y=1.0, horizon_T=2.0, seed=3)
    base.update(kw)
    return bs.SimConfig(**base)


def test_horizon_zero_is_the_root():
    (s,) = bs.simulate_replica(cfg(horizon_T=0.0))
    assert len(s) == 1
    assert (s.x[0], s.y[0]) == (0.0, 1.0)
    assert s.max_drift_excess[0] == 0.0 and s.parent_ids[0] == -1


def test_config_validation():
    for bad in (dict(origin_y=-1.0), dict(dt_max=0.0), dict(population_cap=0),
                dict(checkpoint_times=(2.0, 1.0)), dict(checkpoint_times=(3.0,)), dict(branch_rate=2.0)):
        with pytest.raises(ValueError):
            cfg(**bad)


def test_snapshots_are_immutable():
    (s,) = bs.simulate_replica(cfg(horizon_T=0.0))
    with pytest.raises(ValueError):
        s.x[0] = 1.0
    with pytest.raises(AttributeError):
        s.t = 2.0


@given(seed=st.integers(0, 2**63 - 1), y0=st.floats(0.05, 5.0), T=st.floats(0.0, 2.5))
def test_snapshot_invariants(seed, y0, T):
    c = cfg(origin_y=y0, horizon_T=T, seed=seed, checkpoint_times=(T / 2, T))
    snaps = bs.simulate_replica(c)
    for s in snaps:
        assert np.all(s.birth_time <= s.t + 1e-12)
        assert np.all(s.y > 0) and np.all(s.min_y > 0)
        assert np.all(s.min_y <= s.y)
        assert np.all(s.max_drift_excess >= s.x - math.sqrt(2) * s.t - 1e-12)
        assert np.all(np.diff(s.ids) > 0)
        # binary labels: parent of k is (k - 1) // 2
        nz = s.ids > 0
        assert np.all(s.parent_ids[nz] == (s.ids[nz] - 1) // 2)


@given(seed=st.integers(0, 2**32))
def test_killing_is_a_subset_of_the_free_population(seed):
    a = bs.simulate_replica(cfg(seed=seed, killing_enabled=True))[-1]
    b = bs.simulate_replica(cfg(seed=seed, killing_enabled=False))[-1]
    assert set(a.ids.tolist()) <= set(b.ids.tolist())
    common = np.isin(b.ids, a.ids)
    assert np.array_equal(b.x[common], a.x) and np.array_equal(b.y[common], a.y)


def test_trackers_are_inherited_and_monotone():
    c = cfg(horizon_T=3.0, checkpoint_times=(1.0, 2.0, 3.0), killing_enabled=False, seed=11)
    snaps = bs.simulate_replica(c)
    for s0, s1 in zip(snaps, snaps[1:]):
        pos = {int(i): k for k, i in enumerate(s0.ids)}
        for k, i in enumerate(s1.ids):
            a = int(i)
            while a not in pos and a > 0:
                a = (a - 1) // 2
            if a in pos:
                assert s1.max_drift_excess[k] >= s0.max_drift_excess[pos[a]]
                assert s1.min_y[k] <= s0.min_y[pos[a]]


def test_determinism_and_thread_independence(monkeypatch):
    c = cfg(horizon_T=2.5, seed=7)
    one = bs.map_replicas(lambda r: bs.simulate_replica(c, r), 12, threads=1)
    four = bs.map_replicas(lambda r: bs.simulate_replica(c, r), 12, threads=4)
    for a, b in zip(one, four):
        assert np.array_equal(a[-1].x, b[-1].x) and np.array_equal(a[-1].ids, b[-1].ids)


@needs_native
@given(seed=st.integers(0, 2**63 - 1), dt=st.sampled_from([0.01, 0.1, 1.0]), kill=st.booleans())
def test_backends_are_bit_identical(seed, dt, kill):
    c = cfg(seed=seed, dt_max=dt, killing_enabled=kill, horizon_T=3.0, checkpoint_times=(1.5, 3.0))
    for a, b in zip(bs.simulate_replica(c, 0, "python"), bs.simulate_replica(c, 0, "cython")):
        for f in ("ids", "parent_ids", "x", "y", "max_drift_excess", "min_y", "birth_time"):
            assert np.array_equal(getattr(a, f), getattr(b, f)), f


@needs_native
@given(key=st.integers(0, 2**64 - 1), pid=st.integers(0, 2**40))
def test_stream_uniforms_match(key, pid):
    from kpplab import _pykernels as py
    u = py.stream_uniforms(key, pid, 16)
    assert np.array_equal(u, native_kernels.stream_uniforms(key, pid, 16))
    assert np.all((u > 0) & (u < 1))


def test_population_cap_is_reported():
    with pytest.raises(bs.PopulationCapExceeded):
        bs.simulate_replica(cfg(killing_enabled=False, horizon_T=8.0, population_cap=50, seed=1))


def test_mean_population_is_exp_t():
    c = cfg(killing_enabled=False, checkpoint_times=(1.0, 2.0), seed=5)
    n = np.array(bs.map_replicas(lambda r: [len(s) for s in bs.simulate_replica(c, r)], 10_000), float)
    for k, t in enumerate((1.0, 2.0)):
        m, sd = n[:, k].mean(), n[:, k].std(ddof=1)
        assert abs(m - math.exp(t)) <= 3 * sd / math.sqrt(n.shape[0])


def test_survival_increases_with_start_height():
    def surv(y):
        c = cfg(origin_y=y, horizon_T=1.0, seed=9)
        return np.mean(bs.map_replicas(lambda r: len(bs.simulate_replica(c, r)[-1]) > 0, 2000))
    assert surv(0.01) < 0.2 < surv(2.0)


# bridge kill ---------------------------------------------------------------


def test_bridge_kill_probability_matches_fine_paths():
    p = math.exp(-2.0)
    rng = np.random.default_rng(0)
    u = rng.random(200_000)
    assert abs(np.mean([bs.bridge_kill(1.0, 1.0, 1.0, v) for v in u[:50_000]]) - p) < 0.006
    # fine-step bridge paths from 1 to 1 over unit time
    n, m = 4000, 1000
    inc = rng.standard_normal((n, m)) * math.sqrt(1.0 / m)
    w = np.cumsum(inc, axis=1)
    s = np.linspace(1.0 / m, 1.0, m)
    bridge = 1.0 + w - s * w[:, -1:]
    frac = np.mean(bridge.min(axis=1) <= 0)
    assert abs(frac - p) < 0.03  # discrete monitoring misses a little


def test_bridge_kill_limits():
    assert not bs.bridge_kill(5.0, 5.0, 0.01, 1e-300)
    probs = [math.exp(-2.0 / dt) for dt in (1.0, 0.5, 0.1, 0.01)]
    assert all(b < a for a, b in zip(probs, probs[1:]))
    with pytest.raises(ValueError):
        bs.bridge_kill(1.0, 1.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        bs.bridge_kill(0.0, 1.0, 1.0, 0.5)


@given(a=st.floats(-5, 5), b=st.floats(-5, 5), h=st.floats(1e-3, 4), u=st.floats(1e-12, 1 - 1e-12))
def test_bridge_extrema_bracket_endpoints(a, b, h, u):
    assert bs.bridge_min(a, b, h, u) <= min(a, b) + 1e-12
    assert bs.bridge_max(a, b, h, u) >= max(a, b) - 1e-12


def test_bridge_min_law():
    # P(min <= m) = exp(-2 (a - m)(b - m) / h) for m below both endpoints
    rng = np.random.default_rng(1)
    mins = np.array([bs.bridge_min(1.0, 0.5, 1.0, v) for v in rng.random(40_000)])
    for m in (0.0, -0.5, 0.3):
        assert abs(np.mean(mins <= m) - math.exp(-2 * (1 - m) * (0.5 - m))) < 0.01


# Bessel(3) and spines ------------------------------------------------------


def test_bessel3_sampler():
    assert bs.sample_bessel3(1.0, 0.0, 1, seed=0)[0] == 1.0
    r = bs.sample_bessel3_endpoints(1.0, 1.0, 100_000, seed=2)
    se = r.__pow__(2).std() / math.sqrt(r.size)
    assert abs(np.mean(r**2) - 4.0) < 3 * se
    paths = np.array([bs.sample_bessel3(0.5, 2.0, 200, seed=s) for s in range(200)])
    assert paths.min() > 0
    with pytest.raises(ValueError):
        bs.sample_bessel3(0.0, 1.0, 10)


def test_spine_initial_condition():
    run = bs.simulate_spine(bs.SpineKind.critical_additive(), 1.0, 0.0, seed=0)
    (s,) = run.snapshots
    assert len(s) == 1 and (s.x[0], s.y[0]) == (0.0, 1.0)


def test_critical_spine_vertical_marginal_is_bessel3():
    ys = [bs.simulate_spine(bs.SpineKind.critical_additive(), 1.0, 4.0, seed=s, dt_max=0.5).y[-1]
          for s in range(600)]
    ref = bs.sample_bessel3_endpoints(1.0, 4.0, 20_000, seed=99)
    assert stats.ks_2samp(ys, ref).pvalue > 0.01


def test_shaved_spine_stays_below_the_curve():
    for s in range(20):
        run = bs.simulate_spine(bs.SpineKind.shaved_derivative(2.0), 1.0, 3.0, seed=s)
        assert np.all(run.x <= math.sqrt(2) * run.times + 2.0 + 1e-12)


def test_supercritical_spine_is_positive_and_branches_at_rate_two():
    runs = [bs.simulate_spine(bs.SpineKind.supercritical(1.0, 0.5), 0.5, 2.0, seed=s, dt_max=0.05)
            for s in range(150)]
    assert all(r.y.min() > 0 for r in runs)
    counts = np.array([r.branch_times.size for r in runs])
    assert abs(counts.mean() - 4.0) < 4 * counts.std() / math.sqrt(counts.size)


def test_spine_kind_validation():
    with pytest.raises(ValueError):
        bs.SpineKind.shaved_derivative(0.0)
    with pytest.raises(ValueError):
        bs.SpineKind.supercritical(1.0, -0.1)
    with pytest.raises(ValueError):
        bs.simulate_spine(bs.SpineKind.critical_additive(), 0.0, 1.0)
