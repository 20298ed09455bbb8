import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kpplab import potential as pt

SQRT2 = math.sqrt(2.0)
coord = st.floats(0.05, 50.0)


@given(u=coord, v=coord, a=coord, b=coord)
def test_green_symmetric_and_positive(u, v, a, b):
    if math.hypot(a - u, b - v) < 1e-6:
        return
    g = pt.green_quarter((u, v), (a, b))
    assert g > 0
    assert abs(g - pt.green_quarter((a, b), (u, v))) <= 1e-12 * max(1.0, abs(g))


@given(u=coord, v=coord, t=st.floats(0.0, 100.0))
def test_green_vanishes_on_the_boundary(u, v, t):
    assert abs(pt.green_quarter((u, v), (t, 0.0))) <= 1e-12
    assert abs(pt.green_quarter((u, v), (0.0, t))) <= 1e-12


def test_green_value_and_errors():
    assert pt.green_quarter((1.0, 1.0), (1.0, 2.0)) == pytest.approx(0.1976, abs=1e-4)
    expected = math.log(math.hypot(0, 3) * math.hypot(2, 1) / (1.0 * math.hypot(2, 3))) / math.pi
    assert pt.green_quarter((1.0, 1.0), (1.0, 2.0)) == pytest.approx(expected, abs=1e-15)
    with pytest.raises(pt.SingularPointError):
        pt.green_quarter((1.0, 2.0), (1.0, 2.0))
    with pytest.raises(ValueError):
        pt.green_quarter((0.0, 1.0), (1.0, 2.0))
    with pytest.raises(ValueError):
        pt.green_quarter((1.0, 1.0), (-1.0, 2.0))
    X, Y = np.array([1.0, 3.0]), np.array([2.0, 0.5])
    arr = pt.green_quarter_array((1.0, 1.0), X, Y)
    assert np.allclose(arr, [pt.green_quarter((1.0, 1.0), p) for p in zip(X, Y)], rtol=1e-13)


def test_green_regimes_in_brackets():
    for r in pt.green_asymptotics_check(1000, seed=0):
        assert r.passed, r
    with pytest.raises(ValueError):
        pt.green_asymptotics_check(10)


def test_green_harmonic_to_second_order():
    e1 = pt.green_harmonicity(h=0.1)
    e2 = pt.green_harmonicity(h=0.05)
    assert e1 / e2 >= 3.5


def test_harmonic_polynomials():
    box = (0.5, 3.0, 0.5, 3.0)
    assert pt.harmonicity_check(lambda X, Y: X * Y, box, 0.05) < 1e-9
    assert pt.harmonicity_check(lambda X, Y: X**3 - 3 * X * Y**2, box, 0.05) < 1e-8
    assert pt.harmonicity_check(lambda X, Y: X * X, box, 0.05) == pytest.approx(2.0, abs=1e-8)
    with pytest.raises(ValueError):
        pt.harmonicity_check(lambda X, Y: X, box, 0.1, singular=[(1.0, 1.0)], exclude=0.5)


def test_eta_inverse_values():
    w = pt.eta_inverse(1 + 1j)
    assert w.real == pytest.approx(0.430978, abs=1e-6)
    assert w.imag == pytest.approx(0.672151, abs=1e-6)
    assert pt.eta_inverse(0j) == 0
    assert pt.conformal_eta(0j) == pytest.approx(0j, abs=1e-14)
    assert pt.conformal_eta(1 + 1j, "inverse") == w
    with pytest.raises(ValueError):
        pt.conformal_eta(1j, "sideways")


@given(r=st.floats(1e-3, 1e3), th=st.floats(0.0, math.pi / 2))
def test_eta_round_trip(r, th):
    z = cmath.rect(r, th)
    e = pt.conformal_eta(z)
    assert abs(pt.eta_inverse(e) - z) <= 1e-10 * max(1.0, abs(z))
    assert abs(e - pt.varpi(z)) <= 2.0


@given(r=st.floats(1e-6, 1e6), th=st.floats(0.0, math.pi / 2))
def test_eta_inverse_derivative_range(r, th):
    d = abs(pt.eta_inverse_derivative(cmath.rect(r, th)))
    assert 1 - 1 / SQRT2 - 1e-12 <= d <= 1 + 1 / SQRT2 + 1e-12


def test_lambda_boundary_maps_to_the_imaginary_axis():
    xs = np.linspace(1e-3, 10.0, 200)
    for x, y in zip(xs, pt.lambda_boundary(xs)):
        assert abs(pt.eta_inverse(complex(x, y)).real) < 1e-8
    assert pt.in_lambda(1.0 + 1.0j) and not pt.in_lambda(-0.5 + 0.1j)


def test_eta_check_report():
    rep = pt.eta_check(1000, seed=1)
    assert rep.max_roundtrip <= 1e-10 * 1e3
    assert rep.max_eta_minus_varpi <= 2.0
    lo, hi = rep.derivative_range
    assert lo >= 1 - 1 / SQRT2 and hi <= 1 + 1 / SQRT2
    assert rep.max_boundary_real < 1e-8 and rep.inside_lambda


@given(u=st.floats(0, 50), v=st.floats(0, 50))
def test_anharmonic_weight_nonnegative(u, v):
    assert pt.anharmonic_weight(u, v) >= 0


def test_anharmonic_ratio_bounded_and_stable():
    rows = pt.anharmonic_bound_check([(1.0, 1.0), (5.0, 5.0), (20.0, 2.0)])
    for r in rows:
        assert r.stable and 0 < r.ratio <= pt.ANHARMONIC_MAX_RATIO
    with pytest.raises(ValueError):
        pt.anharmonic_bound_check([(1.0, 1.0)], quadrature_n=50)
    with pytest.raises(ValueError):
        pt.anharmonic_bound_check([(0.1, 1.0)])


def test_quarter_point_and_rows():
    assert pt.QuarterPoint(1.0, 2.0).interior and not pt.QuarterPoint(0.0, 2.0).interior
    with pytest.raises(ValueError):
        pt.QuarterPoint(-1.0, 0.0)
    rows = pt.report_rows("eta", [("roundtrip", 0.0, 1e-12, 1e-10, True)])
    assert rows == [("eta", "roundtrip", 0.0, 1e-12, 1e-10, True)]
