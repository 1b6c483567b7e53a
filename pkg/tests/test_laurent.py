import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confeig.laurent import LaurentSeries, coefficient, conjugate_on_circle, multiply, power

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


@st.composite
def series(draw, max_len=6):
    lo = draw(st.integers(-6, 6))
    coeffs = draw(st.lists(cplx, min_size=1, max_size=max_len))
    return LaurentSeries(lo, coeffs)


def close(s, t, tol=1e-9):
    return s.allclose(t, atol=tol)


@settings(max_examples=60, deadline=None)
@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert close(a + b, b + a)
    assert close(a * b, b * a)
    assert close((a * b) * c, a * (b * c))
    assert close(a * (b + c), a * b + a * c)
    assert close(a * LaurentSeries.unit(), a)
    assert close(a - a, LaurentSeries.zero())


@settings(max_examples=60, deadline=None)
@given(series(), series(), st.floats(0, 2 * np.pi))
def test_product_evaluates_pointwise(a, b, theta):
    assert abs(multiply(a, b).evaluate(theta) - a(theta) * b(theta)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(series(), st.floats(0, 2 * np.pi))
def test_conjugate_is_pointwise_conjugate(a, theta):
    assert abs(conjugate_on_circle(a)(theta) - np.conj(a(theta))) < 1e-10
    assert a.conj().conj() == a


@settings(max_examples=40, deadline=None)
@given(series(max_len=4))
def test_constant_term_is_circle_mean(a):
    theta = 2 * np.pi * np.arange(2048) / 2048
    assert abs(np.mean(a(theta)) - coefficient(a, 0)) < 1e-10


@settings(max_examples=30, deadline=None)
@given(series(max_len=3), st.integers(0, 6))
def test_power_matches_repeated_product(a, p):
    ref = LaurentSeries.unit()
    for _ in range(p):
        ref = ref * a
    assert power(a, p).allclose(ref, atol=1e-9, rtol=1e-12)


def test_power_rejects_negative():
    with pytest.raises(ValueError):
        power(LaurentSeries.unit(), -1)


def test_window_and_trim():
    s = LaurentSeries(-2, [0, 1, 2, 0])
    assert s.trim().lo == -1 and s.trim().hi == 0
    assert np.array_equal(s.window(-4, 3), [0, 0, 0, 1, 2, 0, 0, 0])
    assert s.coefficient(10) == 0
    assert LaurentSeries.from_dict({3: 1.0, -1: 2.0}).coefficient(3) == 1.0


def test_immutable():
    s = LaurentSeries(0, [1, 2])
    with pytest.raises(ValueError):
        s.coeffs[0] = 5
