import math
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from coxtree.field import AlgebraicScalar, RealCyclotomicField, chebyshev_two_cos, field_for


@pytest.mark.parametrize("L", range(1, 15))
def test_minpoly_agrees_with_sympy(L):
    x = sympy.Symbol("x")
    ref = sympy.Poly(sympy.minimal_polynomial(2 * sympy.cos(sympy.pi / L), x), x)
    K = field_for(L)
    assert list(K.minpoly) == [int(c) for c in reversed(ref.all_coeffs())]
    assert K.degree == ref.degree()


@pytest.mark.parametrize("k", range(0, 9))
def test_chebyshev(k):
    t = 0.377
    c = chebyshev_two_cos(k)
    assert sum(a * (2 * math.cos(t)) ** i for i, a in enumerate(c)) == pytest.approx(2 * math.cos(k * t))


@pytest.mark.parametrize("L,m", [(6, 2), (6, 3), (6, 6), (21, 7), (21, 3), (12, 4), (10, 5)])
def test_two_cos_values(L, m):
    K = field_for(L)
    assert K.float_value(K.two_cos_pi_over(m)) == pytest.approx(2 * math.cos(math.pi / m), abs=1e-12)


def test_two_cos_outside_field():
    with pytest.raises(ValueError):
        field_for(6).two_cos_pi_over(4)


def test_sign_zero_and_rational():
    K = field_for(1)
    assert K.sign([0]) == 0
    assert K.sign([Fraction(-1, 3)]) == -1


def _mp_value(L, coeffs):
    with mpmath.workdps(120):
        th = 2 * mpmath.cos(mpmath.pi / L)
        return sum(mpmath.mpf(int(c)) * th**k for k, c in enumerate(coeffs))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([5, 7, 9, 12, 21]), st.lists(st.integers(-40, 40), min_size=1, max_size=6))
def test_sign_matches_high_precision(L, coeffs):
    K = field_for(L)
    coeffs = K.reduce_poly(coeffs)
    v = _mp_value(L, coeffs)
    expected = 0 if not any(coeffs) else (1 if v > 0 else -1)
    assert K.sign(coeffs) == expected


@pytest.mark.parametrize("digits", [16, 25, 40])
def test_near_cancellation_uses_exact_path(digits):
    # theta = golden ratio for L = 5; compare with decimal truncations just below and above
    K = field_for(5)
    with mpmath.workdps(digits + 20):
        phi = (1 + mpmath.sqrt(5)) / 2
        below = Fraction(int(mpmath.floor(phi * 10**digits)), 10**digits)
    above = below + Fraction(1, 10**digits)
    assert K.sign([-below, 1]) == 1
    assert K.sign([-above, 1]) == -1
    assert K.sign([above, -1]) == 1


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=2, max_size=2), st.lists(st.integers(-9, 9), min_size=2, max_size=2))
def test_scalar_arithmetic_matches_floats(a, b):
    K = field_for(5)
    x, y = AlgebraicScalar(K, a), AlgebraicScalar(K, b)
    assert float(x * y) == pytest.approx(float(x) * float(y), abs=1e-9)
    assert float(x + y) == pytest.approx(float(x) + float(y), abs=1e-9)
    assert (x - x).is_zero()


def test_bad_L():
    with pytest.raises(ValueError):
        RealCyclotomicField(0)
