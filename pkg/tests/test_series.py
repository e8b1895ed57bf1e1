from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from flagmirror.series import TruncatedSeries

D = 3
z1, z2 = sympy.symbols("z1 z2")

coeff = st.fractions(min_value=-5, max_value=5, max_denominator=20)
series_dicts = st.dictionaries(
    st.tuples(st.integers(0, D), st.integers(0, D)), coeff, max_size=8)


def to_sympy(s: TruncatedSeries):
    return sum((sympy.Rational(v.numerator, v.denominator) * z1**a * z2**b
                for (a, b), v in s.coeffs.items()), sympy.Integer(0))


def truncate(expr):
    poly = sympy.Poly(sympy.expand(expr), z1, z2)
    out = {}
    for (a, b), c in poly.terms():
        if a <= D and b <= D and c != 0:
            out[(a, b)] = Fraction(int(c.p), int(c.q))
    return out


def nonzero(s):
    return {k: v for k, v in s.coeffs.items() if v != 0}


@settings(max_examples=60)
@given(series_dicts, series_dicts)
def test_product_matches_sympy(a, b):
    sa = TruncatedSeries(2, D, a, Fraction(0))
    sb = TruncatedSeries(2, D, b, Fraction(0))
    assert nonzero(sa * sb) == truncate(to_sympy(sa) * to_sympy(sb))
    assert nonzero(sa + sb) == truncate(to_sympy(sa) + to_sympy(sb))


@settings(max_examples=40)
@given(series_dicts, coeff.filter(lambda c: c != 0))
def test_reciprocal_inverts(a, c0):
    a = dict(a)
    a[(0, 0)] = c0
    s = TruncatedSeries(2, D, a, Fraction(0))
    prod = s * s.reciprocal(Fraction(1))
    assert nonzero(prod) == {(0, 0): Fraction(1)}


def test_terms_beyond_bound_dropped():
    s = TruncatedSeries(1, 2, {(3,): 1, (2,): 5})
    assert s.degrees() == [(2,)]
    assert (s * s).coeffs == {}


def test_geometric_and_evaluate():
    g = TruncatedSeries.geometric(1, 5, (1,), Fraction(1, 2), Fraction(1), Fraction(0))
    assert [g[(m,)] for m in range(6)] == [Fraction(1, 2**m) for m in range(6)]
    assert g.evaluate([Fraction(1)]) == sum(Fraction(1, 2**m) for m in range(6))


def test_tail_estimate_uses_boundary_terms():
    s = TruncatedSeries(2, 2, {(0, 0): 1, (2, 0): 3, (1, 2): -4, (1, 1): 100})
    z = [Fraction(1, 10), Fraction(1, 10)]
    assert s.tail_estimate(z) == pytest.approx(3e-2 + 4e-3)


def test_shape_errors():
    with pytest.raises(ValueError):
        TruncatedSeries(2, 2, {(1,): 1})
    with pytest.raises(ValueError):
        TruncatedSeries(1, 2, {(1,): 1}) + TruncatedSeries(2, 2)
    with pytest.raises(ZeroDivisionError):
        TruncatedSeries(1, 2, {(1,): 1}).reciprocal(1)
