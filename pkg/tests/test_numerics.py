from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flagmirror.errors import DegenerateModulus, NonGenericParameters, ParameterError
from flagmirror.numerics import ParamSet, build_params, sample_params


def test_q_is_square_of_sqrt_q():
    p = build_params(2, "1/10", "1/2", ["1/3", "1"], ["1", "1/7"], check_genericity=False)
    assert abs(p.q - Fraction(1, 100)) < 1e-100


def test_unit_zeta_with_hbar_equal_q_gives_unit_z():
    p = build_params(3, "1/10", "1/10", ["1/3", "1/5", "1"], ["1", "1", "1"],
                     backend="exact", N=4, check_genericity=False)
    assert p.z == (1, 1)


def test_equal_u_is_nongeneric():
    with pytest.raises(NonGenericParameters) as err:
        build_params(2, "1/10", "1/2", ["1/3", "1/3"], ["1", "1/7"])
    assert "u" in str(err.value)


def test_modulus_must_be_below_one():
    with pytest.raises(DegenerateModulus):
        build_params(2, "1", "1/2", ["1/3", "1"], ["1", "1/7"])


def test_zero_generator_rejected():
    with pytest.raises(ParameterError):
        build_params(2, "1/10", "0", ["1/3", "1"], ["1", "1/7"])


def test_sampling_is_deterministic():
    a, b = sample_params(2, 0), sample_params(2, 0)
    assert a.to_dict() == b.to_dict()
    assert a == b


def test_sampled_ranges():
    p = sample_params(3, 1)
    assert all(abs(x) < 1 for x in p.a)
    assert all(abs(x) < 1 for x in p.z)
    assert 0.5e-2 < abs(float(p.q)) < 2e-2
    for x in p.a:
        assert 1e-3 <= float(x) <= 1e-1
    for x in p.z:
        assert 1e-3 <= float(x) <= 1e-2


def test_toml_round_trip(p3):
    again = ParamSet.from_toml(p3.to_toml())
    assert again == p3
    assert 'sqrt_q = "' in p3.to_toml()


def test_shifted_multiplies_by_q(p2):
    s = p2.shifted(u=[1], zeta=[2])
    assert abs(s.u[0] / p2.u[0] - p2.q) < 1e-90
    assert abs(s.zeta[1] / p2.zeta[1] - p2.q) < 1e-90
    assert s.u[1] == p2.u[1]


def test_tolerance_formula(p2):
    assert p2.tolerance == pytest.approx(100 * float(p2.sqrt_q) ** 78)


fractions = st.fractions(min_value=-10, max_value=10, max_denominator=1000)


@settings(max_examples=50)
@given(fractions, fractions)
def test_exact_backend_add_sub(x, y):
    p = sample_params(2, 0, N=3, backend="exact")
    a, b = p.scalar(x), p.scalar(y)
    assert (a + b) - b == a
