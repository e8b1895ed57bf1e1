import math

import pytest

from flagmirror.combinatorics import Perm, all_perms, preceq
from flagmirror.envelope import (
    P_factor,
    WeightFnParams,
    XPoint,
    e_factor,
    e_value,
    expected_row_sign,
    normalized_matrices,
    psi,
    quasi_periodicity,
    quasi_periodicity_g,
    restrict,
    restriction_matrix,
    stab_matrix,
    theta_n_plus,
    weight_Wtilde,
    _orderings,
)
from flagmirror.numerics import sample_params
from flagmirror.qseries import theta


@pytest.fixture(scope="module")
def wp2(p2):
    return WeightFnParams.from_params(p2, {1: [p2.scalar("7/5")]})


def test_psi_cases_n2(p2, wp2):
    I = Perm((1, 2))
    sx = p2.scalar("3/2")
    mu = wp2.sqrt_mu
    expected = theta(sx * mu[0] / mu[1], p2) / theta(mu[0] / mu[1], p2)
    assert abs(psi(I, 1, 1, 1, sx, wp2) / expected - 1) < 1e-95
    assert psi(I, 1, 1, 2, sx, wp2) == theta(sx / wp2.sqrt_hbar, p2)
    assert abs(psi(I, 1, 1, 1, p2.one, wp2) - 1) < 1e-95


def test_weight_function_n2_by_hand(p2, wp2):
    st_ = wp2.sqrt_t[1][0]
    w1, w2 = wp2.sqrt_w
    mu = wp2.sqrt_mu
    h = wp2.sqrt_hbar
    hand = -(theta(w1 / st_ * mu[0] / mu[1], p2) / theta(mu[0] / mu[1], p2)
             * theta(w2 / (st_ * h), p2))
    assert abs(weight_Wtilde(Perm((1, 2)), wp2) / hand - 1) < 1e-90


@pytest.mark.parametrize("n,count", [(2, 1), (3, 2), (4, 12), (5, 288)])
def test_symmetrization_size(n, count):
    t = {k: list(range(k)) for k in range(1, n)}
    assert sum(1 for _ in _orderings(t, n)) == count == math.prod(
        math.factorial(k) for k in range(1, n))


def test_weight_function_symmetric_in_blocks(p3):
    pt = XPoint.from_params(p3, seed=2)
    wp = pt.weight_params()
    swapped = WeightFnParams(wp.params, wp.sqrt_w, wp.sqrt_mu, wp.sqrt_hbar,
                             {1: wp.sqrt_t[1], 2: wp.sqrt_t[2][::-1]})
    for I in all_perms(3):
        a, b = weight_Wtilde(I, wp), weight_Wtilde(I, swapped)
        assert abs(a / b - 1) < 1e-90


def test_restriction_n2_by_hand(p2):
    # w_i = 1/u_i
    sw = [1 / s for s in p2.generators[2:4]]
    hand = theta(p2.generators[1] * sw[0] / sw[1], p2)
    assert abs(restrict(Perm((1, 2)), Perm((1, 2)), p2) / hand - 1) < 1e-95


@pytest.mark.parametrize("n", [2, 3])
def test_restriction_properties(n):
    p = sample_params(n, 11)
    M = restriction_matrix(p)
    for I, row in zip(M.labels, M.entries):
        scale = max(abs(v) for v in row)
        for J, v in zip(M.labels, row):
            if not preceq(I, J):
                assert abs(v) <= p.tolerance * scale
        assert abs(M[I, I] / P_factor(I, p) - 1) <= p.tolerance


def test_stab_matrix_diagonal_and_sign(p3):
    S = stab_matrix(p3)
    for I in S.labels:
        assert abs(S[I, I] / theta_n_plus(I, p3) - 1) < 1e-95
        assert abs(S.row_scale[I] - expected_row_sign(I)) <= p3.tolerance


def test_e_factor_shifts():
    p = sample_params(3, 4, N=90)
    I = Perm((2, 3, 1))
    base = e_factor(I, p)
    # z_1 -> q z_1 is zeta_1 -> q zeta_1
    ratio = e_factor(I, p.shifted(zeta=[1])) / base
    L1 = p.u[I[1] - 1]
    assert abs(ratio / L1 - 1) < 1e-60


def test_e_factor_chern_root_shift(p3):
    pt = XPoint.from_params(p3, 0)

    def ev(point):
        sl = [math.prod(point.sqrt_x[j]) for j in range(1, p3.n)]
        return e_value(sl, point.sqrt_z, p3)

    for k, a in ((1, 1), (2, 2)):
        ratio = ev(pt.shifted(("x", k, a))) / ev(pt)
        z_k = pt.sqrt_z[k - 1] ** 2
        assert abs(ratio / z_k - 1) < 1e-60


@pytest.fixture(scope="module")
def mats3():
    p = sample_params(3, 9, N=90)
    return p, normalized_matrices(p)


def test_S_diagonal_is_one(mats3):
    p, m = mats3
    for I in m["s"].labels:
        assert abs(m["s"][I, I] - 1) <= p.tolerance


@pytest.mark.parametrize("shift", [{"zeta": [2]}, {"u": [1]}, {"u": [3]}])
def test_S_is_periodic(mats3, shift):
    p, m = mats3
    moved = normalized_matrices(p.shifted(**shift))
    for I in m["s"].labels:
        for J in m["s"].labels:
            a, b = m["s"][I, J], moved["s"][I, J]
            if abs(a) > 1e-60:
                assert abs(b / a - 1) < 1e-50


def test_bold_scaling(mats3):
    p, m = mats3
    n = p.n
    cases = [({"zeta": [1]}, p.hbar ** (1 - n)), ({"u": [2]}, (p.q / p.hbar) ** (n - 1))]
    for shift, factor in cases:
        moved = normalized_matrices(p.shifted(**shift))
        for I in m["bold"].labels:
            for J in m["bold"].labels:
                a = m["bold"][I, J]
                if abs(a) > 1e-60:
                    assert abs(moved["bold"][I, J] / (a * factor) - 1) < 1e-50


SYMBOLS = [("x", 1, 1), ("x", 2, 2), ("u", 1), ("u", 3), ("z", 2), "hbar"]


@pytest.mark.parametrize("symbol", SYMBOLS, ids=str)
def test_quasi_periodicity_bundle_form(p3, symbol):
    for I in all_perms(3):
        r = quasi_periodicity(I, p3, symbol, seed=1)
        assert r["residual"] <= p3.tolerance


@pytest.mark.parametrize("symbol", [("t", 2, 1), ("w", 2), ("mu", 1)], ids=str)
def test_quasi_periodicity_g_form(p3, symbol):
    for I in all_perms(3):
        assert quasi_periodicity_g(I, p3, symbol)["residual"] <= p3.tolerance


def test_g_form_hbar_factor(p3):
    # under hbar -> q hbar the weight function follows G_I alone, which
    # differs from G_I/E by (-q^(-1/2)/hbar)^(sum k^2)
    I = Perm((2, 1, 3))
    r = quasi_periodicity_g(I, p3, "hbar")
    extra = (-1 / (p3.generators[0] * p3.hbar)) ** sum(k * k for k in range(1, 3))
    assert abs(r["observed"] / (r["predicted"] * extra) - 1) <= p3.tolerance
