from fractions import Fraction

import mpmath
import pytest

from flagmirror.combinatorics import DegreeMatrix, Perm, all_perms
from flagmirror.numerics import sample_params
from flagmirror.qseries import phi_trunc
from flagmirror.vertex import (
    alpha_factor,
    normalized_vertex,
    polarization_swap_residual,
    sigma_params,
    vertex_coefficient,
    vertex_limit,
    vertex_series,
)


def closed_form_n2(I, p, d):
    """Coefficient of z^d for n = 2, from mpmath's finite q-Pochhammer."""
    u1, u2 = p.u
    w = u2 / u1 if I == Perm((1, 2)) else u1 / u2
    q, h = p.q, p.hbar
    qp = lambda x: mpmath.qp(x, q, d)
    return qp(h) * qp(h * w) / (qp(q) * qp(q * w))


@pytest.mark.parametrize("seed", [0, 7])
@pytest.mark.parametrize("I", [Perm((1, 2)), Perm((2, 1))])
def test_n2_closed_form(seed, I):
    p = sample_params(2, seed, D=8)
    s = vertex_series(I, p)
    with mpmath.workdps(p.precision):
        for d in range(9):
            ref = closed_form_n2(I, p, d)
            assert abs(s[(d,)] / ref - 1) < 1e-90


def test_degree_zero_coefficient(p3):
    for I in all_perms(3):
        assert vertex_series(I, p3)[(0, 0)] == 1
        assert vertex_coefficient(I, DegreeMatrix(((0,), (0, 0))), p3) == 1


def test_degree_one_n2(p2):
    q, h = p2.q, p2.hbar
    r = p2.u[1] / p2.u[0]
    d = DegreeMatrix(((1,),))
    expected = (1 - h) / (1 - q) * (1 - h * r) / (1 - q * r)
    assert abs(vertex_coefficient(Perm((1, 2)), d, p2) / expected - 1) < 1e-95
    swapped = (1 - h) / (1 - q) * (1 - h / r) / (1 - q / r)
    assert abs(vertex_coefficient(Perm((2, 1)), d, p2) / swapped - 1) < 1e-95


def test_hbar_to_q_limit():
    # each Pochhammer ratio tends to 1 as hbar -> q, so at n = 2 every
    # coefficient tends to 1 (not 0) with error linear in hbar - q
    base = sample_params(2, 2, D=4)
    for k in (3, 6, 9):
        p = base.replace(sqrt_hbar=base.sqrt_q * (1 + Fraction(1, 10**k)))
        s = vertex_series(Perm((1, 2)), p)
        assert max(abs(v - 1) for v in s.coeffs.values()) < 10.0 ** (1 - k)


def test_hbar_to_q_sequence_converges_n3():
    # hbar = q itself is a removable pole of single terms at n = 3
    base = sample_params(3, 2, D=3)
    series = [vertex_series(Perm.identity(3),
                            base.replace(sqrt_hbar=base.sqrt_q * (1 + Fraction(1, 10**k))))
              for k in (3, 6, 9)]
    gaps = [max(abs(a[d] - b[d]) for d in a.degrees()) for a, b in zip(series, series[1:])]
    assert gaps[1] < 1e-2 * gaps[0]


def test_normalized_vertex_prefactor(p2):
    I = Perm((1, 2))
    nv = normalized_vertex(I, p2)
    r = p2.u[1] / p2.u[0]
    N = p2.theta_terms
    phi_part = phi_trunc(p2.q * r, N, p2) / phi_trunc(p2.hbar * r, N, p2)
    assert abs(nv.prefactor_value(p2) / (alpha_factor(I, p2) * phi_part) - 1) < 1e-95
    vs = nv.value_series(p2)
    for k, v in nv.series.items():
        assert abs(vs[k] / v - nv.prefactor_value(p2)) < 1e-90 * abs(v)


@pytest.mark.parametrize("I", all_perms(3))
def test_alpha_zeta_shift(I):
    p = sample_params(3, 4, N=90)
    n = 3
    for i in range(1, n + 1):
        ratio = alpha_factor(I, p.shifted(zeta=[i])) / alpha_factor(I, p)
        expected = p.hbar ** (n - i) / p.u[I[i] - 1]
        assert abs(ratio / expected - 1) < 1e-60


@pytest.mark.parametrize("I", all_perms(3))
def test_alpha_u_shift(I):
    # u_k -> q u_k multiplies alpha by (hbar/q)^(n - m) / zeta_m, m = I^{-1}_k;
    # the direct evaluation is the oracle here
    p = sample_params(3, 4, N=90)
    n = 3
    for k in range(1, n + 1):
        m = I.inverse[k]
        ratio = alpha_factor(I, p.shifted(u=[k])) / alpha_factor(I, p)
        expected = (p.hbar / p.q) ** (n - m) / p.zeta[m - 1]
        assert abs(ratio / expected - 1) < 1e-60


@pytest.mark.parametrize("n", [2, 3, 4])
def test_polarization_swap(n):
    p = sample_params(n, 5)
    for I in all_perms(n):
        assert polarization_swap_residual(I, p) <= p.tolerance


def test_limit_examples_n2(p2):
    z = p2.z
    N = 120
    hq = p2.hbar / p2.q
    for I, delta in ((Perm((1, 2)), 1), (Perm((2, 1)), 0)):
        s = vertex_limit(I, p2, 6)
        direct = (phi_trunc(p2.q * hq ** (1 + delta) * z[0], N, p2)
                  / phi_trunc(hq**delta * z[0], N, p2))
        # the expansion variable is (hbar/q)^delta z; dropped terms start at its 7th power
        assert abs(s.evaluate(z) / direct - 1) < 10 * abs(hq * z[0]) ** 7


def test_limit_product_n3(p3):
    z = p3.z
    hq = p3.hbar / p3.q
    N = 120
    for I in all_perms(3):
        s = vertex_limit(I, p3, 4)
        direct = p3.one
        for j in range(1, 4):
            for k in range(j + 1, 4):
                delta = 1 if I[j] < I[k] else 0
                y = p3.one
                for m in range(j, k):
                    y = y * z[m - 1]
                direct *= (phi_trunc(p3.q * hq ** (k - j + delta) * y, N, p3)
                           / phi_trunc(hq ** (k - j - 1 + delta) * y, N, p3))
        assert abs(s.evaluate(z) / direct - 1) < 100 * max(abs(hq * x) for x in z) ** 5


def test_sigma_params_scales_a(p3):
    s = sigma_params(p3, Fraction(1, 10))
    for a0, a1 in zip(p3.a, s.a):
        assert abs(a1 / a0 - Fraction(1, 100)) < 1e-95
