import pytest

from flagmirror.combinatorics import Perm, all_perms, non_inversions
from flagmirror.geometry import (
    WeightMultiset,
    half_tangent,
    index_bundle,
    is_attracting,
    line_restriction,
    n_minus,
    n_plus,
    tangent,
)
from flagmirror.qseries import SqrtMonomial


def w(n, top, bottom, hbar=0):
    return SqrtMonomial.of(n, hbar=hbar, u={top: 1, bottom: -1})


def test_half_tangent_n2():
    assert half_tangent(Perm((1, 2))) == WeightMultiset(2, [w(2, 2, 1)])


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_half_tangent_rank(n):
    for I in all_perms(n)[:10]:
        assert half_tangent(I).rank() == n * (n - 1) // 2


def test_n_plus_minus_n2():
    assert n_plus(Perm((1, 2))) == WeightMultiset(2, [w(2, 1, 2, hbar=-1)])
    assert n_minus(Perm((1, 2))) == WeightMultiset(2, [w(2, 2, 1)])
    assert n_plus(Perm((2, 1))) == WeightMultiset(2, [w(2, 1, 2)])
    assert n_minus(Perm((2, 1))) == WeightMultiset(2, [w(2, 2, 1, hbar=-1)])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_n_plus_attracting_and_splits_tangent(n):
    for I in all_perms(n):
        assert n_plus(I) + n_minus(I) == tangent(I)
        assert n_plus(I).rank() == n * (n - 1) // 2
        for x in n_plus(I):
            assert is_attracting(x)


def test_tangent_formula():
    I = Perm((2, 3, 1))
    h = half_tangent(I)
    expected = h + WeightMultiset(3, [x.inverse() * SqrtMonomial.of(3, hbar=-1) for x in h])
    assert tangent(I) == expected


def test_index_bundle():
    I = Perm((1, 2))
    assert index_bundle(I, -1) == WeightMultiset(2, [w(2, 2, 1)])
    for n in (2, 3):
        for I in all_perms(n):
            assert index_bundle(I, 1) + index_bundle(I, -1) == half_tangent(I)
            assert index_bundle(I, -1).rank() == non_inversions(I)


def test_line_restriction():
    I = Perm((3, 1, 2))
    J = Perm((1, 3, 2))
    assert line_restriction(1, I) == SqrtMonomial.of(3, u={3: 1})
    assert line_restriction(2, Perm.identity(3)) == SqrtMonomial.of(3, u={1: 1, 2: 1})
    ratio = line_restriction(2, I) / line_restriction(2, J)
    assert ratio.a_exponents() is not None
    with pytest.raises(ValueError):
        line_restriction(3, I)


def test_sqrt_det():
    V = WeightMultiset(3, [w(3, 1, 2), w(3, 2, 3)])
    assert V.sqrt_det() ** 2 == V.det()
