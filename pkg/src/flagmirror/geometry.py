"""Torus weights at fixed points: polarization, tangent space, N+/N-, index.

The chamber is fixed by the cocharacter u -> (u^-1, ..., u^-n): a weight is
attracting when its exponents in a_i = u_i/u_{i+1} are all >= 0 and not all
zero. Weights never carry q.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable

from .combinatorics import Perm
from .qseries import SqrtMonomial


class WeightMultiset(Counter):
    """Formal sum of monomial characters with integer multiplicities."""

    def __init__(self, n: int, weights: Iterable[SqrtMonomial] | dict = ()):
        super().__init__()
        self.n = n
        if isinstance(weights, dict):
            for w, m in weights.items():
                self[w] += m
        else:
            for w in weights:
                self[w] += 1
        self._prune()

    def _prune(self):
        for w in [w for w, m in self.items() if m == 0]:
            del self[w]

    def __add__(self, other: "WeightMultiset") -> "WeightMultiset":
        out = WeightMultiset(self.n, dict(self))
        for w, m in other.items():
            out[w] += m
        out._prune()
        return out

    def __sub__(self, other: "WeightMultiset") -> "WeightMultiset":
        return self + other.scaled(-1)

    def scaled(self, k: int) -> "WeightMultiset":
        return WeightMultiset(self.n, {w: k * m for w, m in self.items()})

    def times(self, mono: SqrtMonomial) -> "WeightMultiset":
        """Multiply every weight by a character."""
        return WeightMultiset(self.n, {w * mono: m for w, m in self.items()})

    def dual(self) -> "WeightMultiset":
        return WeightMultiset(self.n, {w.inverse(): m for w, m in self.items()})

    def rank(self) -> int:
        return sum(self.values())

    def det(self) -> SqrtMonomial:
        out = SqrtMonomial.one(self.n)
        for w, m in self.items():
            out = out * w**m
        return out

    def sqrt_det(self) -> SqrtMonomial:
        """Product of the weight square roots; always a monomial here."""
        out = SqrtMonomial.one(self.n)
        for w, m in self.items():
            out = out * w.half() ** m
        return out

    def __repr__(self) -> str:
        body = " + ".join(
            (f"{m}*" if m != 1 else "") + str(w) for w, m in sorted(
                self.items(), key=lambda kv: kv[0].exps)
        )
        return f"WeightMultiset({body or '0'})"


def _ratio(n: int, top: int, bottom: int, hbar: int = 0) -> SqrtMonomial:
    """hbar^hbar * u_top / u_bottom."""
    return SqrtMonomial.of(n, hbar=hbar, u={top: 1, bottom: -1})


def half_tangent(I: Perm) -> WeightMultiset:
    """T^{1/2}_I X = sum_{j<k} u_{I_k}/u_{I_j}."""
    n = I.n
    return WeightMultiset(
        n, [_ratio(n, I[k], I[j]) for j in range(1, n + 1) for k in range(j + 1, n + 1)]
    )


def tangent(I: Perm) -> WeightMultiset:
    """T_I X = T^{1/2} + hbar^-1 (T^{1/2})^dual."""
    h = half_tangent(I)
    return h + h.dual().times(SqrtMonomial.of(I.n, hbar=-1))


def is_attracting(w: SqrtMonomial, chamber_sign: int = 1) -> bool:
    """Attracting for sign*sigma: a-exponents >= 0 (<= 0 for -sigma), not all 0."""
    ea = w.a_exponents()
    if ea is None:
        raise ValueError(f"{w} is not a character of the torus A")
    if chamber_sign < 0:
        ea = tuple(-e for e in ea)
    return all(e >= 0 for e in ea) and any(e > 0 for e in ea)


def n_plus(I: Perm) -> WeightMultiset:
    n = I.n
    out = []
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            if I[k] < I[j]:
                out.append(_ratio(n, I[k], I[j]))
            else:
                out.append(_ratio(n, I[j], I[k], hbar=-1))
    return WeightMultiset(n, out)


def n_minus(I: Perm) -> WeightMultiset:
    n = I.n
    out = []
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            if I[k] > I[j]:
                out.append(_ratio(n, I[k], I[j]))
            else:
                out.append(_ratio(n, I[j], I[k], hbar=-1))
    return WeightMultiset(n, out)


def attracting_part(V: WeightMultiset, chamber_sign: int = 1) -> WeightMultiset:
    return WeightMultiset(
        V.n, {w: m for w, m in V.items() if is_attracting(w, chamber_sign)}
    )


def index_bundle(I: Perm, chamber_sign: int = 1) -> WeightMultiset:
    """Attracting part of the polarization for the chamber sign*C."""
    return attracting_part(half_tangent(I), chamber_sign)


def line_restriction(i: int, I: Perm) -> SqrtMonomial:
    """L_i restricted to I: u_{I_1} ... u_{I_i}."""
    if not 1 <= i <= I.n - 1:
        raise ValueError("need 1 <= i <= n-1")
    return SqrtMonomial.of(I.n, u={I[j]: 1 for j in range(1, i + 1)})
