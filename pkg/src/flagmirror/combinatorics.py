"""Permutations as fixed points, the attraction order, and the degree cone.

Permutations are 1-based tuples in one-line notation, ``(2, 3, 1)`` meaning
I_1 = 2, I_2 = 3, I_3 = 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence


@dataclass(frozen=True, order=True)
class Perm:
    """A permutation I of {1..n} with cached inverse, sign and ordered indices."""

    I: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.I) != list(range(1, len(self.I) + 1)):
            raise ValueError(f"{self.I} is not a permutation of 1..{len(self.I)}")

    @classmethod
    def parse(cls, text: str) -> "Perm":
        """Parse one-line notation such as ``"2 3 1"`` or ``"2,3,1"``."""
        return cls(tuple(int(t) for t in text.replace(",", " ").split()))

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(tuple(range(1, n + 1)))

    def __str__(self) -> str:
        return " ".join(map(str, self.I))

    def __len__(self) -> int:
        return len(self.I)

    def __getitem__(self, j: int) -> int:
        """1-based access: ``I[j]`` is I_j."""
        return self.I[j - 1]

    @property
    def n(self) -> int:
        return len(self.I)

    @cached_property
    def inverse(self) -> "Perm":
        inv = [0] * self.n
        for j, v in enumerate(self.I, start=1):
            inv[v - 1] = j
        return Perm(tuple(inv))

    @cached_property
    def position(self) -> dict[int, int]:
        """Map value v to the index j with I_j = v."""
        return {v: j for j, v in enumerate(self.I, start=1)}

    @cached_property
    def sign(self) -> int:
        return -1 if inversions(self) % 2 else 1

    def ordered(self, k: int) -> tuple[int, ...]:
        """The ordered indices i^(k)_1 < ... < i^(k)_k of {I_1..I_k}."""
        return _ordered(self.I, k)

    def compose(self, other: "Perm") -> "Perm":
        """(self o other)(j) = self(other(j))."""
        return Perm(tuple(self.I[o - 1] for o in other.I))


@lru_cache(maxsize=None)
def _ordered(I: tuple[int, ...], k: int) -> tuple[int, ...]:
    return tuple(sorted(I[:k]))


def all_perms(n: int) -> list[Perm]:
    return [Perm(p) for p in itertools.permutations(range(1, n + 1))]


def preceq(I: Perm, J: Perm) -> bool:
    """I precedes-or-equals J: i^(k)_m <= j^(k)_m for every k < n and m <= k."""
    if I.n != J.n:
        raise ValueError("permutations of different sizes")
    for k in range(1, I.n):
        if any(a > b for a, b in zip(I.ordered(k), J.ordered(k))):
            return False
    return True


def precedes(I: Perm, J: Perm) -> bool:
    """Strict version of :func:`preceq` (I != J)."""
    return I != J and preceq(I, J)


def precedes_literal(I: Perm, J: Perm) -> bool:
    """Strict inequality i^(k)_m < j^(k)_m for every k, m, read literally."""
    return all(
        a < b
        for k in range(1, I.n)
        for a, b in zip(I.ordered(k), J.ordered(k))
    )


@lru_cache(maxsize=None)
def _total_order(n: int) -> tuple[Perm, ...]:
    remaining = sorted(all_perms(n))
    out: list[Perm] = []
    while remaining:
        # smallest lexicographic element with no remaining predecessor
        for idx, J in enumerate(remaining):
            if not any(precedes(I, J) for I in remaining if I != J):
                out.append(remaining.pop(idx))
                break
    return tuple(out)


def total_order(n: int) -> list[Perm]:
    """All n! permutations in a fixed linear extension of the partial order.

    Ties are broken lexicographically on the one-line notation.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    return list(_total_order(n))


def inversions(I: Perm) -> int:
    x = I.I
    return sum(1 for j in range(len(x)) for k in range(j + 1, len(x)) if x[j] > x[k])


def non_inversions(I: Perm) -> int:
    """N(I): the number of pairs j < k with I_j < I_k."""
    x = I.I
    return sum(1 for j in range(len(x)) for k in range(j + 1, len(x)) if x[j] < x[k])


def j_index(I: Perm, k: int, a: int) -> int:
    """The index j with I_j = i^(k)_a (1-based)."""
    if not 1 <= a <= k <= I.n - 1:
        raise ValueError(f"need 1 <= a <= k <= n-1, got k={k}, a={a}")
    return I.position[I.ordered(k)[a - 1]]


# --- degree cone ---------------------------------------------------------------


@dataclass(frozen=True)
class DegreeMatrix:
    """Quasimap degrees d_{i,j}, i = 1..n-1, j = 1..i, stored row by row."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for i, row in enumerate(self.rows, start=1):
            if len(row) != i:
                raise ValueError(f"row {i} must have {i} entries")
            if any(d < 0 for d in row):
                raise ValueError("degrees must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.rows) + 1

    def d(self, i: int, j: int) -> int:
        return self.rows[i - 1][j - 1]

    @property
    def z_degree(self) -> tuple[int, ...]:
        """deg_i = sum_j d_{i,j}: the exponent of z_i."""
        return tuple(sum(r) for r in self.rows)

    @property
    def total(self) -> int:
        return sum(self.z_degree)


def rows_dominate(upper: Sequence[int], lower: Sequence[int]) -> bool:
    """Is there an injection k -> j_k with upper[k] >= lower[j_k]?

    Pair the sorted row with the ``len(upper)`` smallest entries of ``lower``.
    """
    low = sorted(lower)[: len(upper)]
    return all(a >= b for a, b in zip(sorted(upper), low))


def rows_dominate_bruteforce(upper: Sequence[int], lower: Sequence[int]) -> bool:
    """Try every ordered choice of distinct targets; the oracle for the greedy test."""
    return any(
        all(upper[k] >= lower[j] for k, j in enumerate(choice))
        for choice in itertools.permutations(range(len(lower)), len(upper))
    )


def is_admissible(d: DegreeMatrix, bruteforce: bool = False) -> bool:
    test = rows_dominate_bruteforce if bruteforce else rows_dominate
    return all(
        test(d.rows[i], d.rows[i + 1]) for i in range(len(d.rows) - 1)
    )


def _compositions_upto(length: int, cap: int) -> Iterator[tuple[int, ...]]:
    """All nonnegative tuples of the given length with sum <= cap."""
    if length == 0:
        yield ()
        return
    for first in range(cap + 1):
        for rest in _compositions_upto(length - 1, cap - first):
            yield (first, *rest)


@lru_cache(maxsize=None)
def _enumerate_degrees(n: int, D: int) -> tuple[DegreeMatrix, ...]:
    out = []
    # build top-down so that domination prunes early
    def extend(prefix: list[tuple[int, ...]]):
        i = len(prefix) + 1
        if i == n:
            out.append(DegreeMatrix(tuple(prefix)))
            return
        for row in _compositions_upto(i, D):
            if prefix and not rows_dominate(prefix[-1], row):
                continue
            extend(prefix + [row])

    extend([])
    out.sort(key=lambda m: (m.total, m.rows))
    return tuple(out)


def enumerate_degrees(n: int, D: int) -> list[DegreeMatrix]:
    """Admissible degree matrices with every z-degree deg_i <= D.

    Sorted by total degree, then lexicographically.
    """
    if D < 0:
        raise ValueError("D must be nonnegative")
    return list(_enumerate_degrees(n, D))
