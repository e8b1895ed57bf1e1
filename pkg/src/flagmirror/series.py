"""Multivariate power series in z_1..z_m truncated at per-variable degree D."""

from __future__ import annotations

from typing import Callable, Iterable, Iterator


class TruncatedSeries:
    """Coefficients keyed by exponent tuples with every entry <= ``D``.

    Products drop terms beyond the bound. Because every exponent is
    nonnegative, a coefficient of a product is exact as soon as the factors
    are known up to the same bound.
    """

    __slots__ = ("nvars", "D", "coeffs", "zero")

    def __init__(self, nvars: int, D: int, coeffs: dict | None = None, zero=0):
        self.nvars = nvars
        self.D = D
        self.zero = zero
        self.coeffs = {}
        for k, v in (coeffs or {}).items():
            k = tuple(k)
            if len(k) != nvars:
                raise ValueError(f"exponent {k} has wrong length")
            if min(k, default=0) < 0:
                raise ValueError(f"negative exponent {k}")
            if max(k, default=0) <= D:
                self.coeffs[k] = self.coeffs.get(k, zero) + v

    # --- construction ---------------------------------------------------------

    @classmethod
    def constant(cls, nvars: int, D: int, c, zero=0) -> "TruncatedSeries":
        return cls(nvars, D, {(0,) * nvars: c}, zero)

    @classmethod
    def monomial(cls, nvars: int, D: int, exps, c, zero=0) -> "TruncatedSeries":
        return cls(nvars, D, {tuple(exps): c}, zero)

    @classmethod
    def geometric(cls, nvars: int, D: int, exps, ratio, one, zero=0,
                  coefficient: Callable[[int], object] | None = None
                  ) -> "TruncatedSeries":
        """sum_m coefficient(m) * (ratio * z^exps)^m, default coefficient 1."""
        exps = tuple(exps)
        if not any(exps):
            raise ValueError("geometric series needs a nonconstant monomial")
        out = {}
        m = 0
        power = one
        while max(m * e for e in exps) <= D:
            c = power if coefficient is None else coefficient(m) * power
            out[tuple(m * e for e in exps)] = c
            m += 1
            power = power * ratio
        return cls(nvars, D, out, zero)

    def like(self, coeffs: dict) -> "TruncatedSeries":
        return TruncatedSeries(self.nvars, self.D, coeffs, self.zero)

    # --- access ----------------------------------------------------------------

    def __getitem__(self, exps) -> object:
        return self.coeffs.get(tuple(exps), self.zero)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(sorted(self.coeffs))

    def items(self) -> Iterable:
        return sorted(self.coeffs.items())

    def __len__(self) -> int:
        return len(self.coeffs)

    def degrees(self) -> list[tuple[int, ...]]:
        return sorted(self.coeffs)

    # --- arithmetic ------------------------------------------------------------

    def _check(self, other: "TruncatedSeries"):
        if self.nvars != other.nvars:
            raise ValueError("series in different numbers of variables")

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self + TruncatedSeries.constant(self.nvars, self.D, other, self.zero)
        self._check(other)
        D = min(self.D, other.D)
        out = {k: v for k, v in self.coeffs.items() if max(k, default=0) <= D}
        for k, v in other.coeffs.items():
            if max(k, default=0) <= D:
                out[k] = out.get(k, self.zero) + v
        return TruncatedSeries(self.nvars, D, out, self.zero)

    __radd__ = __add__

    def __neg__(self):
        return self.like({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.like({k: v * other for k, v in self.coeffs.items()})
        self._check(other)
        D = min(self.D, other.D)
        out: dict = {}
        for ka, va in self.coeffs.items():
            if max(ka, default=0) > D:
                continue
            for kb, vb in other.coeffs.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                if max(k, default=0) > D:
                    continue
                out[k] = out.get(k, self.zero) + va * vb
        return TruncatedSeries(self.nvars, D, out, self.zero)

    __rmul__ = __mul__

    def shift(self, exps) -> "TruncatedSeries":
        """Multiply by the monomial z^exps (exponents >= 0)."""
        exps = tuple(exps)
        return TruncatedSeries(
            self.nvars,
            self.D,
            {tuple(a + b for a, b in zip(k, exps)): v for k, v in self.coeffs.items()},
            self.zero,
        )

    def twist(self, f: Callable[[tuple[int, ...]], object]) -> "TruncatedSeries":
        """Multiply the coefficient at each exponent by ``f(exponent)``."""
        return self.like({k: v * f(k) for k, v in self.coeffs.items()})

    def reciprocal(self, one) -> "TruncatedSeries":
        """1/self for a series with nonzero constant term."""
        c0 = self[(0,) * self.nvars]
        if c0 == 0:
            raise ZeroDivisionError("series has zero constant term")
        inv0 = one / c0
        out: dict = {}
        for k in sorted(
            (k for k in _all_exponents(self.nvars, self.D)), key=lambda k: (sum(k), k)
        ):
            if not any(k):
                out[k] = inv0
                continue
            acc = self.zero
            for ka, va in self.coeffs.items():
                if not any(ka):
                    continue
                rest = tuple(x - y for x, y in zip(k, ka))
                if min(rest) < 0:
                    continue
                acc = acc + va * out.get(rest, self.zero)
            out[k] = -acc * inv0
        return self.like(out)

    def evaluate(self, z: Iterable):
        """Sum the series at numeric z."""
        z = list(z)
        total = self.zero
        for k, v in self.coeffs.items():
            term = v
            for zi, e in zip(z, k):
                if e:
                    term = term * zi**e
            total = total + term
        return total

    def tail_estimate(self, z: Iterable, absval: Callable = abs) -> float:
        """Summed magnitude of the terms on the boundary of the degree box.

        These are the terms with some exponent equal to ``D``; the first
        dropped terms are of the same size times one more power of z.
        """
        z = list(z)
        est = 0.0
        for k, v in self.coeffs.items():
            if max(k, default=0) == self.D:
                term = absval(v)
                for zi, e in zip(z, k):
                    term = term * absval(zi) ** e
                est += float(term)
        return est

    def __repr__(self) -> str:
        return f"TruncatedSeries(nvars={self.nvars}, D={self.D}, terms={len(self)})"


def _all_exponents(nvars: int, D: int):
    if nvars == 0:
        yield ()
        return
    for first in range(D + 1):
        for rest in _all_exponents(nvars - 1, D):
            yield (first, *rest)
