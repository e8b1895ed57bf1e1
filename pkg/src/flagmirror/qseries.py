"""Truncated q-products, Pochhammer symbols and the odd Jacobi theta function.

Arguments are either backend scalars or :class:`SqrtMonomial` characters. A
monomial argument lets a factor ``1 - x q^i`` be recognised as exactly zero
by comparing exponents, which keeps pole and zero detection exact in the
float backend too.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import DivisionByZeroTheta, PochhammerPole, ZeroArgument


@dataclass(frozen=True)
class SqrtMonomial:
    """Product of the square-root generators raised to integer powers.

    Exponent order is ``(sqrt_q, sqrt_hbar, sqrt_u1..sqrt_un,
    sqrt_zeta1..sqrt_zetan)``. A character in the full variables, such as
    ``u_2/u_1``, therefore has even exponents.
    """

    exps: tuple[int, ...]

    @property
    def n(self) -> int:
        return (len(self.exps) - 2) // 2

    @classmethod
    def one(cls, n: int) -> "SqrtMonomial":
        return cls((0,) * (2 + 2 * n))

    @classmethod
    def of(cls, n: int, q: int = 0, hbar: int = 0,
           u: Mapping[int, int] | None = None,
           zeta: Mapping[int, int] | None = None,
           half: bool = False) -> "SqrtMonomial":
        """Build from exponents on the full variables (1-based u, zeta).

        With ``half=True`` the exponents are taken on the square roots
        directly, so ``of(n, q=1, half=True)`` is ``q^(1/2)``.
        """
        k = 1 if half else 2
        e = [0] * (2 + 2 * n)
        e[0] = k * q
        e[1] = k * hbar
        for i, p in (u or {}).items():
            e[1 + i] += k * p
        for i, p in (zeta or {}).items():
            e[1 + n + i] += k * p
        return cls(tuple(e))

    def __mul__(self, other: "SqrtMonomial") -> "SqrtMonomial":
        return SqrtMonomial(tuple(a + b for a, b in zip(self.exps, other.exps)))

    def __truediv__(self, other: "SqrtMonomial") -> "SqrtMonomial":
        return SqrtMonomial(tuple(a - b for a, b in zip(self.exps, other.exps)))

    def __pow__(self, k: int) -> "SqrtMonomial":
        return SqrtMonomial(tuple(k * a for a in self.exps))

    def inverse(self) -> "SqrtMonomial":
        return self**-1

    def is_one(self) -> bool:
        return not any(self.exps)

    def half(self) -> "SqrtMonomial":
        """Square root; defined only when every exponent is even."""
        if any(e % 2 for e in self.exps):
            raise ValueError(f"odd exponent in {self.exps}; no monomial square root")
        return SqrtMonomial(tuple(e // 2 for e in self.exps))

    def times_q(self, k: int = 1) -> "SqrtMonomial":
        e = list(self.exps)
        e[0] += 2 * k
        return SqrtMonomial(tuple(e))

    def evaluate(self, params):
        return params.value(self)

    def u_exponents(self) -> tuple[int, ...]:
        """Exponents on the full variables u_1..u_n."""
        return tuple(e // 2 for e in self.exps[2 : 2 + self.n])

    def a_exponents(self) -> tuple[int, ...] | None:
        """Write the u-part as a monomial in a_i = u_i/u_{i+1}.

        Returns None when the total u-degree is nonzero (not an A-character).
        """
        eu = self.u_exponents()
        if sum(eu) != 0:
            return None
        out, acc = [], 0
        for e in eu[:-1]:
            acc += e
            out.append(acc)
        return tuple(out)

    def __str__(self) -> str:
        n = self.n
        names = ["q", "hbar"] + [f"u{i}" for i in range(1, n + 1)] + [
            f"zeta{i}" for i in range(1, n + 1)
        ]
        parts = []
        for name, e in zip(names, self.exps):
            if e:
                p = f"{e // 2}" if e % 2 == 0 else f"{e}/2"
                parts.append(name if p == "1" else f"{name}^{p}")
        return "*".join(parts) or "1"


def _is_monomial(x) -> bool:
    return isinstance(x, SqrtMonomial)


def _one_minus(x, params, shift: int = 0):
    """1 - x q^shift, exactly zero when the monomial is trivial."""
    if _is_monomial(x):
        m = x.times_q(shift)
        if m.is_one():
            return params.zero
        return params.one - params.value(m)
    return params.one - x * params.q**shift


def phi_trunc(x, N: int, params):
    """prod_{i=0}^{N-1} (1 - x q^i)."""
    if N < 1:
        raise ValueError("N must be positive")
    out = params.one
    if _is_monomial(x):
        for i in range(N):
            out = out * _one_minus(x, params, i)
        return out
    if x == 0:
        return out
    qi = params.one
    q = params.q
    for _ in range(N):
        out = out * (1 - x * qi)
        qi = qi * q
    return out


def pochhammer(x, d: int, params):
    """(x)_d = phi(x)/phi(x q^d) as the finite product, for either sign of d."""
    out = params.one
    if d >= 0:
        for i in range(d):
            out = out * _one_minus(x, params, i)
        return out
    for i in range(1, -d + 1):
        f = _one_minus(x, params, -i)
        if f == 0:
            raise PochhammerPole(f"(x)_{d} has a pole: 1 - x q^-{i} = 0")
        out = out / f
    return out


def pochhammer_ratio(x, y, d: int, params):
    """(x)_d / (y)_d as one finite product.

    For negative ``d`` this is ``prod (1 - y q^-i)/(1 - x q^-i)``, so a
    vanishing factor of ``y`` gives an exact zero rather than a pole.
    """
    out = params.one
    if d >= 0:
        for i in range(d):
            den = _one_minus(y, params, i)
            if den == 0:
                raise PochhammerPole(f"denominator (y)_{d} vanishes at i={i}")
            out = out * _one_minus(x, params, i) / den
        return out
    for i in range(1, -d + 1):
        den = _one_minus(x, params, -i)
        if den == 0:
            raise PochhammerPole(f"numerator (x)_{d} has a pole at i={i}")
        out = out * _one_minus(y, params, -i) / den
    return out


def theta(sx, params, N: int | None = None):
    """Odd theta function from the square root ``sx`` of its argument.

    theta(x) = (x^(1/2) - x^(-1/2)) phi(q x) phi(q/x), each phi truncated at
    ``N`` factors (default ``params.theta_terms``).
    """
    N = params.theta_terms if N is None else N
    if _is_monomial(sx):
        cache = params._cache.setdefault(("theta", N), {})
        hit = cache.get(sx.exps)
        if hit is not None:
            return hit
        if sx.is_one():
            val = params.zero
        else:
            x = sx**2
            s = params.value(sx)
            val = (s - 1 / s) * phi_trunc(x.times_q(1), N, params) * phi_trunc(
                x.inverse().times_q(1), N, params
            )
        cache[sx.exps] = val
        return val
    if sx == 0:
        raise ZeroArgument("theta needs a nonzero square root")
    x = sx * sx
    q = params.q
    return (sx - 1 / sx) * phi_trunc(q * x, N, params) * phi_trunc(q / x, N, params)


def theta_shift_factor(sx: SqrtMonomial, m: int, params):
    """Exact ratio theta(q^m x)/theta(x) = (-1)^m q^(-m^2/2) x^(-m).

    This is the quasi-periodicity of the untruncated theta function.
    """
    mono = SqrtMonomial.of(sx.n, q=-m * m, half=True) * (sx**2) ** (-m)
    val = params.value(mono)
    return -val if m % 2 else val


def phi_shift_factor(x, m: int, params):
    """Exact ratio phi(q^m x)/phi(x) = 1/(x)_m."""
    return 1 / pochhammer(x, m, params)


def _weights(V) -> Iterable[tuple[SqrtMonomial, int]]:
    return V.items() if hasattr(V, "items") else V


def Theta_multiset(V, params, N: int | None = None):
    """prod theta(w)^mult over a weight multiset."""
    num = params.one
    den = params.one
    for w, mult in _weights(V):
        t = theta(w.half(), params, N)
        if mult > 0:
            num = num * t**mult
        elif mult < 0:
            if t == 0:
                raise DivisionByZeroTheta(f"theta({w}) = 0 in a denominator")
            den = den * t ** (-mult)
    return num / den


def Phi_multiset(V, params, N: int | None = None):
    """prod phi(w)^mult over a weight multiset, phi truncated at N factors."""
    N = params.theta_terms if N is None else N
    num = params.one
    den = params.one
    for w, mult in _weights(V):
        f = phi_trunc(w, N, params)
        if mult > 0:
            num = num * f**mult
        elif mult < 0:
            if f == 0:
                raise DivisionByZeroTheta(f"phi({w}) = 0 in a denominator")
            den = den * f ** (-mult)
    return num / den


def phi_diff(V, params, N: int | None = None, hbar: SqrtMonomial | None = None):
    """Phi((q - hbar) V) = prod phi(q w)/phi(hbar w).

    ``hbar`` may name a different equivariant parameter (the dual hbar).
    """
    N = params.theta_terms if N is None else N
    out = params.one
    for w, mult in _weights(V):
        h = SqrtMonomial.of(w.n, hbar=1) if hbar is None else hbar
        num = phi_trunc(w.times_q(1), N, params)
        den = phi_trunc(w * h, N, params)
        if den == 0 or num == 0:
            raise DivisionByZeroTheta(f"phi factor of ({w}) vanishes")
        out = out * (num / den) ** mult
    return out


def terms_for_spread(params, spread: float) -> int:
    """Factors per phi so that an argument of size ``spread`` is truncated
    no worse than an O(1) argument at ``params.theta_terms`` factors."""
    q = float(params.sqrt_q) ** 2
    extra = max(0, math.ceil(math.log(spread) / -math.log(q)))
    return params.theta_terms + extra


def weight_spread(V, params) -> float:
    """Largest max(|w|, 1/|w|) over the weights of a multiset."""
    out = 1.0
    for w, _m in _weights(V):
        a = abs(float(params.value(w)))
        if a:
            out = max(out, a, 1 / a)
    return out
