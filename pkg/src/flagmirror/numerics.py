"""Scalar backends and the numeric parameter record.

Every multiplicative parameter enters through an explicit square root, so
each half-integer power that shows up in a theta function or a square-root
determinant is an integer monomial in the generators

    sqrt_q, sqrt_hbar, sqrt_u[1..n], sqrt_zeta[1..n].

Generators are stored as exact rationals. A backend turns them into scalars:
``exact`` keeps ``fractions.Fraction`` and ``float`` uses an ``mpmath``
context with a fixed number of decimal digits.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Sequence

import mpmath
import sympy
from mpmath.ctx_mp import MPContext
from sympy.polys.matrices import DomainMatrix

from .errors import (
    DegenerateModulus,
    GenericityExhausted,
    NonGenericParameters,
    ParameterError,
)

try:  # pragma: no cover - depends on interpreter version
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib
import tomli_w

BACKENDS = ("exact", "float")


class ExactBackend:
    name = "exact"

    def scalar(self, x) -> Fraction:
        return Fraction(x)

    def is_zero(self, x) -> bool:
        return x == 0

    def to_float(self, x) -> float:
        return float(x)


class FloatBackend:
    """Arbitrary-precision reals through a private mpmath context."""

    name = "float"

    def __init__(self, precision: int):
        self.precision = precision
        self.ctx = MPContext()
        self.ctx.dps = precision

    def scalar(self, x):
        if isinstance(x, Fraction):
            return self.ctx.mpf(x.numerator) / x.denominator
        return self.ctx.convert(x)

    def is_zero(self, x) -> bool:
        return x == 0

    def to_float(self, x) -> float:
        return float(abs(x)) if isinstance(x, mpmath.mpc) else float(x)


def make_backend(name: str, precision: int):
    if name == "exact":
        return ExactBackend()
    if name == "float":
        return FloatBackend(precision)
    raise ParameterError(f"unknown backend {name!r}; expected one of {BACKENDS}")


def as_fraction(x) -> Fraction:
    """Parse ``"num/den"``, a decimal string, an int or a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(str(x).strip())


def default_precision(sqrt_q: Fraction, theta_terms: int) -> int:
    """Digits needed so that round-off stays well below 100*|q|^(N-1)."""
    q = abs(float(sqrt_q)) ** 2
    digits = (theta_terms - 1) * -math.log10(q) if 0 < q < 1 else 0
    return max(50, int(math.ceil(digits)) + 25)


def generator_labels(n: int) -> list[str]:
    return (
        ["sqrt_q", "sqrt_hbar"]
        + [f"sqrt_u{i}" for i in range(1, n + 1)]
        + [f"sqrt_zeta{i}" for i in range(1, n + 1)]
    )


@dataclass(frozen=True)
class ParamSet:
    """Numeric specialization of (n, q, hbar, u, zeta) plus truncation orders.

    Use :func:`build_params` or :func:`sample_params` rather than calling the
    constructor directly; those validate the record.
    """

    n: int
    sqrt_q: Fraction
    sqrt_hbar: Fraction
    sqrt_u: tuple[Fraction, ...]
    sqrt_zeta: tuple[Fraction, ...]
    theta_terms: int = 40
    max_degree: int = 6
    precision: int = 0
    backend_name: str = "float"
    _cache: dict = field(
        default_factory=dict, init=False, repr=False, compare=False, hash=False
    )

    # --- backend and generators -------------------------------------------

    @cached_property
    def backend(self):
        return make_backend(self.backend_name, self.precision)

    @cached_property
    def generators(self) -> tuple:
        """Backend scalars in SqrtMonomial exponent order."""
        s = self.backend.scalar
        return tuple(
            s(g)
            for g in (self.sqrt_q, self.sqrt_hbar, *self.sqrt_u, *self.sqrt_zeta)
        )

    @property
    def ngens(self) -> int:
        return 2 + 2 * self.n

    def scalar(self, x):
        return self.backend.scalar(as_fraction(x) if isinstance(x, str) else x)

    @property
    def one(self):
        return self.backend.scalar(1)

    @property
    def zero(self):
        return self.backend.scalar(0)

    # --- derived quantities -------------------------------------------------

    @cached_property
    def q(self):
        return self.generators[0] ** 2

    @cached_property
    def hbar(self):
        return self.generators[1] ** 2

    @cached_property
    def u(self) -> tuple:
        return tuple(g**2 for g in self.generators[2 : 2 + self.n])

    @cached_property
    def zeta(self) -> tuple:
        return tuple(g**2 for g in self.generators[2 + self.n :])

    @cached_property
    def a(self) -> tuple:
        """Coordinates a_i = u_i / u_{i+1} on the symplectic torus."""
        u = self.u
        return tuple(u[i] / u[i + 1] for i in range(self.n - 1))

    @cached_property
    def z(self) -> tuple:
        """Kahler parameters z_i = (q/hbar) zeta_i / zeta_{i+1}."""
        zt = self.zeta
        return tuple(
            self.q / self.hbar * zt[i] / zt[i + 1] for i in range(self.n - 1)
        )

    @property
    def tolerance(self) -> float:
        """Default relative tolerance 100*|q|^(N-1)."""
        return 100.0 * abs(float(self.sqrt_q)) ** (2 * (self.theta_terms - 1))

    # --- monomial evaluation --------------------------------------------------

    def value(self, mono):
        """Evaluate a SqrtMonomial (anything with an ``exps`` tuple)."""
        exps = mono.exps
        cache = self._cache.setdefault("mono", {})
        hit = cache.get(exps)
        if hit is not None:
            return hit
        num = self.one
        den = self.one
        for g, e in zip(self.generators, exps):
            if e > 0:
                num = num * g**e
            elif e < 0:
                den = den * g ** (-e)
        val = num / den
        cache[exps] = val
        return val

    def replace(self, **changes) -> "ParamSet":
        """Return a validated copy with some fields replaced."""
        data = dict(
            n=self.n,
            sqrt_q=self.sqrt_q,
            sqrt_hbar=self.sqrt_hbar,
            sqrt_u=self.sqrt_u,
            sqrt_zeta=self.sqrt_zeta,
            N=self.theta_terms,
            D=self.max_degree,
            precision=self.precision,
            backend=self.backend_name,
        )
        data.update(changes)
        check = data.pop("check_genericity", False)
        return build_params(**data, check_genericity=check)

    def shifted(self, *, u: Sequence[int] = (), zeta: Sequence[int] = (),
                q_power: int = 1) -> "ParamSet":
        """Multiply the listed u_i and zeta_i (1-based) by q**q_power.

        The square-root generators are multiplied by sqrt_q**q_power, so the
        result is still an exact rational record.
        """
        f = self.sqrt_q**q_power
        su = list(self.sqrt_u)
        sz = list(self.sqrt_zeta)
        for i in u:
            su[i - 1] *= f
        for i in zeta:
            sz[i - 1] *= f
        return self.replace(sqrt_u=tuple(su), sqrt_zeta=tuple(sz))

    # --- serialization --------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        fmt = lambda x: f"{x.numerator}/{x.denominator}"
        return {
            "n": self.n,
            "sqrt_q": fmt(self.sqrt_q),
            "sqrt_hbar": fmt(self.sqrt_hbar),
            "sqrt_u": [fmt(x) for x in self.sqrt_u],
            "sqrt_zeta": [fmt(x) for x in self.sqrt_zeta],
            "theta_terms": self.theta_terms,
            "max_degree": self.max_degree,
            "precision": self.precision,
            "backend": self.backend_name,
        }

    def to_toml(self) -> str:
        return tomli_w.dumps({"params": self.to_dict()})

    @classmethod
    def from_dict(cls, d: dict[str, Any], check_genericity: bool = True) -> "ParamSet":
        return build_params(
            n=int(d["n"]),
            sqrt_q=d["sqrt_q"],
            sqrt_hbar=d["sqrt_hbar"],
            sqrt_u=d["sqrt_u"],
            sqrt_zeta=d["sqrt_zeta"],
            N=int(d.get("theta_terms", 40)),
            D=int(d.get("max_degree", 6)),
            precision=int(d.get("precision", 0)),
            backend=d.get("backend", "float"),
            check_genericity=check_genericity,
        )

    @classmethod
    def from_toml(cls, text: str, check_genericity: bool = True) -> "ParamSet":
        data = tomllib.loads(text)
        return cls.from_dict(data.get("params", data), check_genericity)


def genericity_window(n: int, D: int) -> int:
    return 2 * D + 2 * n


def _factor_vector(x: Fraction, primes: dict[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for p, e in sympy.factorint(abs(x.numerator)).items():
        out[p] = out.get(p, 0) + e
    for p, e in sympy.factorint(x.denominator).items():
        out[p] = out.get(p, 0) - e
    for p in out:
        primes.setdefault(p, len(primes))
    return out


def find_unit_monomial(gens: Sequence[Fraction], window: int) -> tuple[int, ...] | None:
    """Return a short exponent vector e with prod gens**e == 1, or None.

    Rational generators are multiplicatively dependent exactly when their
    prime-exponent vectors are linearly dependent, so the relations form the
    integer kernel of that matrix. The kernel basis is LLL-reduced and every
    basis vector (and sum/difference of pairs) is tested against the window.
    """
    primes: dict[int, int] = {}
    vecs = [_factor_vector(g, primes) for g in gens]
    m = len(gens)
    rows = [[0] * m for _ in range(len(primes))]
    for j, v in enumerate(vecs):
        for p, e in v.items():
            rows[primes[p]][j] = e
    mat = sympy.Matrix(rows) if rows else sympy.zeros(1, m)
    basis = []
    for v in mat.nullspace():
        den = sympy.ilcm(*[sympy.fraction(x)[1] for x in v])
        iv = [int(x * den) for x in v]
        g = math.gcd(*iv)
        basis.append([x // g for x in iv])
    if not basis:
        return None
    if len(basis) > 1:
        dm = DomainMatrix([[sympy.ZZ(x) for x in b] for b in basis],
                          (len(basis), m), sympy.ZZ)
        basis = [[int(x) for x in row] for row in dm.lll().to_Matrix().tolist()]
    cands = list(basis)
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            cands.append([x + y for x, y in zip(basis[i], basis[j])])
            cands.append([x - y for x, y in zip(basis[i], basis[j])])
    cands.sort(key=lambda v: max(abs(x) for x in v))
    for v in cands:
        if not any(v):
            continue
        negative = sum(e for g, e in zip(gens, v) if g < 0) % 2 == 1
        if negative:
            v = [2 * x for x in v]
        if max(abs(x) for x in v) <= window:
            return tuple(v)
    return None


def build_params(
    n: int,
    sqrt_q,
    sqrt_hbar,
    sqrt_u: Sequence,
    sqrt_zeta: Sequence,
    N: int = 40,
    D: int = 6,
    precision: int = 0,
    backend: str = "float",
    check_genericity: bool = True,
) -> ParamSet:
    """Validate the generators and return an immutable :class:`ParamSet`.

    ``precision=0`` picks enough digits for the default tolerance at ``N``.
    """
    if n < 2:
        raise ParameterError("n must be at least 2")
    if N < 1 or D < 0:
        raise ParameterError("need theta_terms >= 1 and max_degree >= 0")
    sq = as_fraction(sqrt_q)
    sh = as_fraction(sqrt_hbar)
    su = tuple(as_fraction(x) for x in sqrt_u)
    sz = tuple(as_fraction(x) for x in sqrt_zeta)
    if len(su) != n or len(sz) != n:
        raise ParameterError(f"expected {n} values for sqrt_u and sqrt_zeta")
    gens = (sq, sh, *su, *sz)
    if any(g == 0 for g in gens):
        raise ParameterError("square-root generators must be nonzero")
    if sq * sq >= 1:
        raise DegenerateModulus(f"|q| = {sq * sq} is not below 1")
    if backend not in BACKENDS:
        raise ParameterError(f"unknown backend {backend!r}")
    if precision <= 0:
        precision = default_precision(sq, N)
    if check_genericity:
        bad = find_unit_monomial(gens, genericity_window(n, D))
        if bad is not None:
            raise NonGenericParameters(bad, generator_labels(n))
    return ParamSet(n, sq, sh, su, sz, N, D, precision, backend)


def _rational_log_uniform(rng: random.Random, lo: float, hi: float,
                          digits: int = 4) -> Fraction:
    x = math.exp(rng.uniform(math.log(lo), math.log(hi)))
    scale = 10 ** (digits - int(math.floor(math.log10(x))) - 1)
    return Fraction(max(1, round(x * scale)), scale)


def _well_separated(p: ParamSet, margin: float = 0.05) -> bool:
    """Reject draws where products of a_i or zeta ratios sit close to q-powers."""
    q = float(p.sqrt_q) ** 2
    h = float(p.sqrt_hbar) ** 2
    a = [float(x) for x in p.a]
    w = [h / q * float(x) for x in p.z]
    prods = []
    for ratios in (a, w):
        for i in range(len(ratios)):
            prod = 1.0
            for j in range(i, len(ratios)):
                prod *= ratios[j]
                prods.append(prod)
    for x in prods:
        for k in range(-4, 5):
            for hp in (-1, 0, 1):
                if abs(1 - x * q**k * h**hp) < margin:
                    return False
    return True


def sample_params(
    n: int,
    seed: int,
    N: int = 40,
    D: int = 6,
    precision: int = 0,
    backend: str = "float",
    max_tries: int = 200,
) -> ParamSet:
    """Deterministic pseudo-random generic parameters.

    |q| is near 1e-2 and hbar lies in [0.2, 0.5]. Every a_i is drawn
    log-uniformly from [1e-3, 1e-1] and every z_i from [1e-3, 1e-2]; the
    narrower z range keeps the mirror-side series, whose variables are
    a_i hbar/q, inside their disc of convergence. All generators are
    positive rationals.
    """
    rng = random.Random(seed)
    for _ in range(max_tries):
        sq = _rational_log_uniform(rng, 0.09, 0.11)
        sh = _rational_log_uniform(rng, 0.2**0.5, 0.5**0.5)
        su = [_rational_log_uniform(rng, 0.5, 2.0)]
        for _i in range(n - 1):
            su.append(su[-1] * _rational_log_uniform(rng, 10**-1.5, 10**-0.5))
        su.reverse()
        sz = [_rational_log_uniform(rng, 0.5, 2.0)]
        for _i in range(n - 1):
            sqrt_z = _rational_log_uniform(rng, 10**-1.5, 10**-1)
            # zeta_i / zeta_{i+1} = (hbar/q) z_i
            sz.append(sz[-1] * sh / sq * sqrt_z)
        sz.reverse()
        try:
            p = build_params(n, sq, sh, su, sz, N, D, precision, backend)
        except NonGenericParameters:
            continue
        if _well_separated(p):
            return p
    raise GenericityExhausted(f"no generic draw for n={n}, seed={seed}")
