"""Vertex functions of T*Fl_n at fixed points and their normalization.

The vertex function V_I is a power series in z_1..z_{n-1} whose coefficients
are products of q-Pochhammer ratios in the equivariant parameters. The
normalized function multiplies it by a transcendental prefactor

    alpha_I(u, zeta, hbar) * Phi((q - hbar) T^{1/2}_I X)

kept as a list of theta/phi atoms so q-shifts of u or zeta can be applied
analytically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .combinatorics import DegreeMatrix, Perm, enumerate_degrees
from .errors import DivisionByZeroTheta
from .geometry import WeightMultiset, half_tangent, n_plus
from .numerics import ParamSet
from .qseries import (
    SqrtMonomial,
    Theta_multiset,
    phi_diff,
    phi_shift_factor,
    phi_trunc,
    pochhammer_ratio,
    terms_for_spread,
    theta,
    theta_shift_factor,
    weight_spread,
)
from .series import TruncatedSeries


def _u_ratio(n: int, top: int, bottom: int) -> SqrtMonomial:
    return SqrtMonomial.of(n, u={top: 1, bottom: -1}) if top != bottom else SqrtMonomial.one(n)


def vertex_coefficient(I: Perm, d: DegreeMatrix, params: ParamSet):
    """Coefficient of z^d in V_I (the triple Pochhammer product)."""
    n = I.n
    Q = SqrtMonomial.of(n, q=1)
    H = SqrtMonomial.of(n, hbar=1)
    c = params.one
    for i in range(1, n - 1):
        for j in range(1, i + 1):
            for k in range(1, i + 2):
                w = _u_ratio(n, I[k], I[j])
                e = d.d(i, j) - d.d(i + 1, k)
                if e:
                    c = c * pochhammer_ratio(H * w, Q * w, e, params)
                    if c == 0:
                        return c
    for i in range(1, n):
        for j in range(1, i + 1):
            for k in range(1, i + 1):
                e = d.d(i, j) - d.d(i, k)
                if e:
                    w = _u_ratio(n, I[k], I[j])
                    c = c * pochhammer_ratio(Q * w, H * w, e, params)
    for i in range(1, n + 1):
        for j in range(1, n):
            e = d.d(n - 1, j)
            if e:
                w = _u_ratio(n, i, I[j])
                c = c * pochhammer_ratio(H * w, Q * w, e, params)
    return c


def vertex_series(I: Perm, params: ParamSet, D: int | None = None) -> TruncatedSeries:
    """V_I as a series in z, all z-degrees <= D (default ``params.max_degree``)."""
    D = params.max_degree if D is None else D
    key = ("vertex", I.I, D)
    hit = params._cache.get(key)
    if hit is not None:
        return hit
    coeffs: dict = {}
    for d in enumerate_degrees(I.n, D):
        c = vertex_coefficient(I, d, params)
        k = d.z_degree
        coeffs[k] = coeffs.get(k, params.zero) + c
    s = TruncatedSeries(I.n - 1, D, coeffs, params.zero)
    params._cache[key] = s
    return s


# --- transcendental prefactors ---------------------------------------------------


@dataclass(frozen=True)
class Atom:
    """theta(sqrt_arg) or phi(arg) raised to ``power``.

    For a theta atom ``arg`` is the square root of the theta argument; for a
    phi atom it is the argument itself.
    """

    kind: str
    arg: SqrtMonomial
    power: int = 1

    def value(self, params: ParamSet):
        if self.kind == "theta":
            v = theta(self.arg, params)
        else:
            v = phi_trunc(self.arg, params.theta_terms, params)
        if self.power < 0 and v == 0:
            raise DivisionByZeroTheta(f"{self.kind}({self.arg}) = 0 in a denominator")
        return v**self.power

    def q_power(self, u_shift: Mapping[int, int], zeta_shift: Mapping[int, int]) -> int:
        """k such that the full argument x becomes q^k x under the shifts."""
        n = self.arg.n
        e = self.arg.exps
        scale = 1 if self.kind == "theta" else 2  # full exponents of x
        total = 0
        for i, m in u_shift.items():
            total += m * e[1 + i]
        for i, m in zeta_shift.items():
            total += m * e[1 + n + i]
        if total % scale:
            raise ValueError("shift does not act by an integer power of q")
        return total // scale

    def shift_factor(self, u_shift, zeta_shift, params: ParamSet):
        """Exact ratio atom(shifted)/atom, from quasi-periodicity."""
        k = self.q_power(u_shift, zeta_shift)
        if k == 0:
            return params.one
        if self.kind == "theta":
            f = theta_shift_factor(self.arg, k, params)
        else:
            f = phi_shift_factor(self.arg, k, params)
        return f**self.power


@dataclass(frozen=True)
class Prefactor:
    atoms: tuple[Atom, ...]

    def __mul__(self, other: "Prefactor") -> "Prefactor":
        return Prefactor(self.atoms + other.atoms)

    def inverse(self) -> "Prefactor":
        return Prefactor(tuple(Atom(a.kind, a.arg, -a.power) for a in self.atoms))

    def value(self, params: ParamSet):
        out = params.one
        for a in self.atoms:
            out = out * a.value(params)
        return out

    def shift_factor(self, params: ParamSet, u: Mapping[int, int] | None = None,
                     zeta: Mapping[int, int] | None = None):
        """Exact multiplier picked up when u_i -> q^m u_i, zeta_i -> q^m zeta_i."""
        u = u or {}
        zeta = zeta or {}
        out = params.one
        for a in self.atoms:
            out = out * a.shift_factor(u, zeta, params)
        return out


def alpha_atoms(I: Perm, n: int | None = None) -> Prefactor:
    """alpha_I(u, zeta, hbar) = prod_i theta(zeta_i hbar^(i-n)) theta(u_{I_i} (q/hbar)^(n-i)) / theta(zeta_i/u_{I_i})."""
    n = I.n
    atoms = []
    for i in range(1, n + 1):
        a1 = SqrtMonomial.of(n, hbar=i - n, zeta={i: 1}, half=False).half()
        a2 = SqrtMonomial.of(n, q=n - i, hbar=i - n, u={I[i]: 1}).half()
        a3 = SqrtMonomial.of(n, zeta={i: 1}, u={I[i]: -1}).half()
        atoms += [Atom("theta", a1), Atom("theta", a2), Atom("theta", a3, -1)]
    return Prefactor(tuple(atoms))


def alpha_factor(I: Perm, params: ParamSet):
    return alpha_atoms(I).value(params)


def phi_diff_atoms(V: WeightMultiset) -> Prefactor:
    """Phi((q - hbar) V) as phi(q w)/phi(hbar w) atoms."""
    atoms = []
    for w, m in V.items():
        atoms.append(Atom("phi", w.times_q(1), m))
        atoms.append(Atom("phi", w * SqrtMonomial.of(V.n, hbar=1), -m))
    return Prefactor(tuple(atoms))


@dataclass
class NormalizedVertex:
    """prefactor * series, with the prefactor kept as atoms."""

    I: Perm
    prefactor: Prefactor
    series: TruncatedSeries

    def prefactor_value(self, params: ParamSet):
        return self.prefactor.value(params)

    def value_series(self, params: ParamSet) -> TruncatedSeries:
        return self.series * self.prefactor.value(params)


def normalized_prefactor(I: Perm) -> Prefactor:
    return alpha_atoms(I) * phi_diff_atoms(half_tangent(I))


def normalized_vertex(I: Perm, params: ParamSet, D: int | None = None) -> NormalizedVertex:
    """V~_I = alpha_I * Phi((q - hbar) T^{1/2}_I) * V_I."""
    return NormalizedVertex(I, normalized_prefactor(I), vertex_series(I, params, D))


def polarization_swap_residual(I: Perm, params: ParamSet) -> float:
    """Relative gap in Theta(N^+) Phi((q-hbar) T^{1/2}) / Theta(T^{1/2})
    = sqrt(det N^+ / det T^{1/2}) Phi((q-hbar) N^+) at fixed point I."""
    T, Np = half_tangent(I), n_plus(I)
    N = terms_for_spread(params, max(weight_spread(T, params), weight_spread(Np, params)))
    if N > params.theta_terms:
        params = params.replace(N=N)
    lhs = Theta_multiset(Np, params) * phi_diff(T, params) / Theta_multiset(T, params)
    root = params.value(Np.sqrt_det()) / params.value(T.sqrt_det())
    rhs = root * phi_diff(Np, params)
    return float(abs(lhs / rhs - 1))


# --- a -> 0 limit ---------------------------------------------------------------------


def vertex_limit(I: Perm, params: ParamSet, D: int | None = None) -> TruncatedSeries:
    """Closed form of V_I(0_C, z) as a z-series.

    prod_{j<k} phi(q (h/q)^(k-j+delta) z_j..z_{k-1}) / phi((h/q)^(k-j-1+delta) z_j..z_{k-1})
    with delta = [I_j < I_k]. Each ratio phi(a y)/phi(b y) with a/b = hbar
    expands by the q-binomial theorem as sum_m (hbar)_m/(q)_m (b y)^m.
    """
    D = params.max_degree if D is None else D
    n = I.n
    H = SqrtMonomial.of(n, hbar=1)
    Q = SqrtMonomial.of(n, q=1)
    ratio = SqrtMonomial.of(n, hbar=1, q=-1)
    out = TruncatedSeries.constant(n - 1, D, params.one, params.zero)
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            delta = 1 if I[j] < I[k] else 0
            b = params.value(ratio ** (k - j - 1 + delta))
            exps = tuple(1 if j <= m < k else 0 for m in range(1, n))
            factor = TruncatedSeries.geometric(
                n - 1, D, exps, b, params.one, params.zero,
                coefficient=lambda m: pochhammer_ratio(H, Q, m, params),
            )
            out = out * factor
    return out


def sigma_params(params: ParamSet, sqrt_w) -> ParamSet:
    """Move u along the chamber cocharacter: u_i -> u_i w^(-i), so a_i -> w a_i."""
    from .numerics import as_fraction

    sw = as_fraction(sqrt_w)
    su = tuple(s * sw ** (-i) for i, s in enumerate(params.sqrt_u, start=1))
    return params.replace(sqrt_u=su)
