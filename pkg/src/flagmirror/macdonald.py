"""Macdonald difference operators acting on vertex-type functions.

A function here is prefactor * series(z), where the prefactor is a product of
theta and phi atoms and the series is a z power series. Shifting zeta_i by q
acts on a z-monomial by a power of q (because zeta_i/zeta_{i+1} = (hbar/q) z_i)
and on the prefactor by an exact scalar. Shifting u_i by q re-evaluates the
series at the shifted parameters and multiplies the prefactor by a scalar
times a monomial in zeta; the zeta monomials are traded for z-shifts after
clearing denominators with zeta_1...zeta_r.

All operators return the result divided by the unshifted prefactor, so the
eigen-equations become identities between z-series that can be checked
coefficient by coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

from .combinatorics import Perm
from .errors import CoincidentCoordinates
from .numerics import ParamSet
from .series import TruncatedSeries
from .vertex import normalized_prefactor, phi_diff_atoms, vertex_series
from .geometry import half_tangent


def operator_prefactor(n: int, r: int, t):
    """t^(r(r+1)/2 - rn)."""
    return t ** (r * (r + 1) // 2 - r * n)


def macdonald_coefficient(J: Sequence[int], x: Sequence, t):
    """prod_{i in J, j not in J} (t x_i - x_j)/(x_i - x_j); indices are 1-based."""
    J = set(J)
    n = len(x)
    out = 1
    for i in J:
        for j in range(1, n + 1):
            if j in J:
                continue
            den = x[i - 1] - x[j - 1]
            if den == 0:
                raise CoincidentCoordinates(f"x_{i} = x_{j}")
            out = out * (t * x[i - 1] - x[j - 1]) / den
    return out


def subsets(n: int, r: int) -> list[tuple[int, ...]]:
    return list(combinations(range(1, n + 1), r))


def elementary_symmetric(values: Sequence, r: int, one=1):
    """e_r(values) straight from the definition."""
    total = 0 * one
    for K in combinations(range(len(values)), r):
        term = one
        for k in K:
            term = term * values[k]
        total = total + term
    return total


def elementary_symmetric_vieta(values: Sequence, one=1) -> list:
    """[e_0, ..., e_m] from the coefficients of prod (1 + s v_i)."""
    coeffs = [one]
    for v in values:
        nxt = coeffs + [0 * one]
        for k in range(len(coeffs), 0, -1):
            nxt[k] = nxt[k] + coeffs[k - 1] * v
        coeffs = nxt
    return coeffs


# --- zeta ratios as z-monomials -------------------------------------------------


def zeta_ratio(i: int, j: int, n: int, params: ParamSet):
    """zeta_i/zeta_j for i <= j as (z-exponents, scalar): (hbar/q)^(j-i) z_i...z_{j-1}."""
    if i > j:
        raise ValueError("need i <= j")
    exps = tuple(1 if i <= m < j else 0 for m in range(1, n))
    return exps, (params.hbar / params.q) ** (j - i)


def _clear_zeta(K: Sequence[int], n: int, params: ParamSet):
    """zeta_1...zeta_r / prod_{k in K} zeta_k as (z-exponents, scalar), r = |K|."""
    exps = [0] * (n - 1)
    scalar = params.one
    for m, k in enumerate(sorted(K), start=1):
        e, s = zeta_ratio(m, k, n, params)
        exps = [a + b for a, b in zip(exps, e)]
        scalar = scalar * s
    return tuple(exps), scalar


def _z_shift_twist(K: Sequence[int], n: int, params: ParamSet) -> Callable:
    """Scalar picked up by z^deg when zeta_k -> q zeta_k for every k in K."""
    q = params.q

    def f(deg):
        power = 0
        for k in K:
            power += deg[k - 1] if k < n else 0
            power -= deg[k - 2] if k > 1 else 0
        return q**power

    return f


def _ratio_factor(i: int, j: int, t, n: int, D: int, params: ParamSet) -> TruncatedSeries:
    """(t zeta_i - zeta_j)/(zeta_i - zeta_j) as a z-series."""
    one, zero = params.one, params.zero
    if i < j:
        # x = zeta_i/zeta_j small: (1 - t x)/(1 - x) = 1 + sum_m (1 - t) x^m
        exps, s = zeta_ratio(i, j, n, params)
        return TruncatedSeries.geometric(
            n - 1, D, exps, s, one, zero, coefficient=lambda m: one if m == 0 else one - t)
    # y = zeta_j/zeta_i small: (t - y)/(1 - y) = t + sum_m (t - 1) y^m
    exps, s = zeta_ratio(j, i, n, params)
    return TruncatedSeries.geometric(
        n - 1, D, exps, s, one, zero, coefficient=lambda m: t if m == 0 else t - one)


def zeta_coefficient_series(K: Sequence[int], n: int, D: int, params: ParamSet, t=None
                            ) -> TruncatedSeries:
    """macdonald_coefficient(K; zeta, t) expanded in z."""
    t = params.hbar if t is None else t
    out = TruncatedSeries.constant(n - 1, D, params.one, params.zero)
    Ks = set(K)
    for i in K:
        for j in range(1, n + 1):
            if j not in Ks:
                out = out * _ratio_factor(i, j, t, n, D, params)
    return out


# --- operands ---------------------------------------------------------------------


@dataclass
class ShiftableFunction:
    """prefactor(params) * recipe(params), with the prefactor's shift rules.

    ``zeta_rule(params, K)`` is the scalar the prefactor picks up when zeta_k
    -> q zeta_k for k in K. ``u_rule(params, K)`` returns (scalar, {k: e}) for
    u_k -> q u_k, k in K, where the prefactor picks up scalar * prod zeta_k^e.
    """

    n: int
    recipe: Callable[[ParamSet], TruncatedSeries]
    zeta_rule: Callable[[ParamSet, tuple], object]
    u_rule: Callable[[ParamSet, tuple], tuple] | None = None
    label: str = ""

    def series(self, params: ParamSet) -> TruncatedSeries:
        return self.recipe(params)

    def with_series(self, series: TruncatedSeries, label: str = "") -> "ShiftableFunction":
        """Same prefactor, a fixed series (used to compose zeta operators)."""
        return ShiftableFunction(self.n, lambda _p: series, self.zeta_rule, None, label)


def alpha_u_rule(I: Perm, K: Sequence[int], params: ParamSet):
    """alpha_I picks up prod_{k in K} (hbar/q)^(n - I^!_k) zeta_{I^!_k}^-1.

    Direct computation from theta(q x) = -q^(-1/2) x^(-1) theta(x); the
    exponent of q/hbar is negative, not positive.
    """
    n = I.n
    Id = I.inverse
    scalar = params.one
    zexp: dict = {}
    for k in K:
        i = Id[k]
        scalar = scalar * (params.hbar / params.q) ** (n - i)
        zexp[i] = zexp.get(i, 0) - 1
    return scalar, zexp


def alpha_zeta_rule(I: Perm, K: Sequence[int], params: ParamSet):
    """alpha_I picks up prod_{i in K} hbar^(n-i) / u_{I_i}."""
    n = I.n
    out = params.one
    for i in K:
        out = out * params.hbar ** (n - i) / params.u[I[i] - 1]
    return out


def vertex_function(I: Perm, D: int | None = None) -> ShiftableFunction:
    """The normalized vertex function alpha_I Phi((q - hbar) T^{1/2}_I) V_I."""
    pre = normalized_prefactor(I)
    phi_atoms = phi_diff_atoms(half_tangent(I))

    def zeta_rule(params, K):
        return pre.shift_factor(params, zeta={k: 1 for k in K})

    def u_rule(params, K):
        scalar, zexp = alpha_u_rule(I, K, params)
        return scalar * phi_atoms.shift_factor(params, u={k: 1 for k in K}), zexp

    return ShiftableFunction(I.n, lambda p: vertex_series(I, p, D), zeta_rule, u_rule,
                             f"V~_{I}")


def scaled_function(F: ShiftableFunction, coefficient: Callable[[ParamSet], object],
                    label: str = "") -> ShiftableFunction:
    """c(params) * F, with c re-evaluated at shifted u and zeta."""

    def zeta_rule(params, K):
        ratio = coefficient(params.shifted(zeta=K)) / coefficient(params)
        return ratio * F.zeta_rule(params, K)

    def u_rule(params, K):
        scalar, zexp = F.u_rule(params, K)
        return coefficient(params.shifted(u=K)) / coefficient(params) * scalar, zexp

    return ShiftableFunction(F.n, F.recipe, zeta_rule, u_rule, label or F.label)


# --- operators -------------------------------------------------------------------


def apply_D_zeta(F: ShiftableFunction, r: int, params: ParamSet, D: int | None = None
                 ) -> TruncatedSeries:
    """D_r(zeta; q, hbar) F divided by F's prefactor, as a z-series."""
    n = F.n
    if not 1 <= r <= n:
        raise ValueError("need 1 <= r <= n")
    _check_distinct(params.zeta)
    base = F.series(params)
    D = base.D if D is None else D
    out = TruncatedSeries(n - 1, D, {}, params.zero)
    for K in subsets(n, r):
        shifted = base.twist(_z_shift_twist(K, n, params))
        term = zeta_coefficient_series(K, n, D, params) * shifted
        out = out + term * F.zeta_rule(params, K)
    return out * operator_prefactor(n, r, params.hbar)


def apply_D_u(F: ShiftableFunction, r: int, params: ParamSet, D: int | None = None
              ) -> TruncatedSeries:
    """zeta_1...zeta_r (q/hbar)^(r(n-1)) D_r(u; q, q/hbar) F over F's prefactor.

    The zeta_1...zeta_r factor turns the zeta^-1 monomials produced by the
    prefactor into nonnegative z-shifts.
    """
    n = F.n
    if not 1 <= r <= n:
        raise ValueError("need 1 <= r <= n")
    if F.u_rule is None:
        raise ValueError(f"{F.label} has no u-shift rule")
    _check_distinct(params.u)
    t = params.q / params.hbar
    D = F.series(params).D if D is None else D
    out = TruncatedSeries(n - 1, D, {}, params.zero)
    for K in subsets(n, r):
        c = macdonald_coefficient(K, params.u, t)
        scalar, zexp = F.u_rule(params, K)
        lowered = [k for k, e in zexp.items() for _ in range(-e)]
        if len(lowered) != r or any(e > 0 for e in zexp.values()):
            raise ValueError("u-shift rule must lower r distinct zeta's")
        exps, s = _clear_zeta(lowered, n, params)
        series = F.series(params.shifted(u=K))
        out = out + series.shift(exps) * (c * scalar * s)
    return out * (operator_prefactor(n, r, t) * t ** (r * (n - 1)))


def zeta_eigenvalue(r: int, params: ParamSet):
    """e_r(u^-1)."""
    return elementary_symmetric([1 / x for x in params.u], r, params.one)


def u_eigenvalue_series(r: int, params: ParamSet, D: int, base: TruncatedSeries
                        ) -> TruncatedSeries:
    """zeta_1...zeta_r e_r(zeta^-1) times ``base``, as a z-series."""
    n = params.n
    out = TruncatedSeries(n - 1, D, {}, params.zero)
    for S in subsets(n, r):
        exps, s = _clear_zeta(S, n, params)
        out = out + base.shift(exps) * s
    return out


def _check_distinct(x: Sequence):
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            if x[i] == x[j]:
                raise CoincidentCoordinates(f"coordinates {i + 1} and {j + 1} coincide")


# --- residuals -------------------------------------------------------------------


def coefficient_residual(lhs: TruncatedSeries, rhs: TruncatedSeries, absval=abs) -> float:
    """Largest per-coefficient relative difference.

    Coefficients whose reference value is zero are measured against the
    largest reference coefficient instead.
    """
    keys = set(lhs.coeffs) | set(rhs.coeffs)
    scale = max((absval(v) for v in rhs.coeffs.values()), default=0)
    worst = 0.0
    for k in keys:
        ref = absval(rhs[k])
        diff = absval(lhs[k] - rhs[k])
        den = ref if ref != 0 else scale
        if den == 0:
            if diff != 0:
                return float("inf")
            continue
        worst = max(worst, float(diff / den))
    return worst


def zeta_eigencheck(I: Perm, r: int, params: ParamSet, D: int | None = None) -> float:
    F = vertex_function(I, D)
    lhs = apply_D_zeta(F, r, params)
    rhs = F.series(params) * zeta_eigenvalue(r, params)
    return coefficient_residual(lhs, rhs)


def u_eigencheck(I: Perm, r: int, params: ParamSet, D: int | None = None) -> float:
    F = vertex_function(I, D)
    base = F.series(params)
    lhs = apply_D_u(F, r, params)
    rhs = u_eigenvalue_series(r, params, base.D, base)
    return coefficient_residual(lhs, rhs)


def bold_eigencheck(I: Perm, J: Perm, r: int, params: ParamSet, D: int | None = None
                    ) -> float:
    """D_r(u; q, q/hbar) acting on boldStab_{I,J} V~_J has eigenvalue e_r(zeta^-1).

    Without the (q/hbar)^(r(n-1)) prefactor: the boldStab factor supplies it.
    """
    from .envelope import normalized_matrices

    def bold(p):
        return normalized_matrices(p)["bold"][I, J]

    F = scaled_function(vertex_function(J, D), bold, f"bold[{I},{J}] V~_{J}")
    base = F.series(params)
    n, t = params.n, params.q / params.hbar
    lhs = apply_D_u(F, r, params) * t ** (-r * (n - 1))
    rhs = u_eigenvalue_series(r, params, base.D, base)
    return coefficient_residual(lhs, rhs)


def commutator_residual(I: Perm, r: int, s: int, params: ParamSet, D: int | None = None
                        ) -> float:
    """|D_r D_s V~ - D_s D_r V~| coefficientwise, relative."""
    F = vertex_function(I, D)
    rs = apply_D_zeta(F.with_series(apply_D_zeta(F, s, params)), r, params)
    sr = apply_D_zeta(F.with_series(apply_D_zeta(F, r, params)), s, params)
    return coefficient_residual(rs, sr)
