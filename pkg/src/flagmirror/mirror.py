"""The mirror map, dual parameters, and the transition-matrix checks."""

from __future__ import annotations

import math
from fractions import Fraction

from .combinatorics import Perm, all_perms, preceq, total_order
from .envelope import Theta_multiset, normalized_matrices, stab_matrix, terms_for_spread
from .errors import TailTooLarge
from .geometry import half_tangent, n_plus
from .numerics import ParamSet
from .qseries import phi_diff, pochhammer_ratio
from .report import Report, as_float, stopwatch
from .series import TruncatedSeries
from .vertex import alpha_factor, sigma_params, vertex_limit, vertex_series


# decay slopes are fitted from three points; allow for fitting noise
SLOPE_FLOOR = 0.99


def kappa(params: ParamSet, check_genericity: bool = False) -> ParamSet:
    """Parameters of the mirror copy: u^! = zeta, zeta^! = u, hbar^! = q/hbar.

    With this assignment z_i = hbar^! a^!_i and a_i = (hbar^!/q) z^!_i, and the
    map is an involution.
    """
    return params.replace(
        sqrt_hbar=params.sqrt_q / params.sqrt_hbar,
        sqrt_u=params.sqrt_zeta,
        sqrt_zeta=params.sqrt_u,
        check_genericity=check_genericity,
    )


def dual_fixed_point(I: Perm) -> Perm:
    """I^! = I^-1."""
    return I.inverse


def exchange_chamber_stability(params: ParamSet) -> dict:
    """The exchange of chamber and stability under kappa is not computed.

    It is a statement about cocharacters with no numeric content here.
    """
    return {"computed": False, "reason": "geometric statement, no numeric check"}


def permutation_matrix(n: int) -> list[list[int]]:
    """P_{I,J} = 1 iff I = J^-1, rows and columns in total order."""
    labels = total_order(n)
    return [[1 if I == J.inverse else 0 for J in labels] for I in labels]


# --- a -> 0 limit through the mirror ---------------------------------------------


def dual_limit_series(I: Perm, params: ParamSet, D: int | None = None) -> TruncatedSeries:
    """Phi((q - hbar^!) N^{!+}_{I^!}) written as a z-series.

    Each weight of N^{!+} is hbar^{!e} times a product of consecutive a^!_m;
    with a^!_m = z_m/hbar^! the factor phi(q w)/phi(hbar^! w) expands by the
    q-binomial theorem as sum_k (q/hbar^!)_k/(q)_k (hbar^! w)^k.
    """
    D = params.max_degree if D is None else D
    n = I.n
    hd = params.q / params.hbar  # hbar^!
    one, zero = params.one, params.zero
    out = TruncatedSeries.constant(n - 1, D, one, zero)
    for w, mult in n_plus(dual_fixed_point(I)).items():
        ea = w.a_exponents()
        e_h = w.exps[1] // 2
        scale = hd ** (e_h - sum(ea))  # w = scale * z^ea
        coef = lambda k: pochhammer_ratio(params.q / hd, params.q, k, params)
        factor = TruncatedSeries.geometric(n - 1, D, ea, hd * scale, one, zero, coefficient=coef)
        for _ in range(mult):
            out = out * factor
    return out


def limit_residual(I: Perm, params: ParamSet, D: int | None = None) -> float:
    """Largest relative coefficient gap between vertex_limit and the mirror closed form."""
    from .macdonald import coefficient_residual

    return coefficient_residual(vertex_limit(I, params, D), dual_limit_series(I, params, D))


def sigma_exponents(params: ParamSet, count: int = 3) -> tuple[int, ...]:
    """m values for sqrt(w) = 10^-m deep enough that every a_i w < |q|^(D+1).

    The degree-d coefficient of V_I changes on the scale a ~ q^d, so before
    that point the gap falls only like w^(log|z|/log|q|); past it the
    truncated series is analytic in w and the gap is linear.
    """
    q = abs(float(params.q))
    amax = max(abs(float(a)) for a in params.a)
    target = (params.max_degree + 1) * math.log10(q) - math.log10(amax)
    m0 = max(1, math.ceil(-target / 2))
    return tuple(range(m0, m0 + count))


def sigma_convergence(I: Perm, params: ParamSet, exponents=None) -> dict:
    """|V_I(sigma(w) a, z) - V_I(0, z)| along sqrt(w) = 10^-m.

    Returns the gaps, the w values and the fitted decay slope in decades of
    gap per decade of w.
    """
    D = params.max_degree
    exponents = sigma_exponents(params) if exponents is None else exponents
    target = vertex_limit(I, params, D).evaluate(params.z)
    ws, gaps = [], []
    for m in exponents:
        p = sigma_params(params, Fraction(1, 10**m))
        v = vertex_series(I, p, D).evaluate(p.z)
        ws.append(10.0 ** (-2 * m))
        gaps.append(as_float(abs(v - target) / abs(target)))
    slope = _slope(ws, gaps)
    return {"w": ws, "gap": gaps, "slope": slope}


def _slope(xs, ys) -> float:
    """Least-squares slope of log10 y against log10 x."""
    pts = [(math.log10(x), math.log10(y)) for x, y in zip(xs, ys) if y > 0]
    if len(pts) < 2:
        return float("inf")
    mx = sum(p[0] for p in pts) / len(pts)
    my = sum(p[1] for p in pts) / len(pts)
    sxx = sum((p[0] - mx) ** 2 for p in pts)
    sxy = sum((p[0] - mx) * (p[1] - my) for p in pts)
    return sxy / sxx


# --- main theorem --------------------------------------------------------------------


def _normalized_value(J: Perm, p: ParamSet, D: int):
    """V~_J summed at p.z, and the tail estimate of its series."""
    s = vertex_series(J, p, D)
    pre = alpha_factor(J, p) * phi_diff(half_tangent(J), p)
    return pre * s.evaluate(p.z), abs(pre) * s.tail_estimate(p.z)


def _overline_value(J: Perm, p: ParamSet, D: int):
    """Phi((q - hbar) N_J^+) V_J summed at p.z, and the tail estimate."""
    s = vertex_series(J, p, D)
    pre = phi_diff(n_plus(J), p)
    return pre * s.evaluate(p.z), abs(pre) * s.tail_estimate(p.z)


def main_theorem_sides(I: Perm, params: ParamSet, form: str = "overline",
                       D: int | None = None, dual: ParamSet | None = None) -> dict:
    """Both sides of the transition identity summed at the numeric z and z^!."""
    D = params.max_degree if D is None else D
    dual = kappa(params) if dual is None else dual
    mats = normalized_matrices(params, dual)
    if form == "overline":
        value, matrix = _overline_value, mats["overline"]
    elif form == "bold":
        value, matrix = _normalized_value, mats["bold"]
    else:
        raise ValueError(f"unknown form {form!r}")
    lhs, tail_l = value(dual_fixed_point(I), dual, D)
    rhs = params.zero
    tail_r = 0.0
    for J in matrix.labels:
        c = matrix[I, J]
        if c == 0:
            continue
        v, t = value(J, params, D)
        rhs = rhs + c * v
        tail_r += as_float(abs(c)) * as_float(t)
    scale = as_float(abs(lhs))
    return {
        "lhs": lhs,
        "rhs": rhs,
        "residual": as_float(abs(lhs - rhs)) / scale,
        "tail": (as_float(tail_l) + tail_r) / scale,
    }


def verify_main_theorem(I: Perm, params: ParamSet, form: str = "overline",
                        D: int | None = None, max_tail: float = 1e-3) -> Report:
    """Check the vertex-function transition identity at fixed point I.

    Passes when the residual at degree D is within max(tol, 10 * tail) and
    the residual at D + 2 is smaller.
    """
    D = params.max_degree if D is None else D
    with stopwatch() as sw:
        dual = kappa(params)
        at_d = main_theorem_sides(I, params, form, D, dual)
        if at_d["tail"] > max_tail:
            raise TailTooLarge(
                f"tail estimate {at_d['tail']:.3g} exceeds {max_tail:g} at D={D}")
        at_d2 = main_theorem_sides(I, params, form, D + 2, dual)
    tol = max(params.tolerance, 10 * at_d["tail"])
    shrinks = at_d2["residual"] < at_d["residual"] or at_d["residual"] <= params.tolerance
    passed = at_d["residual"] <= tol and shrinks
    return Report(
        claim_id=f"mirror.{form}.n{params.n}.I{''.join(map(str, I.I))}",
        paper_ref="vertex functions of the mirror are related by the stable envelope",
        residual=at_d["residual"],
        tolerance=tol,
        passed=passed,
        runtime_ms=sw["ms"],
        details={
            "D": D,
            "tail": at_d["tail"],
            "residual_D_plus_2": at_d2["residual"],
            "shrinks": shrinks,
        },
    )


# --- inverse of the stable envelope ------------------------------------------------


def stab_inverse_matrix(params: ParamSet) -> list[list]:
    """M = P^-1 boldStab^!(kappa params) P boldStab(params)."""
    dual = kappa(params)
    B = normalized_matrices(params, dual)["bold"]
    Bd = normalized_matrices(dual, params)["bold"]
    labels = B.labels
    M = []
    for I in labels:
        row = []
        for K in labels:
            acc = params.zero
            for J in labels:
                acc = acc + Bd[I.inverse, J.inverse] * B[J, K]
            row.append(acc)
        M.append(row)
    return M


def verify_stab_inverse(params: ParamSet, adaptive: bool = True) -> Report:
    """max |M - Id| against tol(N).

    With ``adaptive`` the thetas get extra factors for the large arguments of
    the mirror side, so the comparison with tol(N) measures the identity and
    not the truncation.
    """
    with stopwatch() as sw:
        work = adaptive_params(params, kappa(params)) if adaptive else params
        M = stab_inverse_matrix(work)
    n = len(M)
    worst = max(as_float(abs(M[i][j] - (1 if i == j else 0))) for i in range(n) for j in range(n))
    tol = params.tolerance
    return Report(
        claim_id=f"stab-inverse.n{params.n}",
        paper_ref="the mirror stable envelope inverts the stable envelope",
        residual=worst,
        tolerance=tol,
        passed=worst <= tol,
        runtime_ms=sw["ms"],
        details={"theta_terms_used": work.theta_terms},
    )


# --- limits along the chamber --------------------------------------------------------


def limit_summand(I: Perm, J: Perm, params: ParamSet, D: int | None = None):
    """A_{I,J} V~_J / kappa^-1(alpha^!_I), in the form free of alpha factors.

    sqrt(det T^{1/2}_I / det N_I^+) Stab_{I,J} Phi((q - hbar) T^{1/2}_J)/Theta(T^{1/2}_J) V_J.
    """
    D = params.max_degree if D is None else D
    st = stab_matrix(params)[I, J]
    if st == 0:
        return params.zero
    root = params.value(half_tangent(I).sqrt_det()) / params.value(n_plus(I).sqrt_det())
    T = half_tangent(J)
    v = vertex_series(J, params, D).evaluate(params.z)
    return root * st * phi_diff(T, params) / Theta_multiset(T, params) * v


def adaptive_params(params: ParamSet, *others: ParamSet) -> ParamSet:
    """``params`` with enough theta factors for the arguments met in its
    stable envelope (and in those of ``others``), see terms_for_spread."""
    spread = max(stab_matrix(p).spread for p in (params, *others))
    N = terms_for_spread(params, spread)
    return params if N <= params.theta_terms else params.replace(N=N)


def verify_limits(I: Perm, params: ParamSet, exponents=None) -> Report:
    """Off-diagonal summands decay and the diagonal one tends to V_I(0, z).

    u moves along sigma(w) with sqrt(w) = 10^-m. An off-diagonal summand
    passes when its magnitude falls at every step. The diagonal gap to the
    limit must fall with slope >= SLOPE_FLOOR, and the linear extrapolation
    to w = 0 from the last two points must hit the limit to within the
    expected second-order remainder, gap * (w_last / w_prev) * 10.
    """
    exponents = sigma_exponents(params) if exponents is None else exponents
    if len(exponents) < 2:
        raise ValueError("need at least two points along the chamber")
    with stopwatch() as sw:
        D = params.max_degree
        target = vertex_limit(I, params, D).evaluate(params.z)
        ws, vals, off = [], [], {}
        for m in exponents:
            p = adaptive_params(sigma_params(params, Fraction(1, 10**m)))
            ws.append(Fraction(1, 10 ** (2 * m)))
            vals.append(limit_summand(I, I, p, D))
            for J in all_perms(params.n):
                if J != I and preceq(I, J):
                    off.setdefault(J, []).append(as_float(abs(limit_summand(I, J, p, D))))
    wf = [float(w) for w in ws]
    diag = [as_float(abs(v - target) / abs(target)) for v in vals]
    diag_slope = _slope(wf, diag)
    w1, w2 = params.scalar(ws[-2]), params.scalar(ws[-1])
    extrapolated = (vals[-1] * w1 - vals[-2] * w2) / (w1 - w2)
    residual = as_float(abs(extrapolated - target) / abs(target))
    tol = max(params.tolerance, 10 * diag[-1] * wf[-1] / wf[-2])
    decays = {str(J): all(b < a for a, b in zip(v, v[1:])) for J, v in off.items()}
    off_slopes = {str(J): _slope(wf, v) for J, v in off.items()}
    passed = diag_slope >= SLOPE_FLOOR and all(decays.values()) and residual <= tol
    return Report(
        claim_id=f"limits.n{params.n}.I{''.join(map(str, I.I))}",
        paper_ref="limit of the transition sum along the chamber",
        residual=residual,
        tolerance=tol,
        passed=passed,
        runtime_ms=sw["ms"],
        details={
            "w": wf,
            "diagonal_gap": diag,
            "diagonal_slope": diag_slope,
            "off_diagonal": {str(J): v for J, v in off.items()},
            "off_diagonal_slope": off_slopes,
            "decays": decays,
        },
    )
