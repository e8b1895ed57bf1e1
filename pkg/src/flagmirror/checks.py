"""Claim checks packaged as :class:`Report` records.

Each function runs one family of identities over a parameter record and
returns one report per claim instance. The CLI and the acceptance tests both
go through here.
"""

from __future__ import annotations

import itertools

from .combinatorics import DegreeMatrix, all_perms, is_admissible, preceq
from .envelope import (
    P_factor,
    expected_row_sign,
    quasi_periodicity,
    restriction_matrix,
    stab_matrix,
    identification_sign,
)
from .macdonald import u_eigencheck, zeta_eigencheck
from .mirror import (
    SLOPE_FLOOR,
    limit_residual,
    sigma_convergence,
    verify_limits,
    verify_main_theorem,
    verify_stab_inverse,
)
from .numerics import ParamSet
from .report import Report, as_float, stopwatch
from .vertex import polarization_swap_residual


def _tag(I) -> str:
    return "".join(map(str, I.I))


def check_triangularity(params: ParamSet) -> Report:
    """Restrictions W~_I(x_J) with I not below J vanish, relative to the row."""
    with stopwatch() as sw:
        M = restriction_matrix(params)
    worst = 0.0
    zeros = 0
    for I, row in zip(M.labels, M.entries):
        scale = max(as_float(abs(v)) for v in row)
        for J, v in zip(M.labels, row):
            if not preceq(I, J):
                worst = max(worst, as_float(abs(v)) / scale)
                zeros += v == 0
    tol = params.tolerance
    return Report(f"triangularity.n{params.n}", "support: Stab(I)|_J = 0 unless I precedes J",
                  worst, tol, worst <= tol, sw["ms"], {"exact_zeros": int(zeros)})


def check_diagonal(params: ParamSet) -> Report:
    """W~_I(x_I) agrees with the closed product P_I(w, hbar)."""
    with stopwatch() as sw:
        M = restriction_matrix(params)
        worst = 0.0
        for I in M.labels:
            p = P_factor(I, params)
            worst = max(worst, as_float(abs(M[I, I] / p - 1)))
    tol = params.tolerance
    return Report(f"diagonal.n{params.n}", "diagonal restriction equals P_I(w, hbar)",
                  worst, tol, worst <= tol, sw["ms"])


def check_diagonal_sign(params: ParamSet) -> Report:
    """Theta(N_I^+)/W~_I(x_I) is the sign (-1)^(n(n-1)/2) (-1)^I.

    Rows where the sign (-1)^n (-1)^I of the identification with Stab
    differs are listed in the details; they do not fail the check.
    """
    with stopwatch() as sw:
        S = stab_matrix(params)
    worst = 0.0
    mismatch = []
    for I in S.labels:
        s = S.row_scale[I]
        worst = max(worst, as_float(abs(s - expected_row_sign(I))))
        if expected_row_sign(I) != identification_sign(I):
            mismatch.append(str(I))
    tol = params.tolerance
    return Report(f"diagonal-sign.n{params.n}", "row sign (-1)^(n(n-1)/2) (-1)^I",
                  worst, tol, worst <= tol, sw["ms"],
                  {"differs_from_(-1)^n(-1)^I": mismatch})


QUASI_SYMBOLS = (("x", 1, 1), ("u", 1), ("z", 1), "hbar")


def check_quasiperiodicity(params: ParamSet, seed: int = 0, symbols=QUASI_SYMBOLS
                           ) -> list[Report]:
    out = []
    tol = params.tolerance
    for I in all_perms(params.n):
        for sym in symbols:
            with stopwatch() as sw:
                r = quasi_periodicity(I, params, sym, seed)
            name = sym if isinstance(sym, str) else "-".join(map(str, sym))
            out.append(Report(
                f"quasiperiodicity.n{params.n}.I{_tag(I)}.{name}",
                "q-shifts of W~_I match the line-bundle transformation factor",
                r["residual"], tol, r["residual"] <= tol, sw["ms"],
                {"theta_terms_used": r["theta_terms_used"], "spread": r["spread"]}))
    return out


def check_macdonald(params: ParamSet, which: str = "zeta", rs=None, perms=None,
                    D: int | None = None) -> list[Report]:
    n = params.n
    rs = range(1, n + 1) if rs is None else rs
    perms = all_perms(n) if perms is None else perms
    fn = {"zeta": zeta_eigencheck, "u": u_eigencheck}[which]
    ref = {
        "zeta": "D_r(zeta; q, hbar) V~_I = e_r(u^-1) V~_I",
        "u": "(q/hbar)^(r(n-1)) D_r(u; q, q/hbar) V~_I = e_r(zeta^-1) V~_I",
    }[which]
    tol = params.tolerance
    out = []
    for I in perms:
        for r in rs:
            with stopwatch() as sw:
                res = fn(I, r, params, D)
            out.append(Report(f"macdonald-{which}.n{n}.I{_tag(I)}.r{r}", ref, res, tol,
                              res <= tol, sw["ms"], {"D": D or params.max_degree}))
    return out


def check_limit_closed_form(params: ParamSet, D: int | None = None) -> list[Report]:
    tol = params.tolerance
    out = []
    for I in all_perms(params.n):
        with stopwatch() as sw:
            res = limit_residual(I, params, D)
        out.append(Report(f"limit-closed-form.n{params.n}.I{_tag(I)}",
                          "kappa(V_I(0, z)) = Phi((q - hbar^!) N^{!+}_{I^!})",
                          res, tol, res <= tol, sw["ms"]))
    return out


def check_sigma_convergence(params: ParamSet) -> list[Report]:
    out = []
    for I in all_perms(params.n):
        with stopwatch() as sw:
            r = sigma_convergence(I, params)
        out.append(Report(f"sigma-convergence.n{params.n}.I{_tag(I)}",
                          "V_I(sigma(w) a, z) tends to V_I(0, z) linearly in w",
                          max(0.0, 1 - r["slope"]), 1 - SLOPE_FLOOR,
                          r["slope"] >= SLOPE_FLOOR, sw["ms"],
                          {"slope": r["slope"], "w": r["w"], "gap": r["gap"]}))
    return out


def check_mirror(params: ParamSet, form: str = "overline", perms=None,
                 D: int | None = None) -> list[Report]:
    perms = all_perms(params.n) if perms is None else perms
    return [verify_main_theorem(I, params, form, D) for I in perms]


def check_stab_inverse(params: ParamSet) -> Report:
    return verify_stab_inverse(params)


def check_limits(params: ParamSet, perms=None) -> list[Report]:
    perms = all_perms(params.n) if perms is None else perms
    return [verify_limits(I, params) for I in perms]


def check_polarization_swap(params: ParamSet) -> Report:
    with stopwatch() as sw:
        worst = max(polarization_swap_residual(I, params) for I in all_perms(params.n))
    tol = params.tolerance
    return Report(f"polarization-swap.n{params.n}",
                  "Theta(N^+) Phi((q-hbar) T^{1/2}) / Theta(T^{1/2}) = "
                  "sqrt(det N^+/det T^{1/2}) Phi((q-hbar) N^+)",
                  worst, tol, worst <= tol, sw["ms"])


def check_admissibility(n: int, cap: int = 3) -> Report:
    """Matching test and brute-force subset test agree on every degree
    matrix with entries <= cap."""
    with stopwatch() as sw:
        cells = [(i, j) for i in range(1, n) for j in range(1, i + 1)]
        disagree = 0
        total = 0
        for values in itertools.product(range(cap + 1), repeat=len(cells)):
            rows, k = [], 0
            for i in range(1, n):
                rows.append(tuple(values[k:k + i]))
                k += i
            d = DegreeMatrix(tuple(rows))
            total += 1
            if is_admissible(d) != is_admissible(d, bruteforce=True):
                disagree += 1
    return Report(f"admissibility.n{n}", "degree cone: matching test = subset test",
                  float(disagree), 0.0, disagree == 0, sw["ms"], {"matrices": total})


VERIFY_KINDS = ("triangularity", "diagonal", "quasiperiodicity", "macdonald", "mirror",
                "stab-inverse", "limits")


def run_kind(kind: str, params: ParamSet, *, which: str = "both", form: str = "overline",
             perms=None, rs=None, seed: int = 0) -> list[Report]:
    """Reports for one ``verify`` subcommand."""
    if kind == "triangularity":
        return [check_triangularity(params)]
    if kind == "diagonal":
        return [check_diagonal(params), check_diagonal_sign(params),
                check_polarization_swap(params)]
    if kind == "quasiperiodicity":
        return check_quasiperiodicity(params, seed)
    if kind == "macdonald":
        kinds = ("zeta", "u") if which == "both" else (which,)
        return [r for w in kinds for r in check_macdonald(params, w, rs, perms)]
    if kind == "mirror":
        return check_mirror(params, form, perms)
    if kind == "stab-inverse":
        return [check_stab_inverse(params)]
    if kind == "limits":
        return (check_limit_closed_form(params) + check_sigma_convergence(params)
                + check_limits(params, perms))
    if kind == "all":
        out = []
        for k in VERIFY_KINDS:
            out += run_kind(k, params, which=which, form=form, perms=perms, rs=rs, seed=seed)
        return out
    raise ValueError(f"unknown check {kind!r}")
