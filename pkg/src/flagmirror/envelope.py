"""Elliptic weight functions and the stable-envelope restriction matrices.

Weight functions are evaluated from square roots of their arguments, so a
factor theta(t_b/t_a) with t_a = t_b is an exact zero. Parameters of X enter
through

    t^(k)_a = 1/x^(k)_a,  w_i = 1/u_i,  mu_j/mu_{j+1} = hbar z_j = q zeta_j/zeta_{j+1}

with the gauge mu_n = 1, so sqrt(mu_j) = sqrt_q^(n-j) sqrt_zeta_j / sqrt_zeta_n.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping

from .combinatorics import Perm, non_inversions, total_order
from .errors import DivisionByZeroTheta, SymmetrizationPole, ZeroDiagonal
from .geometry import half_tangent, index_bundle, line_restriction, n_plus
from .numerics import ParamSet
from .qseries import SqrtMonomial, Theta_multiset, terms_for_spread, theta


@dataclass
class WeightFnParams:
    """Square roots of the weight-function variables, as backend scalars.

    ``sqrt_t[k]`` holds t^(k)_1..t^(k)_k for k = 1..n-1; it may be empty when
    only fixed-point restrictions are needed.
    """

    params: ParamSet
    sqrt_w: tuple
    sqrt_mu: tuple
    sqrt_hbar: object
    sqrt_t: dict = field(default_factory=dict)
    _memo: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.sqrt_w)

    @classmethod
    def from_params(cls, params: ParamSet, sqrt_x: Mapping[int, list] | None = None
                    ) -> "WeightFnParams":
        g = params.generators
        n = params.n
        sq, sh = g[0], g[1]
        su = g[2 : 2 + n]
        sz = g[2 + n :]
        sqrt_w = tuple(1 / s for s in su)
        sqrt_mu = tuple(sq ** (n - j) * sz[j - 1] / sz[n - 1] for j in range(1, n + 1))
        sqrt_t = {}
        if sqrt_x is not None:
            sqrt_t = {k: [1 / s for s in v] for k, v in sqrt_x.items()}
        return cls(params, sqrt_w, sqrt_mu, sh, sqrt_t)

    def at_fixed_point(self, J: Perm) -> "WeightFnParams":
        """t^(k)_a = w_{j^(k)_a}: the same scalar objects, so ratios are exact."""
        t = {k: [self.sqrt_w[j - 1] for j in J.ordered(k)] for k in range(1, self.n)}
        return replace(self, sqrt_t=t, _memo=self._memo)

    def theta(self, s):
        """Memoized theta of a scalar square root."""
        hit = self._memo.get(s)
        if hit is None:
            hit = self._memo[s] = theta(s, self.params)
        return hit


def psi(I: Perm, k: int, a: int, c: int, sx, wp: WeightFnParams):
    """The three-case factor psi_{I,k,a,c} at the square root ``sx`` of its argument."""
    top = I.ordered(k + 1)[c - 1]
    low = I.ordered(k)[a - 1]
    if top < low:
        return wp.theta(sx)
    if top > low:
        return wp.theta(sx / wp.sqrt_hbar)
    j = I.position[low]
    delta = 1 if I[k + 1] < low else 0
    sarg = wp.sqrt_mu[j - 1] / wp.sqrt_mu[k] / wp.sqrt_hbar**delta
    den = wp.theta(sarg)
    if den == 0:
        raise DivisionByZeroTheta(f"psi denominator vanishes at I={I}, k={k}, a={a}")
    return wp.theta(sx * sarg) / den


def _t_blocks(t: Mapping[int, list], wp: WeightFnParams) -> dict:
    out = dict(t)
    out[wp.n] = list(wp.sqrt_w)
    return out


def weight_U(I: Perm, wp: WeightFnParams, t: Mapping[int, list] | None = None):
    """U_I at one ordering of the t-variables (default ``wp.sqrt_t``)."""
    n = I.n
    T = _t_blocks(wp.sqrt_t if t is None else t, wp)
    val = wp.params.one
    for k in range(1, n):
        for a in range(1, k + 1):
            ta = T[k][a - 1]
            for c in range(1, k + 2):
                val = val * psi(I, k, a, c, T[k + 1][c - 1] / ta, wp)
                if val == 0:
                    return val
            for b in range(a + 1, k + 1):
                r = T[k][b - 1] / ta
                den = wp.theta(r)
                if den == 0:
                    raise SymmetrizationPole(f"theta(t_b/t_a) = 0 in block k={k}")
                val = val * wp.theta(r * wp.sqrt_hbar) / den
    return val


def weight_E(wp: WeightFnParams, t: Mapping[int, list] | None = None):
    T = wp.sqrt_t if t is None else t
    val = wp.params.one
    for k in range(1, wp.n):
        for ta in T[k]:
            for tb in T[k]:
                val = val * wp.theta(wp.sqrt_hbar * tb / ta)
    return val


def _orderings(t: Mapping[int, list], n: int):
    blocks = [list(itertools.permutations(t[k])) for k in range(1, n)]
    for choice in itertools.product(*blocks):
        yield {k: list(choice[k - 1]) for k in range(1, n)}


def _prefactor(wp: WeightFnParams):
    n = wp.n
    return wp.theta(1 / wp.sqrt_hbar) ** (n * (n - 1) // 2)


def weight_W(I: Perm, wp: WeightFnParams):
    """theta(1/hbar)^(n(n-1)/2) times the full symmetrization of U_I."""
    total = wp.params.zero
    for t in _orderings(wp.sqrt_t, wp.n):
        total = total + weight_U(I, wp, t)
    return _prefactor(wp) * total


def weight_Wtilde(I: Perm, wp: WeightFnParams):
    """W_I / E, summed as the symmetrization of U_I/E (E is symmetric)."""
    E = weight_E(wp)
    if E == 0:
        raise SymmetrizationPole("E(t, hbar) vanishes")
    return weight_W(I, wp) / E


def restrict(I: Perm, J: Perm, params: ParamSet, wp: WeightFnParams | None = None):
    """W~_I at t = w_J."""
    wp = WeightFnParams.from_params(params) if wp is None else wp
    return weight_Wtilde(I, wp.at_fixed_point(J))


def P_factor(I: Perm, params: ParamSet):
    """P_I(w, hbar) with w_i = 1/u_i, evaluated through monomial thetas."""
    n = I.n
    out = params.one
    for k in range(1, n + 1):
        for l in range(k + 1, n + 1):
            # w_{I_k}/w_{I_l} = u_{I_l}/u_{I_k}
            ratio = SqrtMonomial.of(n, u={I[l]: 1, I[k]: -1})
            if I[l] < I[k]:
                out = out * theta(ratio.half(), params)
            else:
                out = out * theta((ratio * SqrtMonomial.of(n, hbar=1)).half(), params)
    return out


def theta_n_plus(I: Perm, params: ParamSet):
    return Theta_multiset(n_plus(I), params)


def expected_row_sign(I: Perm) -> int:
    """(-1)^(n(n-1)/2) (-1)^I, the sign relating W~_I|_I to Theta(N_I^+)."""
    n = I.n
    return (-1) ** (n * (n - 1) // 2) * I.sign


def identification_sign(I: Perm) -> int:
    """(-1)^n (-1)^I, the sign in the identification of W~ with Stab."""
    return (-1) ** I.n * I.sign


# --- matrices -------------------------------------------------------------------


@dataclass
class StabMatrix:
    """Square matrix indexed by fixed points in :func:`total_order`."""

    kind: str
    labels: list
    entries: list
    row_scale: dict = field(default_factory=dict)
    spread: float = 1.0  # largest theta argument size met while building it

    def index(self, I: Perm) -> int:
        return self.labels.index(I)

    def __getitem__(self, key):
        I, J = key
        return self.entries[self.index(I)][self.index(J)]

    def row(self, I: Perm) -> list:
        return self.entries[self.index(I)]

    def to_rows(self, to_float: Callable = float) -> list[dict]:
        out = []
        for I, row in zip(self.labels, self.entries):
            out.append({"row": str(I), **{str(J): to_float(v) for J, v in zip(self.labels, row)}})
        return out


def restriction_matrix(params: ParamSet) -> StabMatrix:
    """Raw restrictions W~_I(x_J), cached on the parameter record."""
    key = ("restriction_matrix",)
    hit = params._cache.get(key)
    if hit is not None:
        return hit
    labels = total_order(params.n)
    wp = WeightFnParams.from_params(params)
    entries = []
    for I in labels:
        row = []
        for J in labels:
            # entries off the order ideal vanish identically; evaluate anyway
            # so triangularity is checked rather than assumed
            row.append(restrict(I, J, params, wp))
        entries.append(row)
    m = StabMatrix("raw", labels, entries)
    m.spread = argument_spread(wp)
    params._cache[key] = m
    return m


def stab_matrix(params: ParamSet) -> StabMatrix:
    """Rows rescaled so the diagonal is exactly Theta(N_I^+).

    ``row_scale[I]`` records Theta(N_I^+)/W~_I(x_I), expected to be the
    sign (-1)^(n(n-1)/2) (-1)^I.
    """
    key = ("stab_matrix",)
    hit = params._cache.get(key)
    if hit is not None:
        return hit
    raw = restriction_matrix(params)
    entries = []
    scale = {}
    for i, I in enumerate(raw.labels):
        d = raw.entries[i][i]
        if d == 0:
            raise ZeroDiagonal(f"W~_I(x_I) vanishes for I={I}")
        s = theta_n_plus(I, params) / d
        scale[I] = s
        entries.append([v * s for v in raw.entries[i]])
    m = StabMatrix("stab", raw.labels, entries, scale, raw.spread)
    params._cache[key] = m
    return m


def e_value(sqrt_L: list, sqrt_z: list, params: ParamSet):
    """e(x, z) = prod_i theta(L_i) theta(z_i) / theta(L_i z_i) from square roots."""
    out = params.one
    for sl, sz in zip(sqrt_L, sqrt_z):
        den = theta(sl * sz, params)
        if den == 0:
            raise DivisionByZeroTheta("theta(L_i z_i) = 0")
        out = out * theta(sl, params) * theta(sz, params) / den
    return out


def sqrt_z_monomial(n: int, i: int) -> SqrtMonomial:
    """Square root of z_i = (q/hbar) zeta_i/zeta_{i+1}."""
    return SqrtMonomial.of(n, q=1, hbar=-1, zeta={i: 1, i + 1: -1}, half=True)


def e_factor(I: Perm, params: ParamSet):
    n = I.n
    out = params.one
    for i in range(1, n):
        sl = line_restriction(i, I).half()
        sz = sqrt_z_monomial(n, i)
        den = theta(sl * sz, params)
        if den == 0:
            raise DivisionByZeroTheta("theta(L_i z_i) = 0")
        out = out * theta(sl, params) * theta(sz, params) / den
    return out


def normalized_matrices(params: ParamSet, dual: ParamSet | None = None) -> dict[str, StabMatrix]:
    """S, boldStab, A and overlineStab built from :func:`stab_matrix`.

    ``dual`` is the parameter record of the mirror side (default: kappa of
    ``params``); quantities written kappa^-1(f^!) are f evaluated on it.
    """
    from .mirror import kappa, dual_fixed_point
    from .vertex import alpha_factor

    dual = kappa(params) if dual is None else dual
    stab = stab_matrix(params)
    labels = stab.labels
    val = params.value
    dval = dual.value
    alpha = {J: alpha_factor(J, params) for J in labels}
    thT = {J: Theta_multiset(half_tangent(J), params) for J in labels}
    efac = {J: e_factor(J, params) for J in labels}
    thNJ = {J: theta_n_plus(J, params) for J in labels}
    S, B, A, O = [], [], [], []
    for I in labels:
        Id = dual_fixed_point(I)
        sdT = half_tangent(I).sqrt_det()
        sdN = n_plus(I).sqrt_det()
        dual_alpha = alpha_factor(Id, dual)
        dual_thN = Theta_multiset(n_plus(Id), dual)
        dual_thT = Theta_multiset(half_tangent(Id), dual)
        root = val(sdT) / val(sdN) * dval(n_plus(Id).sqrt_det()) / dval(
            half_tangent(Id).sqrt_det())
        thN = theta_n_plus(I, params)
        rs, rb, ra, ro = [], [], [], []
        for J, st in zip(labels, stab.row(I)):
            rs.append(st * efac[J] / (efac[I] * thN))
            rb.append(root * dual_alpha / alpha[J] * st / dual_thN * dual_thT / thT[J])
            ra.append(val(sdT) / val(sdN) * dual_alpha * st / (alpha[J] * thT[J]))
            ro.append(val(sdT) * val(n_plus(J).sqrt_det())
                      / (val(half_tangent(J).sqrt_det()) * val(sdN)) * st / thNJ[J])
        S.append(rs)
        B.append(rb)
        A.append(ra)
        O.append(ro)
    return {
        "s": StabMatrix("s", labels, S),
        "bold": StabMatrix("bold", labels, B),
        "a": StabMatrix("a", labels, A),
        "overline": StabMatrix("overline", labels, O),
    }


# --- quasi-periodicity ------------------------------------------------------------


@dataclass(frozen=True)
class ThetaAtom:
    """theta(prod_s v_s^e_s)^power over named variables."""

    exps: tuple  # sorted ((symbol, exponent), ...)
    power: int = 1

    @classmethod
    def make(cls, exps: Mapping, power: int = 1) -> "ThetaAtom":
        return cls(tuple(sorted(((k, v) for k, v in exps.items() if v), key=repr)), power)


def _merge(*ds: Mapping) -> dict:
    out: dict = {}
    for d in ds:
        for k, v in d.items():
            out[k] = out.get(k, 0) + v
    return out


def predicted_shift(atoms: list[ThetaAtom], values: Mapping, symbol, params: ParamSet):
    """Exact factor picked up by prod(atoms) when ``symbol`` is multiplied by q.

    ``values`` maps each symbol to the square root of its value. Uses
    theta(q^m y) = (-1)^m q^(-m^2/2) y^(-m) theta(y).
    """
    sq = params.generators[0]
    out = params.one
    for atom in atoms:
        ex = dict(atom.exps)
        m = ex.get(symbol, 0)
        if m == 0:
            continue
        sy = params.one
        for s, e in atom.exps:
            sy = sy * values[s] ** e
        f = sq ** (-m * m) * sy ** (-2 * m)
        if m % 2:
            f = -f
        out = out * f**atom.power
    return out


def g_form_atoms(I: Perm) -> list[ThetaAtom]:
    """G_I(t, w, hbar, mu) / E(t, hbar) as theta atoms."""
    n = I.n
    t = lambda k, a: ("w", a) if k == n else ("t", k, a)
    atoms = []
    for k in range(1, n):
        for a in range(1, k + 1):
            for c in range(1, k + 2):
                atoms.append(ThetaAtom.make({t(k + 1, c): 1, t(k, a): -1}))
        T = {t(k, a): 1 for a in range(1, k + 1)}
        hm = {"hbar": 1, ("mu", k + 1): 1, ("mu", k): -1}
        atoms.append(ThetaAtom.make(_merge(hm, T)))
        atoms.append(ThetaAtom.make(hm, -1))
        atoms.append(ThetaAtom.make(T, -1))
    # G_I(w, hbar, mu)
    atoms += [ThetaAtom.make({"hbar": 1})] * (non_inversions(I) + 1)
    Pi: dict = {}
    for j in range(1, n + 1):
        for k in range(j + 1, n + 1):
            if I[j] < I[k]:
                Pi = _merge(Pi, {("w", I[k]): 1, ("w", I[j]): -1})
    atoms.append(ThetaAtom.make(Pi))
    atoms.append(ThetaAtom.make(_merge(Pi, {"hbar": 1}), -1))
    for k in range(1, n):
        Wk = {("w", I[j]): 1 for j in range(1, k + 1)}
        hm = {"hbar": 1, ("mu", k + 1): 1, ("mu", k): -1}
        atoms.append(ThetaAtom.make(Wk))
        atoms.append(ThetaAtom.make(hm))
        atoms.append(ThetaAtom.make(_merge(Wk, hm), -1))
    # divide by E
    for k in range(1, n):
        for a in range(1, k + 1):
            for b in range(1, k + 1):
                atoms.append(ThetaAtom.make(_merge({"hbar": 1}, {t(k, b): 1}, {t(k, a): -1}), -1))
    return atoms


def _weight_to_symbols(w: SqrtMonomial) -> dict:
    """A character hbar^e prod u_i^m_i as a symbol-exponent dict."""
    out = {}
    if w.exps[1]:
        out["hbar"] = w.exps[1] // 2
    for i, m in enumerate(w.u_exponents(), start=1):
        if m:
            out[("u", i)] = m
    return out


def bundle_form_atoms(I: Perm) -> list[ThetaAtom]:
    """The line-bundle expression whose shifts W~_I(x, u, hbar, z) reproduces.

    Variables: Chern roots ("x", k, a), ("u", i), ("z", k), "hbar".
    """
    n = I.n
    x = lambda k, a: ("u", a) if k == n else ("x", k, a)
    ind = index_bundle(I, -1)
    atoms = [ThetaAtom.make({"hbar": 1})] * ind.rank()
    # Theta(T^{1/2} X) in Chern roots
    for i in range(1, n):
        for j in range(1, i + 1):
            for k in range(1, i + 2):
                atoms.append(ThetaAtom.make(_merge({x(i + 1, k): 1}, {x(i, j): -1})))
            for k in range(1, i + 1):
                atoms.append(ThetaAtom.make(_merge({x(i, k): 1}, {x(i, j): -1}), -1))
    det_ind = _weight_to_symbols(ind.det())
    atoms.append(ThetaAtom.make({"hbar": -1}))
    atoms.append(ThetaAtom.make(det_ind))
    atoms.append(ThetaAtom.make(_merge({"hbar": -1}, det_ind), -1))
    for k in range(1, n):
        L = {x(k, a): 1 for a in range(1, k + 1)}
        LI = _weight_to_symbols(line_restriction(k, I))
        z = {("z", k): 1}
        atoms += [
            ThetaAtom.make(_merge(z, L)),
            ThetaAtom.make(z, -1),
            ThetaAtom.make(L, -1),
            ThetaAtom.make(LI),
            ThetaAtom.make(z),
            ThetaAtom.make(_merge(LI, z), -1),
        ]
    return [a for a in atoms if a.exps]


def sample_chern_roots(params: ParamSet, seed: int = 0) -> dict[int, list]:
    """Generic square roots of Chern roots x^(k)_a as backend scalars."""
    import random
    from fractions import Fraction

    rng = random.Random(seed)
    # centre the roots on the geometric mean of the u_i so that the ratios
    # x/u stay as close to the unit circle as the parameters allow
    su = [abs(s) for s in params.sqrt_u]
    centre = Fraction(math.exp(sum(math.log(s) for s in su) / len(su))).limit_denominator(10**8)
    out = {}
    for k in range(1, params.n):
        out[k] = [
            params.scalar(centre * Fraction(rng.randint(500, 2000), 1000)) for _ in range(k)
        ]
    return out


@dataclass
class XPoint:
    """A point (x, u, z, hbar) in X-variables, all as square roots."""

    params: ParamSet
    sqrt_x: dict
    sqrt_u: list
    sqrt_z: list
    sqrt_hbar: object

    @classmethod
    def from_params(cls, params: ParamSet, seed: int = 0) -> "XPoint":
        n = params.n
        g = params.generators
        sz = [params.value(sqrt_z_monomial(n, i)) for i in range(1, n)]
        return cls(params, sample_chern_roots(params, seed), list(g[2 : 2 + n]), sz, g[1])

    def shifted(self, symbol) -> "XPoint":
        sq = self.params.generators[0]
        sx = {k: list(v) for k, v in self.sqrt_x.items()}
        su, sz, sh = list(self.sqrt_u), list(self.sqrt_z), self.sqrt_hbar
        if symbol == "hbar":
            sh = sh * sq
        elif symbol[0] == "x":
            sx[symbol[1]][symbol[2] - 1] *= sq
        elif symbol[0] == "u":
            su[symbol[1] - 1] *= sq
        elif symbol[0] == "z":
            sz[symbol[1] - 1] *= sq
        else:
            raise ValueError(f"unknown variable {symbol!r}")
        return XPoint(self.params, sx, su, sz, sh)

    def values(self) -> dict:
        out = {"hbar": self.sqrt_hbar}
        for k, v in self.sqrt_x.items():
            for a, s in enumerate(v, start=1):
                out[("x", k, a)] = s
        for i, s in enumerate(self.sqrt_u, start=1):
            out[("u", i)] = s
        for i, s in enumerate(self.sqrt_z, start=1):
            out[("z", i)] = s
        return out

    def weight_params(self) -> WeightFnParams:
        """t = 1/x, w = 1/u, mu_n = 1, mu_j/mu_{j+1} = hbar z_j."""
        n = self.params.n
        mu = [self.params.one] * n
        for j in range(n - 1, 0, -1):
            mu[j - 1] = mu[j] * self.sqrt_hbar * self.sqrt_z[j - 1]
        return WeightFnParams(
            self.params,
            tuple(1 / s for s in self.sqrt_u),
            tuple(mu),
            self.sqrt_hbar,
            {k: [1 / s for s in v] for k, v in self.sqrt_x.items()},
        )


def wtilde_at(I: Perm, point: XPoint):
    return weight_Wtilde(I, point.weight_params())


def argument_spread(wp: WeightFnParams) -> float:
    """Largest max(|x|, 1/|x|) over the theta arguments evaluated so far."""
    out = 1.0
    for s in wp._memo:
        a = float(abs(s)) ** 2
        if a:
            out = max(out, a, 1 / a)
    return out


def _shift_ratio(I: Perm, params: ParamSet, symbol, seed: int, adaptive: bool):
    p0 = XPoint.from_params(params, seed)
    p1 = p0.shifted(symbol)
    w0, w1 = p0.weight_params(), p1.weight_params()
    observed = weight_Wtilde(I, w1) / weight_Wtilde(I, w0)
    spread = max(argument_spread(w0), argument_spread(w1))
    N = params.theta_terms
    if adaptive:
        N = terms_for_spread(params, spread)
        if N != params.theta_terms:
            hi = params.replace(N=N)
            q0 = XPoint.from_params(hi, seed)
            q1 = q0.shifted(symbol)
            observed = wtilde_at(I, q1) / wtilde_at(I, q0)
            observed = params.scalar(observed) if params.backend_name == "exact" else observed
    return observed, p0, spread, N


def quasi_periodicity(I: Perm, params: ParamSet, symbol, seed: int = 0,
                      adaptive: bool = True) -> dict:
    """Compare W~_I(v -> q v)/W~_I with the predicted factor of the bundle form.

    ``symbol`` is ("x", k, a), ("u", i), ("z", k) or "hbar". The predicted
    factor is exact; the observed ratio carries theta truncation error of
    order spread*|q|^(N+1), so with ``adaptive`` the thetas get enough extra
    factors to keep that below |q|^N.
    """
    observed, p0, spread, N = _shift_ratio(I, params, symbol, seed, adaptive)
    predicted = predicted_shift(bundle_form_atoms(I), p0.values(), symbol, params)
    return {
        "observed": observed,
        "predicted": predicted,
        "residual": float(abs(observed / predicted - 1)),
        "spread": spread,
        "theta_terms_used": N,
    }


def _g_point(params: ParamSet, symbol, seed: int):
    p0 = XPoint.from_params(params, seed).weight_params()
    sq = params.generators[0]
    sh = p0.sqrt_hbar
    t = {k: list(v) for k, v in p0.sqrt_t.items()}
    w, mu = list(p0.sqrt_w), list(p0.sqrt_mu)
    if symbol == "hbar":
        sh = sh * sq
    elif symbol[0] == "t":
        t[symbol[1]][symbol[2] - 1] *= sq
    elif symbol[0] == "w":
        w[symbol[1] - 1] *= sq
    elif symbol[0] == "mu":
        mu[symbol[1] - 1] *= sq
    else:
        raise ValueError(f"unknown variable {symbol!r}")
    return p0, WeightFnParams(params, tuple(w), tuple(mu), sh, t)


def quasi_periodicity_g(I: Perm, params: ParamSet, symbol, seed: int = 0,
                        adaptive: bool = True) -> dict:
    """Same check in weight-function variables against G_I/E.

    ``symbol`` is ("t", k, a), ("w", i), ("mu", j) or "hbar". Under the hbar
    shift (mu fixed) the weight function as normalized here picks up an extra
    factor (-q^(-1/2)/hbar)^(sum_k k^2) relative to G_I/E, i.e. it follows G_I
    alone; the shifts of t, w and mu agree with G_I/E exactly.
    """
    p0, p1 = _g_point(params, symbol, seed)
    observed = weight_Wtilde(I, p1) / weight_Wtilde(I, p0)
    spread = max(argument_spread(p0), argument_spread(p1))
    N = terms_for_spread(params, spread) if adaptive else params.theta_terms
    if N != params.theta_terms:
        h0, h1 = _g_point(params.replace(N=N), symbol, seed)
        observed = weight_Wtilde(I, h1) / weight_Wtilde(I, h0)
    vals = {"hbar": p0.sqrt_hbar}
    for k, v in p0.sqrt_t.items():
        for a, s in enumerate(v, start=1):
            vals[("t", k, a)] = s
    for i, s in enumerate(p0.sqrt_w, start=1):
        vals[("w", i)] = s
    for j, s in enumerate(p0.sqrt_mu, start=1):
        vals[("mu", j)] = s
    predicted = predicted_shift(g_form_atoms(I), vals, symbol, params)
    return {
        "observed": observed,
        "predicted": predicted,
        "residual": float(abs(observed / predicted - 1)),
        "spread": spread,
        "theta_terms_used": N,
    }
