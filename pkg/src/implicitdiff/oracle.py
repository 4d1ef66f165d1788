"""Independent chain-rule oracle over exact rational functions.

The indeterminates are the partials ``f_{H y^t}`` at the solution, keyed by
``(H.mults, t)``.  Nothing here uses the closed forms: ``y_I`` is obtained by
differentiating ``-f_i / f_y`` along the implicit solution, where each
indeterminate obeys

    d/dx_k f_{H y^t} = f_{(H+k) y^t} - f_{H y^(t+1)} * f_k / f_y.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Mapping

from .formula import Formula, Symbol, expand_delta, DeltaSymbol
from .multiset import Multiset, PartVec

Var = tuple[tuple[int, ...], int]
Mono = tuple[tuple[Var, int], ...]


def _mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for v, e in b:
        out[v] = out.get(v, 0) + e
    return tuple(sorted(out.items()))


class Poly:
    """Sparse polynomial with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Mono, Fraction | int] | None = None):
        self.terms: dict[Mono, Fraction] = {m: Fraction(c) for m, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, c: Fraction | int) -> Poly:
        return cls({(): c})

    @classmethod
    def var(cls, v: Var, e: int = 1) -> Poly:
        return cls({((v, e),): 1}) if e else cls.const(1)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    __hash__ = None

    def __add__(self, other: Poly) -> Poly:
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    def __neg__(self) -> Poly:
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly | Fraction | int) -> Poly:
        if not isinstance(other, Poly):
            return Poly({m: c * other for m, c in self.terms.items()})
        out: dict[Mono, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                key = _mono_mul(ma, mb)
                out[key] = out.get(key, 0) + ca * cb
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> Poly:
        return reduce(lambda acc, _: acc * self, range(e), Poly.const(1))

    def variables(self) -> set[Var]:
        return {v for m in self.terms for v, _ in m}

    def partial(self, v: Var) -> Poly:
        out: dict[Mono, Fraction] = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(v, 0)
            if not e:
                continue
            if e == 1:
                del d[v]
            else:
                d[v] = e - 1
            key = tuple(sorted(d.items()))
            out[key] = out.get(key, 0) + c * e
        return Poly(out)

    def monomial_gcd(self) -> Mono:
        monos = list(self.terms)
        if not monos:
            return ()
        common = dict(monos[0])
        for m in monos[1:]:
            d = dict(m)
            common = {v: min(e, d[v]) for v, e in common.items() if v in d}
        return tuple(sorted((v, e) for v, e in common.items() if e))

    def divide_monomial(self, mono: Mono) -> Poly:
        if not mono:
            return self
        out = {}
        for m, c in self.terms.items():
            d = dict(m)
            for v, e in mono:
                d[v] -= e
            out[tuple(sorted((v, e) for v, e in d.items() if e))] = c
        return Poly(out)

    def content(self) -> Fraction:
        """Positive rational whose quotient has coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        nums = [c.numerator for c in self.terms.values()]
        dens = [c.denominator for c in self.terms.values()]
        g = reduce(math.gcd, nums)
        lcm = reduce(lambda a, b: a * b // math.gcd(a, b), dens)
        return Fraction(abs(g), lcm)

    def leading(self) -> tuple[Mono, Fraction]:
        m = max(self.terms)
        return m, self.terms[m]

    def __repr__(self) -> str:
        return f"Poly({len(self.terms)} terms)"


def fvar(H: Multiset, t: int) -> Var:
    return (H.mults, t)


def _fy(n_indices: int) -> Var:
    return ((0,) * n_indices, 1)


def _unit(k: int, n_indices: int) -> tuple[int, ...]:
    return tuple(int(i == k - 1) for i in range(n_indices))


class RatFunc:
    """``num / den``, kept with the monomial gcd and content divided out.

    The leading denominator coefficient is normalised to 1.  Equality is by
    cross-multiplication, so no polynomial gcd is ever needed.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        den = den if den is not None else Poly.const(1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = num, Poly.const(1)
            return
        den_gcd = dict(den.monomial_gcd())
        g_mono = tuple(
            (v, min(e, den_gcd[v])) for v, e in num.monomial_gcd() if v in den_gcd
        )
        num, den = num.divide_monomial(g_mono), den.divide_monomial(g_mono)
        cn, cd = num.content(), den.content()
        num, den = num * (1 / cn), den * (1 / cd)
        _, lead = den.leading()
        scale = cn / cd / lead
        self.num, self.den = num * scale, den * (1 / lead)

    @classmethod
    def const(cls, c: Fraction | int) -> RatFunc:
        return cls(Poly.const(c))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    __hash__ = None

    def __add__(self, other: RatFunc) -> RatFunc:
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> RatFunc:
        return RatFunc(-self.num, self.den)

    def __sub__(self, other: RatFunc) -> RatFunc:
        return self + (-other)

    def __mul__(self, other: RatFunc | Fraction | int) -> RatFunc:
        if not isinstance(other, RatFunc):
            return RatFunc(self.num * other, self.den)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: RatFunc) -> RatFunc:
        return RatFunc(self.num * other.den, self.den * other.num)

    def is_polynomial(self) -> bool:
        return self.den == Poly.const(1)

    def __repr__(self) -> str:
        return f"RatFunc({self.num!r} / {self.den!r})"


def _split_derivative(p: Poly, k: int) -> tuple[Poly, Poly]:
    """``(A, B)`` with ``d_k p = A - B f_k / f_y``."""
    a, b = Poly(), Poly()
    for v in p.variables():
        H, t = v
        dp = p.partial(v)
        raised = list(H)
        raised[k - 1] += 1
        a = a + dp * Poly.var((tuple(raised), t))
        b = b + dp * Poly.var((H, t + 1))
    return a, b


def _n_indices(p: Poly, fallback: int) -> int:
    for v in p.variables():
        return len(v[0])
    return fallback


def chain_diff(e: RatFunc, k: int, n_indices: int | None = None) -> RatFunc:
    """Total derivative in ``x_k`` along the implicit solution ``y(x)``."""
    N = n_indices or _n_indices(e.num, 0) or _n_indices(e.den, 0)
    if not N:
        return RatFunc.const(0)
    fy = Poly.var(_fy(N))
    fk = Poly.var((_unit(k, N), 0))
    an, bn = _split_derivative(e.num, k)
    ad, bd = _split_derivative(e.den, k)
    d_num = an * fy - bn * fk
    d_den = ad * fy - bd * fk
    return RatFunc(d_num * e.den - e.num * d_den, fy * e.den * e.den)


def poly_chain_diff_times_fy(p: Poly, k: int, n_indices: int) -> Poly:
    """``f_y * d_k p``, which is again a polynomial."""
    a, b = _split_derivative(p, k)
    return a * Poly.var(_fy(n_indices)) - b * Poly.var((_unit(k, n_indices), 0))


def _consumption_order(I: Multiset, order: tuple[int, ...] | None) -> tuple[int, ...]:
    if len(I) == 0:
        raise ValueError("y_I is undefined for the empty multiset")
    seq = tuple(I) if order is None else tuple(order)
    if Multiset.from_indices(seq, I.n_indices) != I:
        raise ValueError(f"order {seq} does not list the indices of {I}")
    return seq


@lru_cache(maxsize=None)
def _y_along(seq: tuple[int, ...], N: int) -> RatFunc:
    if len(seq) == 1:
        return RatFunc(-Poly.var((_unit(seq[0], N), 0)), Poly.var(_fy(N)))
    return chain_diff(_y_along(seq[:-1], N), seq[-1], N)


def oracle_yI(I: Multiset, order: tuple[int, ...] | None = None) -> RatFunc:
    """``y_I`` by repeated chain-rule differentiation of ``y_i = -f_i / f_y``.

    ``order`` fixes the sequence in which indices are consumed; the default
    is increasing index order.
    """
    return _y_along(_consumption_order(I, order), I.n_indices)


@lru_cache(maxsize=None)
def _P_along(seq: tuple[int, ...], N: int) -> Poly:
    if len(seq) == 1:
        return -Poly.var((_unit(seq[0], N), 0))
    prev = _P_along(seq[:-1], N)
    n = len(seq) - 1
    j = seq[-1]
    fy = Poly.var(_fy(N))
    delta_j_fy = Poly.var((_unit(j, N), 1)) * fy - Poly.var(((0,) * N, 2)) * Poly.var((_unit(j, N), 0))
    return fy * poly_chain_diff_times_fy(prev, j, N) - delta_j_fy * prev * (2 * n - 1)


def denfree_P(I: Multiset, order: tuple[int, ...] | None = None) -> Poly:
    """``f_y^(2n-1) y_I`` via the polynomial recursion, never dividing."""
    return _P_along(_consumption_order(I, order), I.n_indices)


def denfree_check(I: Multiset) -> bool:
    fy = Poly.var(_fy(I.n_indices))
    return RatFunc(denfree_P(I), fy ** (2 * len(I) - 1)) == oracle_yI(I)


# --- conversions from Formula ------------------------------------------------


def _raw_poly(sym: Symbol) -> Poly:
    return Poly.var((sym.J.mults, sym.r))


def formula_to_ratfunc(fm: Formula, n_indices: int) -> RatFunc:
    """Evaluate a formula indeterminate-for-indeterminate (Delta-symbols expanded)."""
    fy = Poly.var(_fy(n_indices))
    cache: dict[Symbol, Poly] = {}

    def sym_poly(sym: Symbol) -> Poly:
        if sym not in cache:
            if sym.kind == "delta":
                cache[sym] = formula_to_ratfunc(expand_delta(sym), n_indices).num
            else:
                cache[sym] = _raw_poly(sym)
        return cache[sym]

    terms = list(fm.terms.items())
    if not terms:
        return RatFunc.const(0)
    top = max(p for (_, p), _ in terms)
    shift = max(top, 0)
    num = Poly()
    for (factors, p), c in terms:
        term = Poly.const(c) * fy ** (shift - p)
        for sym, e in factors:
            term = term * sym_poly(sym) ** e
        num = num + term
    return RatFunc(num, fy ** shift)


def master_check(I: Multiset) -> bool:
    """The raw closed form agrees with the chain-rule oracle."""
    from .formula import raw_formula

    return formula_to_ratfunc(raw_formula(I), I.n_indices) == oracle_yI(I)


# --- the linear change of the dependent variable ------------------------------


def shifted_partial(J: Multiset, r: int) -> dict[tuple[Var, tuple[int, ...]], int]:
    """``phi_{J z^r}`` for ``phi(x, z) = f(x, z + lambda . x)`` with symbolic ``lambda``.

    Returns ``{((H, t), kappa): coeff}`` meaning ``coeff * f_{H y^t} * lambda^kappa``,
    obtained by applying ``D_i f_{H y^t} = f_{(H+i) y^t} + lambda_i f_{H y^(t+1)}``
    once per index of ``J``.
    """
    N = J.n_indices
    state = {(((0,) * N, r), (0,) * N): 1}
    for i in J:
        nxt: dict = {}
        for ((H, t), kappa), c in state.items():
            up = list(H)
            up[i - 1] += 1
            k1 = ((tuple(up), t), kappa)
            lam = list(kappa)
            lam[i - 1] += 1
            k2 = ((H, t + 1), tuple(lam))
            nxt[k1] = nxt.get(k1, 0) + c
            nxt[k2] = nxt.get(k2, 0) + c
        state = nxt
    return state


def trans_check(J: Multiset, r: int) -> bool:
    """``phi_{J z^r}`` at ``lambda_i = -f_i/f_y`` equals ``Delta_J f_{y^r} / f_y^|J|``."""
    N = J.n_indices
    fy = Poly.var(_fy(N))
    n = len(J)
    num = Poly()
    for ((H, t), kappa), c in shifted_partial(J, r).items():
        term = Poly.var((H, t)) * c * fy ** (n - sum(kappa))
        for i, e in enumerate(kappa, start=1):
            term = term * (-Poly.var((_unit(i, N), 0))) ** e
        num = num + term
    lhs = RatFunc(num, fy ** n)
    rhs = formula_to_ratfunc(expand_delta(DeltaSymbol(J, r)), N) / RatFunc(fy ** n)
    return lhs == rhs


# --- derivative of a Delta-expression ----------------------------------------


def _delta_poly(J: Multiset, base: PartVec) -> Poly:
    return formula_to_ratfunc(expand_delta(DeltaSymbol(J, base.r), of=base), J.n_indices).num


def derDelta_check(J: Multiset, r: int, k: int) -> bool:
    """``f_y^2 d_k Delta_J g`` matches the three-term right-hand side, ``g = f_{y^r}``."""
    N = J.n_indices
    empty = Multiset.empty(N)
    g = PartVec(empty, r)
    g_y = PartVec(empty, r + 1)
    fy = Poly.var(_fy(N))
    lhs = fy * poly_chain_diff_times_fy(_delta_poly(J, g), k, N)
    unit_k = Multiset.unit(k, N)
    rhs = fy * _delta_poly(J.plus(k), g)
    rhs = rhs + _delta_poly(unit_k, PartVec(empty, 1)) * _delta_poly(J, g) * len(J)
    for j in range(1, N + 1):
        if J[j]:
            pair = Multiset.unit(j, N).plus(k)
            rhs = rhs - _delta_poly(pair, PartVec(empty, 0)) * _delta_poly(J.minus(j), g_y) * J[j]
    return lhs == rhs


def delta_relation_check(J: Multiset, j: int, r: int = 0) -> bool:
    """``Delta_{J+j} g = f_y Delta_J g_j - f_j Delta_J g_y`` with ``g = f_{y^r}``."""
    N = J.n_indices
    empty = Multiset.empty(N)
    fy = Poly.var(_fy(N))
    fj = Poly.var((_unit(j, N), 0))
    lhs = _delta_poly(J.plus(j), PartVec(empty, r))
    rhs = fy * _delta_poly(J, PartVec(Multiset.unit(j, N), r)) - fj * _delta_poly(J, PartVec(empty, r + 1))
    return lhs == rhs
