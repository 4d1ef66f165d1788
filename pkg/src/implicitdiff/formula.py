"""Symbolic formulas for the derivatives ``y_I`` of an implicit function.

A :class:`Formula` is an exact-rational linear combination of monomials.  Each
monomial is a product of symbols raised to positive powers, divided by
``f_y^p``.  The ``f_y`` factor is never stored as a symbol: it lives only in
the integer ``p`` (negative ``p`` means a positive power of ``f_y``).

Two kinds of symbols occur:

* ``DeltaSymbol(J, r)`` for the combination ``Delta_J f_{y^r}``;
* ``RawSymbol(H, t)`` for the plain partial derivative ``f_{H y^t}``.

:func:`delta_formula` and :func:`raw_formula` build the two closed forms for
``y_I``; :func:`expand_delta` rewrites Delta-symbols in raw derivatives, so
:func:`expand_and_compare` can check the two against each other syntactically.
"""

from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple

from .coefficients import C_alpha, D_gamma
from .multiset import (
    Multiset,
    PartVec,
    format_multiset,
    mbinom,
    multinomial,
    parse_multiset,
    submultisets,
    tbinom,
)
from .partitions import Alpha, Gamma, enumerate_A, enumerate_B


class Symbol(NamedTuple):
    kind: str  # "delta" or "raw"
    J: Multiset
    r: int

    def order(self) -> int:
        """Highest total derivative order of ``f`` the symbol needs."""
        return len(self.J) + self.r

    def permuted(self, perm: tuple[int, ...]) -> Symbol:
        return Symbol(self.kind, self.J.permuted(perm), self.r)


def DeltaSymbol(J: Multiset, r: int) -> Symbol:
    return Symbol("delta", J, r)


def RawSymbol(H: Multiset, t: int) -> Symbol:
    return Symbol("raw", H, t)


@lru_cache(maxsize=None)
def _symbol_key(sym: Symbol) -> tuple:
    return (sym.kind != "delta", len(sym.J) + sym.r, sym.r, len(sym.J), tuple(sym.J))


def _is_fy(sym: Symbol) -> bool:
    return sym.kind == "raw" and sym.r == 1 and len(sym.J) == 0


Factors = tuple[tuple[Symbol, int], ...]
Monomial = tuple[Factors, int]


def _merge(a: Factors, b: Factors) -> Factors:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for sym, e in b:
        out[sym] = out.get(sym, 0) + e
    return tuple(sorted(out.items(), key=lambda it: _symbol_key(it[0])))


def _monomial_key(mono: Monomial) -> tuple:
    factors, p = mono
    return (p, tuple((_symbol_key(s), e) for s, e in factors))


class Formula:
    """Exact linear combination of monomials ``prod sym^e / f_y^p``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction | int] | None = None):
        self.terms: dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            if c:
                self.terms[mono] = Fraction(c)

    @classmethod
    def constant(cls, c: Fraction | int) -> Formula:
        return cls({((), 0): c})

    @classmethod
    def monomial(
        cls, factors: Iterable[tuple[Symbol, int]], fy_power: int = 0, coeff: Fraction | int = 1
    ) -> Formula:
        """Build one term; an ``f_y`` symbol among the factors moves into ``fy_power``."""
        merged: dict[Symbol, int] = {}
        for sym, e in factors:
            if e == 0:
                continue
            if _is_fy(sym):
                fy_power -= e
                continue
            merged[sym] = merged.get(sym, 0) + e
        key = tuple(sorted(merged.items(), key=lambda it: _symbol_key(it[0])))
        return cls({(key, fy_power): coeff})

    @classmethod
    def symbol(cls, sym: Symbol, exp: int = 1) -> Formula:
        return cls.monomial([(sym, exp)])

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Formula):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None  # mutable container semantics

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(sorted(self.terms.items(), key=lambda it: _monomial_key(it[0])))

    def __neg__(self) -> Formula:
        return Formula({m: -c for m, c in self.terms.items()})

    def __add__(self, other: Formula) -> Formula:
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Formula(out)

    def __sub__(self, other: Formula) -> Formula:
        return self + (-other)

    def __mul__(self, other: Formula | Fraction | int) -> Formula:
        if not isinstance(other, Formula):
            return Formula({m: c * other for m, c in self.terms.items()})
        out: dict[Monomial, Fraction] = {}
        for (fa, pa), ca in self.terms.items():
            for (fb, pb), cb in other.terms.items():
                key = (_merge(fa, fb), pa + pb)
                out[key] = out.get(key, 0) + ca * cb
        return Formula(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> Formula:
        if e < 0:
            raise ValueError("negative powers are not supported")
        out = Formula.constant(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __repr__(self) -> str:
        return f"Formula({render(self)!r})"

    def symbols(self) -> set[Symbol]:
        return {s for (factors, _), _c in self.terms.items() for s, _e in factors}

    def max_order(self) -> int:
        return max((s.order() for s in self.symbols()), default=1)

    def fy_powers(self) -> set[int]:
        return {p for (_, p) in self.terms}

    def substitute(self, fn: Callable[[Symbol], Formula | None]) -> Formula:
        """Replace each symbol ``s`` by ``fn(s)`` (``None`` keeps it as is)."""
        cache: dict[tuple[Symbol, int], Formula] = {}

        def power(sym: Symbol, e: int) -> Formula:
            key = (sym, e)
            if key not in cache:
                repl = fn(sym)
                cache[key] = (repl if repl is not None else Formula.symbol(sym)) ** e
            return cache[key]

        acc: dict[Monomial, Fraction] = {}
        for (factors, p), c in self.terms.items():
            term = Formula({((), p): c})
            for sym, e in factors:
                term = term * power(sym, e)
            for mono, tc in term.terms.items():
                acc[mono] = acc.get(mono, 0) + tc
        return Formula(acc)

    def relabeled(self, perm: tuple[int, ...]) -> Formula:
        acc: dict[Monomial, Fraction] = {}
        for (factors, p), c in self.terms.items():
            term = Formula.monomial([(s.permuted(perm), e) for s, e in factors], p, c)
            for mono, tc in term.terms.items():
                acc[mono] = acc.get(mono, 0) + tc
        return Formula(acc)

    def filtered(self, keep: Callable[[Factors, int], bool]) -> Formula:
        return Formula({m: c for m, c in self.terms.items() if keep(*m)})

    def to_structured(self) -> list[dict]:
        records = []
        for (factors, p), c in self:
            items = []
            for sym, e in factors:
                if sym.kind == "delta":
                    items.append({"J": format_multiset(sym.J), "r": sym.r, "exp": e})
                else:
                    items.append({"H": format_multiset(sym.J), "t": sym.r, "exp": e})
            records.append({"coefficient": _format_fraction(c), "fy_power": p, "factors": items})
        return records

    @classmethod
    def from_structured(cls, records: Iterable[Mapping], n_indices: int) -> Formula:
        out = Formula()
        for rec in records:
            factors = []
            for item in rec["factors"]:
                if "J" in item:
                    sym = DeltaSymbol(parse_multiset(item["J"], n_indices), int(item["r"]))
                else:
                    sym = RawSymbol(parse_multiset(item["H"], n_indices), int(item["t"]))
                factors.append((sym, int(item["exp"])))
            out = out + Formula.monomial(factors, int(rec["fy_power"]), Fraction(rec["coefficient"]))
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_structured(), **kwargs)


def _format_fraction(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def _sum_terms(parts: Iterable[Formula]) -> Formula:
    acc: dict[Monomial, Fraction] = {}
    for part in parts:
        for mono, c in part.terms.items():
            acc[mono] = acc.get(mono, 0) + c
    return Formula(acc)


# --- the two closed forms ----------------------------------------------------


def alpha_term(a: Alpha, I: Multiset) -> Formula:
    """The summand of the Delta-form belonging to one element of ``A_I``."""
    factors = [(DeltaSymbol(J, r), m) for (J, r), m in a]
    return Formula.monomial(factors, len(I) + a.h, (-1) ** a.h * C_alpha(a, I))


def gamma_term(c: Gamma, I: Multiset) -> Formula:
    """The summand of the raw form belonging to one element of ``B_I``."""
    factors = [(RawSymbol(H, t), s) for (H, t), s in c]
    return Formula.monomial(factors, c.g, (-1) ** c.g * D_gamma(c, I))


def delta_formula(I: Multiset) -> Formula:
    """``y_I`` as a combination of products of Delta-expressions."""
    if len(I) < 2:
        raise ValueError(f"the Delta-form needs |I| >= 2, got |I|={len(I)}")
    return _sum_terms(alpha_term(a, I) for a in enumerate_A(I))


def raw_formula(I: Multiset) -> Formula:
    """``y_I`` as a combination of products of plain partials ``f_{H y^t}``."""
    if len(I) < 1:
        raise ValueError("y_I is undefined for the empty multiset")
    return _sum_terms(gamma_term(c, I) for c in enumerate_B(I))


def fi_zero_formula(I: Multiset) -> Formula:
    """``y_I`` at a point where every first partial ``f_i`` vanishes.

    Each Delta-expression collapses to ``f_{J y^r} f_y^{|J|}``, and the ``f_y^n``
    this produces cancels against the denominator, leaving ``f_y^h``.
    """
    if len(I) < 2:
        raise ValueError(f"needs |I| >= 2, got |I|={len(I)}")
    out = Formula()
    for a in enumerate_A(I):
        factors = [(RawSymbol(J, r), m) for (J, r), m in a]
        out = out + Formula.monomial(factors, a.h, (-1) ** a.h * C_alpha(a, I))
    return out


def drop_first_derivatives(fm: Formula) -> Formula:
    """Keep only monomials free of every ``f_i`` (raw ``[{i}; 0]``)."""

    def keep(factors: Factors, _p: int) -> bool:
        return not any(s.kind == "raw" and s.r == 0 and len(s.J) == 1 for s, _ in factors)

    return fm.filtered(keep)


# --- Delta -> raw expansion --------------------------------------------------


@lru_cache(maxsize=None)
def _expand_delta_cached(J: Multiset, base: PartVec) -> Formula:
    N = J.n_indices
    out = Formula()
    for K in submultisets(J):
        k = len(K)
        target = RawSymbol(base.J + (J - K), base.r + k)
        factors = [(target, 1)]
        factors.extend((RawSymbol(Multiset.unit(i, N), 0), kappa) for i, kappa in enumerate(K.mults, 1))
        out = out + Formula.monomial(factors, -(len(J) - k), (-1) ** k * mbinom(J, K))
    return out


def expand_delta(d: Symbol, of: PartVec | None = None) -> Formula:
    """Expand ``Delta_J g`` in raw partials, with no denominator.

    By default ``g = f_{y^r}`` for the symbol ``Delta_J f_{y^r}``.  Passing
    ``of=[G; s]`` expands ``Delta_J`` applied to ``g = f_{G y^s}`` instead
    (then ``d.r`` is ignored).
    """
    if d.kind != "delta":
        raise ValueError(f"{d} is not a Delta symbol")
    base = of if of is not None else PartVec(Multiset.empty(d.J.n_indices), d.r)
    return _expand_delta_cached(d.J, PartVec(base[0], base[1]))


def _delta_to_raw(sym: Symbol) -> Formula | None:
    return expand_delta(sym) if sym.kind == "delta" else None


def expand_all(fm: Formula) -> Formula:
    """Replace every Delta-symbol by its raw expansion."""
    return fm.substitute(_delta_to_raw)


def expand_and_compare(I: Multiset) -> bool:
    """Delta-form, expanded and normalised, is syntactically the raw form."""
    return expand_all(delta_formula(I)) == raw_formula(I)


# --- the Z_gamma collections -------------------------------------------------

QCollection = tuple[tuple[PartVec, Multiset, int], ...]


def _zgamma_check(g: Gamma) -> tuple[tuple[int, ...], int]:
    singles = g.singleton_counts()
    g_minus_1 = sum(pv.r * s for pv, s in g.heavy_parts())
    if sum(singles) > g_minus_1:
        raise ValueError(
            f"{g}: sum of singleton counts {sum(singles)} exceeds g-1={g_minus_1}"
        )
    return singles, g_minus_1


def zgamma_enumerate(g: Gamma) -> list[QCollection]:
    """All ways to spread the singleton counts over the boxes of the heavy parts.

    A collection assigns to each of the ``s_{H,t}`` boxes of part ``[H; t]`` a
    multiset ``K`` with ``|K| <= t``; ``q_{H,t,K}`` counts the boxes given
    ``K``.  The ``K``'s must add up to ``(s_{1,0}, ..., s_{N,0})``.
    """
    singles, _ = _zgamma_check(g)
    heavy = g.heavy_parts()
    budget_ms = Multiset(singles)
    found: list[QCollection] = []
    chosen: list[tuple[PartVec, Multiset, int]] = []

    def rec(idx: int, budget: Multiset):
        if idx == len(heavy):
            if len(budget) == 0:
                found.append(tuple(chosen))
            return
        pv, s = heavy[idx]
        options = [K for K in submultisets(budget) if len(K) <= pv.r]
        for combo in itertools.combinations_with_replacement(range(len(options)), s):
            used = Multiset.empty(budget.n_indices)
            counts: dict[int, int] = {}
            for o in combo:
                used = used + options[o]
                counts[o] = counts.get(o, 0) + 1
            if any(u > b for u, b in zip(used.mults, budget.mults)):
                continue
            mark = len(chosen)
            chosen.extend((pv, options[o], q) for o, q in sorted(counts.items()))
            rec(idx + 1, budget - used)
            del chosen[mark:]

    rec(0, budget_ms)
    return found


def zgamma_weight(g: Gamma, q: QCollection) -> int:
    """``prod s_{H,t}! * prod binom(t, K)^q / q!`` for one collection."""
    num = 1
    for _pv, s in g.heavy_parts():
        num *= math.factorial(s)
    den = 1
    for pv, K, count in q:
        num *= tbinom(pv.r, K) ** count
        den *= math.factorial(count)
    quotient, rem = divmod(num, den)
    if rem:
        raise ArithmeticError("non-integral Z_gamma weight")
    return quotient


def zgamma_sum(g: Gamma) -> int:
    return sum(zgamma_weight(g, q) for q in zgamma_enumerate(g))


def zgamma_expected(g: Gamma) -> int:
    """The multinomial ``(g-1)! / (prod s_{i,0}! (g-1-sum s_{i,0})!)``."""
    singles, g_minus_1 = _zgamma_check(g)
    return multinomial(g_minus_1, singles)


# --- rendering ---------------------------------------------------------------


def _index_text(J: Multiset, names: str | None) -> str:
    if names is None:
        return "".join(str(i) for i in J)
    return "".join(names[i - 1] for i in J)


def _y_text(t: int, latex: bool) -> str:
    if t <= 3:
        return "y" * t
    return f"y^{{{t}}}" if latex else f"y^{t}"


def _symbol_text(sym: Symbol, latex: bool, names: str | None) -> str:
    idx = _index_text(sym.J, names)
    y = _y_text(sym.r, latex)
    if sym.kind == "raw" or len(sym.J) == 0:
        sub = idx + y
        return f"f_{{{sub}}}" if sub else "f"
    delta = "\\Delta" if latex else "Δ"
    tail = f"f_{{{y}}}" if y else "f"
    return f"{delta}_{{{idx}}}{tail}"


def _power_text(base: str, e: int, latex: bool) -> str:
    if e == 1:
        return base
    return f"{base}^{{{e}}}" if latex else f"{base}^{e}"


def render(fm: Formula, style: str = "plain", index_names: str | None = None) -> str:
    """Deterministic text for a formula (``style`` is ``"plain"`` or ``"latex"``).

    ``index_names`` maps index ``i`` to ``index_names[i-1]``; e.g. ``"ijk"``.
    """
    if style not in ("plain", "latex"):
        raise ValueError(f"unknown render style {style!r}")
    latex = style == "latex"
    if not fm:
        return "0"
    pieces = []
    for (factors, p), c in fm:
        syms = [_power_text(_symbol_text(s, latex, index_names), e, latex) for s, e in factors]
        if p < 0:
            syms.append(_power_text("f_y", -p, latex))
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if latex:
            num = " ".join(syms) if syms else "1"
            coef = "" if mag == 1 else (
                str(mag) if mag.denominator == 1 else f"\\frac{{{mag.numerator}}}{{{mag.denominator}}}"
            )
            body = f"\\frac{{{num}}}{{{_power_text('f_y', p, True)}}}" if p > 0 else num
            pieces.append((sign, f"{coef}{body}" if not coef or p > 0 else f"{coef} {body}"))
        else:
            num = "(" + " ".join(syms) + ")" if syms else "(1)"
            coef = "" if mag == 1 else f"{mag}*"
            den = f"/{_power_text('f_y', p, False)}" if p > 0 else ""
            pieces.append((sign, f"{coef}{num}{den}"))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, text in pieces[1:]:
        out += f" {sign} {text}"
    return out
