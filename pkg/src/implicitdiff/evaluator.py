"""Numeric evaluation of derivative formulas.

A :class:`DerivTable` holds the values ``f_{H y^t}`` at a base point.  Tables
come from files or from a :class:`PolySystem`, whose partials are exact.
:func:`series_implicit` solves ``f(x, y(x)) = 0`` as a truncated power series
with Newton's method, giving a second route to ``y_I`` that never touches the
formulas.
"""

from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .formula import Formula, Symbol, expand_delta
from .multiset import Multiset, format_multiset, mfact, multisets_of_size, parse_multiset

EPS_FY = 1e-12

Number = Union[Fraction, float]


class EvaluationError(ValueError):
    """Raised for incomplete tables, vanishing ``f_y`` or bad inputs."""


# --- derivative tables -------------------------------------------------------


@dataclass(frozen=True)
class DerivTable:
    dims: int
    point: tuple[Fraction, ...]
    entries: Mapping[tuple[Multiset, int], Number]
    order: int
    eps_fy: float = EPS_FY

    def __post_init__(self):
        if len(self.point) != self.dims + 1:
            raise EvaluationError(f"point needs {self.dims + 1} coordinates, got {len(self.point)}")
        for n in range(1, self.order + 1):
            for t in range(n + 1):
                for H in multisets_of_size(n - t, self.dims):
                    if (H, t) not in self.entries:
                        raise EvaluationError(
                            f"table declared to order {self.order} lacks H={format_multiset(H)} t={t}"
                        )
        fy = self.fy()
        if abs(fy) < self.eps_fy:
            raise EvaluationError(f"|f_y| = {abs(float(fy))} is below {self.eps_fy}")

    def fy(self) -> Number:
        key = (Multiset.empty(self.dims), 1)
        if key not in self.entries:
            raise EvaluationError("table has no f_y entry")
        return self.entries[key]

    def value(self, H: Multiset, t: int) -> Number:
        try:
            return self.entries[(H, t)]
        except KeyError:
            raise EvaluationError(f"missing entry H={format_multiset(H)} t={t}") from None

    def to_text(self) -> str:
        point = ",".join(_fmt_number(c) for c in self.point[:-1]) + ";" + _fmt_number(self.point[-1])
        lines = [f"dims={self.dims} point={point} order={self.order}"]
        for (H, t), v in sorted(self.entries.items(), key=lambda it: (len(it[0][0]) + it[0][1], it[0][1], it[0][0].mults)):
            lines.append(f"H={format_multiset(H)} t={t} v={_fmt_number(v)}")
        return "\n".join(lines) + "\n"


def _fmt_number(v: Number) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(v)


def _parse_number(text: str) -> Number:
    try:
        if "/" in text or re.fullmatch(r"[+-]?\d+", text):
            return Fraction(text)
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise EvaluationError(f"bad number {text!r}") from None


def parse_point(text: str, dims: int) -> tuple[Fraction, ...]:
    """``"x1,...,xN;y"``, e.g. ``"0;1"`` for one variable."""
    if text.count(";") != 1:
        raise EvaluationError(f"point {text!r} must look like 'x1,...,xN;y'")
    xs, y = text.split(";")
    coords = [c.strip() for c in xs.split(",")] if xs.strip() else []
    if len(coords) != dims:
        raise EvaluationError(f"point {text!r} has {len(coords)} x-coordinates, expected {dims}")
    try:
        return tuple(Fraction(c) for c in coords + [y.strip()])
    except ValueError:
        raise EvaluationError(f"bad coordinate in point {text!r}") from None


def _fields(line: str, allowed: set[str], lineno: int) -> dict[str, str]:
    out = {}
    for tok in line.split():
        if "=" not in tok:
            raise EvaluationError(f"line {lineno}: expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        if key not in allowed:
            raise EvaluationError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise EvaluationError(f"line {lineno}: duplicate key {key!r}")
        out[key] = val
    missing = allowed - out.keys()
    if missing:
        raise EvaluationError(f"line {lineno}: missing {', '.join(sorted(missing))}")
    return out


def parse_table(text: str, eps_fy: float = EPS_FY) -> DerivTable:
    """Read the text format: a header line then one ``H= t= v=`` record per line."""
    lines = [
        (n, ln.split("#", 1)[0].strip()) for n, ln in enumerate(text.splitlines(), start=1)
    ]
    lines = [(n, ln) for n, ln in lines if ln]
    if not lines:
        raise EvaluationError("empty derivative table")
    n0, header = lines[0]
    head = _fields(header, {"dims", "point", "order"}, n0)
    try:
        dims, order = int(head["dims"]), int(head["order"])
    except ValueError:
        raise EvaluationError(f"line {n0}: dims and order must be integers") from None
    point = parse_point(head["point"], dims)
    entries: dict[tuple[Multiset, int], Number] = {}
    for n, ln in lines[1:]:
        rec = _fields(ln, {"H", "t", "v"}, n)
        try:
            key = (parse_multiset(rec["H"], dims), int(rec["t"]))
        except ValueError as exc:
            raise EvaluationError(f"line {n}: {exc}") from None
        if key in entries:
            raise EvaluationError(f"line {n}: duplicate entry H={rec['H']} t={rec['t']}")
        entries[key] = _parse_number(rec["v"])
    return DerivTable(dims, point, entries, order, eps_fy)


def read_table(path: str, eps_fy: float = EPS_FY) -> DerivTable:
    with open(path, encoding="utf-8") as fh:
        return parse_table(fh.read(), eps_fy)


def eval_formula(fm: Formula, tb: DerivTable, exact: bool = False) -> Number:
    """Sum of ``coeff * prod values / f_y^p``; rational when ``exact`` is set."""
    conv = (lambda v: v if isinstance(v, Fraction) else Fraction(v)) if exact else float
    fy = conv(tb.fy())
    cache: dict[Symbol, Number] = {}

    def value(sym: Symbol) -> Number:
        if sym not in cache:
            if sym.kind == "delta":
                cache[sym] = eval_formula(expand_delta(sym), tb, exact)
            else:
                cache[sym] = conv(tb.value(sym.J, sym.r))
        return cache[sym]

    total = conv(0)
    for (factors, p), c in fm.terms.items():
        term = conv(c)
        for sym, e in factors:
            term *= value(sym) ** e
        total += term / fy**p if p >= 0 else term * fy ** (-p)
    return total


# --- polynomial systems ------------------------------------------------------

Exps = tuple[int, ...]
PolyDict = dict[Exps, Fraction]


def _padd(a: PolyDict, b: PolyDict) -> PolyDict:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def _pmul(a: PolyDict, b: PolyDict) -> PolyDict:
    out: PolyDict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def _ppow(a: PolyDict, n: int, width: int) -> PolyDict:
    out: PolyDict = {(0,) * width: Fraction(1)}
    for _ in range(n):
        out = _pmul(out, a)
    return out


def _compose(poly: PolyDict, images: list[PolyDict], width: int) -> PolyDict:
    """Substitute ``images[v]`` for variable ``v`` in ``poly``."""
    out: PolyDict = {}
    powers: dict[tuple[int, int], PolyDict] = {}
    for exps, c in poly.items():
        term: PolyDict = {(0,) * width: c}
        for v, e in enumerate(exps):
            if e:
                if (v, e) not in powers:
                    powers[(v, e)] = _ppow(images[v], e, width)
                term = _pmul(term, powers[(v, e)])
        out = _padd(out, term)
    return out


_VAR = re.compile(r"^x(\d+)$")


class _PolyBuilder(ast.NodeVisitor):
    def __init__(self, dims: int):
        self.dims = dims
        self.width = dims + 1

    def const(self, c: Fraction) -> PolyDict:
        return {(0,) * self.width: c} if c else {}

    def visit_Expression(self, node):
        return self.visit(node.body)

    def visit_Constant(self, node):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise EvaluationError(f"unsupported constant {node.value!r}")
        return self.const(Fraction(str(node.value)))

    def visit_Name(self, node):
        name = node.id
        if name == "y":
            slot = self.dims
        elif name == "x" and self.dims == 1:
            slot = 0
        else:
            match = _VAR.match(name)
            if not match or not 1 <= int(match.group(1)) <= self.dims:
                raise EvaluationError(f"unknown variable {name!r} for dims={self.dims}")
            slot = int(match.group(1)) - 1
        exps = [0] * self.width
        exps[slot] = 1
        return {tuple(exps): Fraction(1)}

    def visit_UnaryOp(self, node):
        val = self.visit(node.operand)
        if isinstance(node.op, ast.USub):
            return {e: -c for e, c in val.items()}
        if isinstance(node.op, ast.UAdd):
            return val
        raise EvaluationError("unsupported unary operator")

    def visit_BinOp(self, node):
        left, right = self.visit(node.left), self.visit(node.right)
        if isinstance(node.op, ast.Add):
            return _padd(left, right)
        if isinstance(node.op, ast.Sub):
            return _padd(left, {e: -c for e, c in right.items()})
        if isinstance(node.op, ast.Mult):
            return _pmul(left, right)
        if isinstance(node.op, ast.Div):
            if any(any(e) for e in right) or not right:
                raise EvaluationError("division is only allowed by nonzero constants")
            return {e: c / right[(0,) * self.width] for e, c in left.items()}
        if isinstance(node.op, ast.Pow):
            if any(any(e) for e in right) or len(right) > 1:
                raise EvaluationError("exponents must be constants")
            n = right.get((0,) * self.width, Fraction(0))
            if n.denominator != 1 or n < 0:
                raise EvaluationError("exponents must be non-negative integers")
            return _ppow(left, int(n), self.width)
        raise EvaluationError("unsupported operator")

    def generic_visit(self, node):
        raise EvaluationError(f"unsupported syntax: {type(node).__name__}")


def infer_dims(text: str) -> int:
    found = [int(m) for m in re.findall(r"x(\d+)", text)]
    return max(found, default=1)


def parse_poly(text: str, dims: int | None = None) -> PolyDict:
    """Parse e.g. ``"y^2 + x1 - 1"`` into ``{exponents: coefficient}``."""
    dims = dims or infer_dims(text)
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise EvaluationError(f"cannot parse polynomial {text!r}: {exc.msg}") from None
    return _PolyBuilder(dims).visit(tree)


@dataclass(frozen=True)
class PolySystem:
    """``f(x_1, ..., x_N, y)`` with rational coefficients and a base point where ``f = 0``."""

    dims: int
    coeffs: Mapping[Exps, Fraction]
    point: tuple[Fraction, ...]
    local: PolyDict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.point) != self.dims + 1:
            raise EvaluationError(f"point needs {self.dims + 1} coordinates")
        width = self.dims + 1
        images = []
        for v in range(width):
            unit = tuple(int(i == v) for i in range(width))
            images.append(_padd({unit: Fraction(1)}, {(0,) * width: Fraction(self.point[v])}))
        local = _compose(dict(self.coeffs), images, width)
        object.__setattr__(self, "local", local)
        value = local.get((0,) * width, Fraction(0))
        if value:
            raise EvaluationError(f"f = {value} at the base point, not 0")
        fy = local.get(tuple(int(i == self.dims) for i in range(width)), Fraction(0))
        if not fy:
            raise EvaluationError("f_y vanishes at the base point")

    @classmethod
    def parse(cls, text: str, point: str, dims: int | None = None) -> PolySystem:
        dims = dims or infer_dims(text)
        return cls(dims, parse_poly(text, dims), parse_point(point, dims))

    def partial(self, H: Multiset, t: int) -> Fraction:
        """Exact ``f_{H y^t}`` at the base point."""
        c = self.local.get(H.mults + (t,), Fraction(0))
        return c * mfact(H) * math.factorial(t)

    def shifted(self, lam: Iterable[Fraction]) -> PolySystem:
        """``phi(x, z) = f(x, z + lam . x)`` at the matching base point."""
        lam = [Fraction(v) for v in lam]
        width = self.dims + 1
        images = []
        for v in range(width):
            images.append({tuple(int(i == v) for i in range(width)): Fraction(1)})
        y_image = dict(images[self.dims])
        for i, l in enumerate(lam):
            y_image = _padd(y_image, {tuple(int(k == i) for k in range(width)): l})
        images[self.dims] = y_image
        coeffs = _compose(dict(self.coeffs), images, width)
        z0 = self.point[-1] - sum(l * x for l, x in zip(lam, self.point[:-1]))
        return PolySystem(self.dims, coeffs, self.point[:-1] + (z0,))

    def level_shift_lambda(self) -> tuple[Fraction, ...]:
        """``lambda_i = -f_i / f_y``, the shift that kills the first x-partials."""
        fy = self.partial(Multiset.empty(self.dims), 1)
        return tuple(-self.partial(Multiset.unit(i, self.dims), 0) / fy for i in range(1, self.dims + 1))


def derivtable_from_poly(p: PolySystem, order: int) -> DerivTable:
    if order < 1:
        raise EvaluationError("order must be at least 1")
    entries = {}
    for n in range(order + 1):
        for t in range(n + 1):
            for H in multisets_of_size(n - t, p.dims):
                entries[(H, t)] = p.partial(H, t)
    return DerivTable(p.dims, p.point, entries, order)


# --- truncated power series ---------------------------------------------------

Series = dict[Exps, Fraction]


def _truncate(s: Series, order: int) -> Series:
    return {e: c for e, c in s.items() if c and sum(e) <= order}


def _smul(a: Series, b: Series, order: int) -> Series:
    out: Series = {}
    for ea, ca in a.items():
        da = sum(ea)
        for eb, cb in b.items():
            if da + sum(eb) > order:
                continue
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def _sadd(a: Series, b: Series, scale: Fraction = Fraction(1)) -> Series:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + scale * c
    return {e: c for e, c in out.items() if c}


def _sinv(a: Series, dims: int, order: int) -> Series:
    zero = (0,) * dims
    a0 = a.get(zero, Fraction(0))
    if not a0:
        raise EvaluationError("series has no constant term to invert")
    inv: Series = {zero: 1 / a0}
    prec = 1
    while prec <= order:
        prec *= 2
        # inv <- inv * (2 - a * inv)
        err = _sadd({zero: Fraction(2)}, _smul(a, inv, order), Fraction(-1))
        inv = _smul(inv, err, order)
    return inv


def _eval_in_y(local: PolyDict, dims: int, v: Series, order: int, dy: bool) -> Series:
    """``F(u, v(u))`` or, with ``dy``, ``F_y(u, v(u))`` as a truncated series."""
    by_t: dict[int, Series] = {}
    for exps, c in local.items():
        t = exps[-1]
        if dy:
            if t == 0:
                continue
            c, t = c * t, t - 1
        u = exps[:-1]
        if sum(u) > order:
            continue
        by_t.setdefault(t, {})
        by_t[t][u] = by_t[t].get(u, 0) + c
    out: Series = {}
    for t in range(max(by_t, default=-1), -1, -1):
        out = _sadd(_smul(out, v, order), by_t.get(t, {}))
    return _truncate(out, order)


def series_implicit(p: PolySystem, order: int) -> dict[Multiset, Fraction]:
    """Taylor coefficients of ``y(x) - y0`` up to total degree ``order``, exactly.

    ``y_I = I! * coefficient[I]``.  Newton's method on truncated series
    doubles the number of correct degrees each step.
    """
    if order < 1:
        raise EvaluationError("order must be at least 1")
    dims = p.dims
    v: Series = {}
    prec = 1
    while True:
        F = _eval_in_y(p.local, dims, v, order, dy=False)
        Fy = _eval_in_y(p.local, dims, v, order, dy=True)
        v = _sadd(v, _smul(F, _sinv(Fy, dims, order), order), Fraction(-1))
        if prec > order:
            break
        prec *= 2
    residual = _eval_in_y(p.local, dims, v, order, dy=False)
    if residual:
        raise ArithmeticError("power-series solve did not converge")
    return {Multiset(e): c for e, c in sorted(v.items()) if sum(e) >= 1}


def series_derivative(coeffs: Mapping[Multiset, Fraction], I: Multiset) -> Fraction:
    """``y_I`` read off the series: ``I!`` times the coefficient of ``x^I``."""
    return mfact(I) * coeffs.get(I, Fraction(0))


def random_poly_system(rng, dims: int, degree: int = 3, n_terms: int = 5) -> PolySystem:
    """A sparse random test problem with small rational coefficients.

    ``rng`` is a :class:`random.Random`.  The constant term is chosen so that
    ``f`` vanishes at a random integer base point, and a nonzero ``y`` term
    keeps ``f_y`` away from zero there; the draw is repeated otherwise.
    """
    width = dims + 1
    while True:
        coeffs: PolyDict = {}
        for _ in range(n_terms):
            exps = [0] * width
            for _ in range(rng.randint(1, degree)):
                exps[rng.randrange(width)] += 1
            coeffs[tuple(exps)] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        y_unit = tuple(int(i == dims) for i in range(width))
        coeffs[y_unit] = coeffs.get(y_unit, 0) + rng.choice([-3, -2, -1, 1, 2, 3])
        point = tuple(Fraction(rng.randint(-2, 2)) for _ in range(width))
        value = sum(
            c * math.prod(x**e for x, e in zip(point, exps)) for exps, c in coeffs.items()
        )
        zero = (0,) * width
        coeffs[zero] = coeffs.get(zero, 0) - value
        try:
            return PolySystem(dims, {e: Fraction(c) for e, c in coeffs.items() if c}, point)
        except EvaluationError:
            continue
