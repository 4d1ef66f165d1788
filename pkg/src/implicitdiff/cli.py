"""Command-line interface: ``python -m implicitdiff <command> ...``.

Exit status is 0 on success, 1 when a verification fails and 2 for usage
errors (bad flags, malformed multisets, polynomials or tables).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Sequence

from .coefficients import coefficient_table
from .evaluator import (
    EPS_FY,
    EvaluationError,
    PolySystem,
    derivtable_from_poly,
    eval_formula,
    infer_dims,
    read_table,
)
from .formula import (
    delta_formula,
    expand_and_compare,
    fi_zero_formula,
    raw_formula,
    render,
)
from .multiset import format_multiset, multisets_of_size, parse_multiset
from .oracle import denfree_check, master_check
from .partitions import enumerate_A, enumerate_B

FORMS = {"delta": delta_formula, "raw": raw_formula, "fizero": fi_zero_formula}


class UsageError(Exception):
    pass


def _multiset(text: str, dims: int | None):
    try:
        I = parse_multiset(text, dims)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if len(I) == 0:
        raise UsageError("the derivative multi-index must be non-empty")
    return I


def _build(form: str, I):
    try:
        return FORMS[form](I)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_formula(args) -> int:
    I = _multiset(args.order, args.dims)
    fm = _build(args.form, I)
    if args.render == "structured":
        print(json.dumps(fm.to_structured(), indent=2))
    else:
        print(render(fm, args.render, args.names))
    return 0


def _items(I, which: str):
    try:
        return enumerate_A(I) if which == "A" else enumerate_B(I)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_enumerate(args) -> int:
    I = _multiset(args.order, args.dims)
    items = _items(I, args.set)
    if args.format == "structured":
        print(json.dumps([it.to_records() for it in items], indent=2))
    else:
        for it in items:
            print(it)
        print(f"# {len(items)} elements")
    return 0


def cmd_coeffs(args) -> int:
    I = _multiset(args.order, args.dims)
    rows = coefficient_table(_items(I, args.set), I)
    parts_name = "h" if args.set == "A" else "g"
    if args.format == "structured":
        out = [
            {"parts": it.to_records(), parts_name: n, "unsigned": u, "signed": s}
            for it, n, u, s in rows
        ]
        print(json.dumps(out, indent=2))
        return 0
    labels = [str(it) for it, *_ in rows]
    width = max([len(lab) for lab in labels] + [7])
    print(f"{'element':<{width}}  {parts_name:>3}  {'unsigned':>9}  {'signed':>9}")
    for lab, (_, n, u, s) in zip(labels, rows):
        print(f"{lab:<{width}}  {n:>3}  {u:>9}  {s:>9}")
    return 0


def cmd_eval(args) -> int:
    if (args.poly is None) == (args.table is None):
        raise UsageError("give exactly one of --poly/--point or --table")
    try:
        if args.poly is not None:
            if args.point is None:
                raise UsageError("--poly needs --point")
            dims = args.dims or max(infer_dims(args.poly), infer_dims("x" + args.order.replace(",", " x")))
            I = _multiset(args.order, dims)
            table = derivtable_from_poly(PolySystem.parse(args.poly, args.point, dims), len(I))
        else:
            table = read_table(args.table, args.eps_fy)
            I = _multiset(args.order, table.dims)
        value = eval_formula(_build(args.form, I), table, exact=args.exact)
    except (EvaluationError, OSError) as exc:
        raise UsageError(str(exc)) from None
    print(value)
    return 0


def cmd_verify(args) -> int:
    if args.max_order < 1 or args.dims < 1:
        raise UsageError("--max-order and --dims must be positive")
    failures = 0
    start = time.perf_counter()
    for n in range(1, args.max_order + 1):
        for I in multisets_of_size(n, args.dims):
            t0 = time.perf_counter()
            checks = {"oracle": master_check(I), "denfree": denfree_check(I)}
            if n >= 2:
                checks["delta"] = expand_and_compare(I)
            ok = all(checks.values())
            failures += not ok
            detail = " ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in checks.items())
            print(f"I={format_multiset(I):<14} {'pass' if ok else 'FAIL'}  {detail}  "
                  f"{time.perf_counter() - t0:.3f}s")
    total = time.perf_counter() - start
    if failures:
        print(f"{failures} multi-indices failed ({total:.1f}s)")
        return 1
    print(f"all identities hold ({total:.1f}s)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="implicitdiff",
        description="Exact formulas for higher partial derivatives of implicit functions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def order_flags(p):
        p.add_argument("--order", required=True, help="multi-index I, e.g. 1,1,3")
        p.add_argument("--dims", type=int, default=None, help="number N of x-variables")

    p = sub.add_parser("formula", help="print y_I as a formula")
    order_flags(p)
    p.add_argument("--form", choices=sorted(FORMS), default="raw")
    p.add_argument("--render", choices=["plain", "latex", "structured"], default="plain")
    p.add_argument("--names", default=None, help="letters for indices 1..N, e.g. ijk")
    p.set_defaults(func=cmd_formula)

    for name, func, helptext in (
        ("coeffs", cmd_coeffs, "tabulate the coefficients"),
        ("enumerate", cmd_enumerate, "list the partition elements"),
    ):
        p = sub.add_parser(name, help=helptext)
        order_flags(p)
        p.add_argument("--set", choices=["A", "B"], default="A",
                       help="A: Delta-form index set, B: raw-form index set")
        p.add_argument("--format", choices=["text", "structured"], default="text")
        p.set_defaults(func=func)

    p = sub.add_parser("eval", help="evaluate y_I at a point")
    order_flags(p)
    p.add_argument("--poly", help="polynomial f in x1..xN (or x) and y")
    p.add_argument("--point", help="base point 'x1,...,xN;y'")
    p.add_argument("--table", help="derivative table file")
    p.add_argument("--form", choices=sorted(FORMS), default="raw")
    p.add_argument("--exact", action="store_true", help="print an exact rational")
    p.add_argument("--eps-fy", type=float, default=EPS_FY)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="check the formulas against the chain-rule oracle")
    p.add_argument("--max-order", type=int, required=True)
    p.add_argument("--dims", type=int, required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"implicitdiff {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
