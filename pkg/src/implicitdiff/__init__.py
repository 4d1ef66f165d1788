"""Exact higher-order partial derivatives of implicitly defined functions.

For ``f(x_1, ..., x_N, y) = 0`` with ``f_y != 0``, :func:`raw_formula` and
:func:`delta_formula` give ``y_I`` for any multi-index ``I`` as an exact
combination of partials of ``f``.  :mod:`implicitdiff.oracle` re-derives the
same values by brute-force chain rule, and :mod:`implicitdiff.evaluator`
evaluates formulas on numeric derivative tables.
"""

from .coefficients import C_alpha, D_gamma, c_alpha, d_gamma
from .evaluator import DerivTable, PolySystem, derivtable_from_poly, eval_formula, series_implicit
from .formula import (
    DeltaSymbol,
    Formula,
    RawSymbol,
    delta_formula,
    expand_and_compare,
    expand_delta,
    fi_zero_formula,
    raw_formula,
    render,
)
from .multiset import Multiset, PartVec, parse_multiset
from .partitions import Alpha, Gamma, enumerate_A, enumerate_B

__all__ = [
    "Alpha",
    "C_alpha",
    "D_gamma",
    "DeltaSymbol",
    "DerivTable",
    "Formula",
    "Gamma",
    "Multiset",
    "PartVec",
    "PolySystem",
    "RawSymbol",
    "c_alpha",
    "d_gamma",
    "delta_formula",
    "derivtable_from_poly",
    "enumerate_A",
    "enumerate_B",
    "eval_formula",
    "expand_and_compare",
    "expand_delta",
    "fi_zero_formula",
    "parse_multiset",
    "raw_formula",
    "render",
    "series_implicit",
]
