"""Checking the closed forms against brute-force chain-rule differentiation."""

import time

from implicitdiff.formula import raw_formula
from implicitdiff.multiset import multisets_of_size, parse_multiset
from implicitdiff.oracle import (
    derDelta_check,
    denfree_P,
    formula_to_ratfunc,
    oracle_yI,
    trans_check,
)

spacer = "_" * 60

I = parse_multiset("1,2", 2)
y = oracle_yI(I)
print("oracle y_12 numerator terms:", len(y.num.terms), " denominator:", y.den.terms)
print("matches the raw closed form:", y == formula_to_ratfunc(raw_formula(I), 2))

print(spacer)

print("The polynomial recursion never divides; P_I has this many terms:")
for text in ("1", "1,2", "1,2,2", "1,1,2,2"):
    print(f"  I={text:<8} {len(denfree_P(parse_multiset(text, 2)).terms)}")

print(spacer)

print("Sweep over N=2, |I| <= 5:")
start = time.perf_counter()
count = 0
for n in range(1, 6):
    for J in multisets_of_size(n, 2):
        assert oracle_yI(J) == formula_to_ratfunc(raw_formula(J), 2)
        count += 1
print(f"  {count} multi-indices agree ({time.perf_counter() - start:.2f}s)")

print(spacer)

print("Derivative of a Delta-expression along the solution:",
      all(derDelta_check(J, r, k) for J in multisets_of_size(2, 2) for r in (0, 1) for k in (1, 2)))
print("Shift y -> z + lambda.x with lambda_i = -f_i/f_y:",
      all(trans_check(J, r) for J in multisets_of_size(3, 2) for r in (0, 1, 2)))
