"""Evaluating y_I at a point, and cross-checking against a power-series solve."""

import random

from implicitdiff.evaluator import (
    PolySystem,
    derivtable_from_poly,
    eval_formula,
    random_poly_system,
    series_derivative,
    series_implicit,
)
from implicitdiff.formula import raw_formula
from implicitdiff.multiset import multisets_of_size, parse_multiset

spacer = "_" * 60

p = PolySystem.parse("y^2 + x - 1", "0;1")
print("f = y^2 + x - 1 at (0, 1), so y = sqrt(1 - x)")
table = derivtable_from_poly(p, 4)
coeffs = series_implicit(p, 4)
for n in range(1, 5):
    I = parse_multiset(",".join(["1"] * n), 1)
    exact = eval_formula(raw_formula(I), table, exact=True)
    print(f"  d^{n}y/dx^{n} = {str(exact):>8}   float {eval_formula(raw_formula(I), table):+.6f}"
          f"   series {series_derivative(coeffs, I)}")

print(spacer)

print("The derivative table, as it would be written to a file:")
print(derivtable_from_poly(p, 2).to_text())

print(spacer)

rng = random.Random(11)
q = random_poly_system(rng, 2)
print("random system with coefficients", {e: str(c) for e, c in q.coeffs.items()})
print("base point", tuple(str(c) for c in q.point))
table = derivtable_from_poly(q, 3)
coeffs = series_implicit(q, 3)
for I in multisets_of_size(2, 2) + multisets_of_size(3, 2):
    value = eval_formula(raw_formula(I), table, exact=True)
    print(f"  y_{I}: formula {value}, series {series_derivative(coeffs, I)}")

print(spacer)

shifted = q.shifted(q.level_shift_lambda())
t2 = derivtable_from_poly(shifted, 3)
I = parse_multiset("1,2", 2)
print("after z = y - lambda.x the first x-partials vanish:",
      [str(t2.value(parse_multiset(str(i), 2), 0)) for i in (1, 2)])
print("and y_12 is unchanged:",
      eval_formula(raw_formula(I), table, exact=True) == eval_formula(raw_formula(I), t2, exact=True))
