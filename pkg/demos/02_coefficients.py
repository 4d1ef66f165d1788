"""Coefficients three ways: closed form, recursion on |I|, and counting balls in boxes."""

from implicitdiff.coefficients import (
    C_alpha,
    collapse_decomposition,
    count_ball_placements,
    recursive_coefficients,
)
from implicitdiff.multiset import parse_multiset
from implicitdiff.partitions import enumerate_A

spacer = "_" * 60

I = parse_multiset("1,1,2,3")
recursive = recursive_coefficients(I)
print(f"I = {I}: closed form, recursion and ball counting side by side")
print(f"{'element':<36} {'C':>3} {'rec':>4} {'balls':>5}")
for a in enumerate_A(I):
    print(f"{str(a):<36} {C_alpha(a, I):>3} {recursive[a]:>4} {count_ball_placements(a, I):>5}")
print("the recursion carries the sign (-1)^h")

print(spacer)

print("Splitting coefficients into the distinct-index value and a collapse count:")
for text in ("1,2,3,4", "1,1,2,2"):
    J = parse_multiset(text)
    print(f"I = {J}")
    for a in enumerate_A(J)[:6]:
        fundamental, collapse = collapse_decomposition(a, J)
        print(f"  {str(a):<34} {fundamental} x {collapse} = {C_alpha(a, J)}")
