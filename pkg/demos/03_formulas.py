"""The two closed forms for y_I, and the expansion that links them."""

from implicitdiff.formula import (
    delta_formula,
    expand_all,
    fi_zero_formula,
    raw_formula,
    render,
)
from implicitdiff.multiset import parse_multiset

spacer = "_" * 60

I = parse_multiset("1,2")
print("y_ij in plain partials:")
print("  ", render(raw_formula(I), index_names="ij"))
print("and in Delta-expressions:")
print("  ", render(delta_formula(I), index_names="ij"))

print(spacer)

I = parse_multiset("1,2,3")
print("y_ijk, Delta-form:")
print("  ", render(delta_formula(I), index_names="ijk"))
print("raw form has", len(raw_formula(I)), "terms")
print("expanding every Delta gives the raw form exactly:",
      expand_all(delta_formula(I)) == raw_formula(I))

print(spacer)

I = parse_multiset("1,1,1", 1)
print("one variable, third derivative:")
print("  ", render(raw_formula(I), index_names="x"))

print(spacer)

I = parse_multiset("1,2,3,4")
print("where all first partials vanish, y_ijkl reduces to")
print("  ", render(fi_zero_formula(I), index_names="ijkl"))

print(spacer)

print("LaTeX output:")
print("  ", render(raw_formula(parse_multiset("1,1")), "latex", index_names="i"))
