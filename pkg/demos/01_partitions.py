"""Which products of partials can appear in y_I, and how many of them there are."""

from implicitdiff.multiset import parse_multiset
from implicitdiff.partitions import enumerate_A, enumerate_A_h, enumerate_B

spacer = "_" * 60

I = parse_multiset("1,2,3,4")
print("I =", I)
print("Delta-form index set, grouped by number of parts h:")
for h in range(1, len(I)):
    elements = enumerate_A_h(I, h)
    print(f"  h={h}: {len(elements)} elements")
    for a in elements[:3]:
        print("     ", a)
    if len(elements) > 3:
        print("      ...")
print("total:", len(enumerate_A(I)))

print(spacer)

print("Repeated indices shrink the sets, since relabeled parts coincide:")
for text in ("1,2,3", "1,1,2", "1,1,1"):
    J = parse_multiset(text)
    print(f"  I={text:<6} |A_I|={len(enumerate_A(J)):<3} |B_I|={len(enumerate_B(J))}")

print(spacer)

print("The raw-form set also allows bare first partials [i;0]:")
for g in enumerate_B(parse_multiset("1,2")):
    print(f"  g={g.g}  {g}")
