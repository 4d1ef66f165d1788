"""Acceptance checks, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line.  Under pytest the lines
are repeated in the terminal summary; running this file directly with
``python tests/test_acceptance.py`` prints them as they finish.
"""

import math
import random
import sys
import time
from fractions import Fraction

from implicitdiff.coefficients import (
    C_alpha,
    c_alpha,
    c_beta_recursive,
    count_ball_placements,
    indcomb_check,
    recursive_coefficients,
)
from implicitdiff.evaluator import (
    PolySystem,
    derivtable_from_poly,
    eval_formula,
    random_poly_system,
    series_derivative,
    series_implicit,
)
from implicitdiff.formula import (
    Formula,
    RawSymbol,
    delta_formula,
    expand_and_compare,
    raw_formula,
    zgamma_expected,
    zgamma_sum,
)
from implicitdiff.multiset import (
    index_permutations_fixing,
    multisets_of_size,
    parse_multiset,
)
from implicitdiff.oracle import formula_to_ratfunc, oracle_yI, trans_check
from implicitdiff.partitions import enumerate_A, enumerate_A_h, enumerate_B


REPORT_LINES = []


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    REPORT_LINES.append(line)
    print(line)
    sys.stdout.flush()
    return ok


def all_multisets(lo, hi, dims):
    for n in range(lo, hi + 1):
        yield from multisets_of_size(n, dims)


def criterion_1():
    start = time.perf_counter()
    checked, bad = 0, []
    for dims in (1, 2, 3):
        for I in all_multisets(2, 6, dims):
            checked += 1
            raw = raw_formula(I)
            if formula_to_ratfunc(raw, dims) != oracle_yI(I) or not expand_and_compare(I):
                bad.append((dims, str(I)))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 300
    return report(1, "master identity, N<=3, 2<=|I|<=6", ok,
                  f"{checked} multisets, {len(bad)} mismatches, {elapsed:.1f}s")


def _coef(fm, factors, p):
    ((mono, _),) = Formula.monomial(factors, p).terms.items()
    return fm.terms.get(mono, Fraction(0))


def criterion_2():
    def ms(text, n=4):
        return parse_multiset(text, n)

    def raw(H, t, n=4):
        return RawSymbol(ms(H, n), t)

    results = {}
    fm = raw_formula(ms("1,2"))
    results["a"] = (
        len(fm) == 4
        and _coef(fm, [(raw("1,2", 0), 1)], 1) == -1
        and _coef(fm, [(raw("1", 0), 1), (raw("2", 1), 1)], 2) == 1
        and _coef(fm, [(raw("2", 0), 1), (raw("1", 1), 1)], 2) == 1
        and _coef(fm, [(raw("1", 0), 1), (raw("2", 0), 1), (raw("{}", 2), 1)], 3) == -1
        and formula_to_ratfunc(fm * Formula.monomial([], -3), 4).is_polynomial()
    )
    coeffs = {I: sorted(c for _, c in delta_formula(ms(I))) for I in ("1,2,3", "1,1,2", "1,1,1")}
    results["b"] = coeffs == {"1,2,3": [-1, 1, 1, 1], "1,1,2": [-1, 1, 2], "1,1,1": [-1, 3]}

    # Group the size-four Delta-form by label-free shape: the orbits under
    # relabelling have sizes 4, 6, 3 and 6, and the last carries coefficient -2.
    I = ms("1,2,3,4")
    groups = {}
    for (factors, p), c in delta_formula(I):
        shape = tuple(sorted((len(s.J), s.r, e) for s, e in factors))
        groups.setdefault(shape, []).append(c)
    two_parts = [g for g in groups.values() if len(g) > 1]
    sizes = sorted(len(g) for g in two_parts)
    minus_two = [g for g in two_parts if set(g) == {-2}]
    results["c"] = (
        sizes == [3, 4, 6, 6]
        and len(minus_two) == 1 and len(minus_two[0]) == 6
        and sum(len(g) for g in groups.values()) == 20
    )
    fm = raw_formula(ms("1,1", 1))
    results["d"] = _coef(fm, [(raw("1", 0, 1), 1), (raw("1", 1, 1), 1)], 2) == 2
    ok = all(results.values())
    detail = ", ".join(f"{k}={'ok' if v else 'mismatch'}" for k, v in results.items())
    return report(2, "published constants reproduced exactly", ok, detail)


def criterion_3():
    start = time.perf_counter()
    rec_cases = ball_cases = 0
    bad = []
    for I in all_multisets(2, 5, 3):
        prior = recursive_coefficients(I)
        for k in range(1, 4):
            Ik = I.plus(k)
            for beta in enumerate_A(Ik):
                rec_cases += 1
                signed = c_alpha(beta, Ik)
                if c_beta_recursive(I, k, beta, prior) != signed or not indcomb_check(I, k, beta):
                    bad.append(("recursion", str(I), k, str(beta)))
        for a in enumerate_A(I):
            ball_cases += 1
            if count_ball_placements(a, I) != C_alpha(a, I):
                bad.append(("balls", str(I), str(a)))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 120
    return report(3, "closed form = recursion = four-term identity = ball counting", ok,
                  f"{rec_cases} recursion cases, {ball_cases} placement counts, "
                  f"{len(bad)} mismatches, {elapsed:.1f}s")


def criterion_4():
    bad = []
    count = 0
    for I in all_multisets(1, 6, 3):
        n = len(I)
        for g in enumerate_B(I):
            count += 1
            if not 1 <= g.g <= 2 * n - 1 or g.y_total() != g.g - 1:
                bad.append(str(g))
        for (factors, p), _ in raw_formula(I):
            g = sum(e for _, e in factors)
            if p != g or sum(s.r * e for s, e in factors) != g - 1:
                bad.append(("raw term", str(I)))
        if n < 2:
            continue
        for a in enumerate_A(I):
            count += 1
            if not 1 <= a.h <= n - 1:
                bad.append(str(a))
        for (factors, p), _ in delta_formula(I):
            if p != n + sum(e for _, e in factors):
                bad.append(("delta term", str(I)))
    four = parse_multiset("1,2,3,4", 4)
    shapes = {}
    for a in enumerate_A(four):
        shapes[a.shape()] = shapes.get(a.shape(), 0) + 1
    listing = sorted(shapes.values())
    levels = [len(enumerate_A_h(four, h)) for h in (1, 2, 3)]
    ok = not bad and len(enumerate_A(four)) == 20 and listing == [1, 3, 4, 6, 6] and levels == [1, 10, 9]
    return report(4, "structural bookkeeping", ok,
                  f"{count} elements checked, |A_I|={len(enumerate_A(four))} for a 4-set "
                  f"(shape counts {listing}), {len(bad)} violations")


def criterion_5():
    checked = skipped = 0
    bad = []
    for dims in (3, 4):
        for I in all_multisets(1, 4, dims):
            for g in enumerate_B(I):
                if sum(g.singleton_counts()) > g.g - 1:
                    # outside the identity's hypothesis; happens only for |I| = 1
                    skipped += 1
                    if len(I) != 1:
                        bad.append(("hypothesis", str(g)))
                    continue
                checked += 1
                if zgamma_sum(g) != zgamma_expected(g):
                    bad.append(str(g))
    ok = not bad and checked > 0
    return report(5, "Z_gamma sum equals the multinomial", ok,
                  f"{checked} elements, {skipped} outside the hypothesis (all |I|=1), "
                  f"{len(bad)} mismatches")


def criterion_6():
    start = time.perf_counter()
    p = PolySystem.parse("y^2 + x - 1", "0;1")
    tb = derivtable_from_poly(p, 2)
    I = parse_multiset("1,1", 1)
    exact = eval_formula(raw_formula(I), tb, exact=True)
    approx = eval_formula(raw_formula(I), tb)
    sqrt_ok = exact == Fraction(-1, 4) and math.isclose(approx, -0.25, rel_tol=1e-9)

    rng = random.Random(20261016)
    systems = 12
    compared = 0
    bad = []
    for trial in range(systems):
        dims = 1 + trial % 3
        q = random_poly_system(rng, dims, degree=3)
        coeffs = series_implicit(q, 4)
        table = derivtable_from_poly(q, 4)
        for J in all_multisets(1, 4, dims):
            compared += 1
            value = eval_formula(raw_formula(J), table, exact=True)
            if value != series_derivative(coeffs, J):
                bad.append((trial, str(J)))
            elif not math.isclose(eval_formula(raw_formula(J), table), float(value),
                                  rel_tol=1e-9, abs_tol=1e-12):
                bad.append((trial, str(J), "float"))
    elapsed = time.perf_counter() - start
    ok = sqrt_ok and not bad and elapsed < 60
    return report(6, "numeric end-to-end", ok,
                  f"y_xx={exact}, {systems} random systems, {compared} derivatives, "
                  f"{len(bad)} mismatches, {elapsed:.1f}s")


def criterion_7():
    bad = []
    perms = 0
    for I in all_multisets(2, 5, 3):
        d, r = delta_formula(I), raw_formula(I)
        for perm in index_permutations_fixing(I):
            perms += 1
            if d.relabeled(perm) != d or r.relabeled(perm) != r:
                bad.append(("perm", str(I), perm))
    r1 = raw_formula(parse_multiset("1", 3))
    for perm in index_permutations_fixing(parse_multiset("1", 3)):
        if r1.relabeled(perm) != r1:
            bad.append(("perm", "1", perm))

    rng = random.Random(7)
    shifts = 0
    for trial in range(9):
        dims = 1 + trial % 3
        p = random_poly_system(rng, dims)
        q = p.shifted(p.level_shift_lambda())
        tp, tq = derivtable_from_poly(p, 5), derivtable_from_poly(q, 5)
        for J in all_multisets(2, 5, dims):
            shifts += 1
            if eval_formula(raw_formula(J), tp, exact=True) != eval_formula(raw_formula(J), tq, exact=True):
                bad.append(("shift", trial, str(J)))
    symbolic = all(
        trans_check(J, r) for J in all_multisets(0, 4, 2) for r in range(3)
    )
    ok = not bad and symbolic
    return report(7, "permutation and linear-shift symmetry", ok,
                  f"{perms} relabelings, {shifts} shifted derivatives, "
                  f"symbolic shift check {'ok' if symbolic else 'failed'}, {len(bad)} mismatches")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


def test_criterion_1_master_identity():
    assert criterion_1()


def test_criterion_2_published_constants():
    assert criterion_2()


def test_criterion_3_coefficient_triangulation():
    assert criterion_3()


def test_criterion_4_structural_bookkeeping():
    assert criterion_4()


def test_criterion_5_zgamma_identity():
    assert criterion_5()


def test_criterion_6_numeric_end_to_end():
    assert criterion_6()


def test_criterion_7_symmetry():
    assert criterion_7()


if __name__ == "__main__":
    results = [check() for check in CRITERIA]
    sys.exit(0 if all(results) else 1)
