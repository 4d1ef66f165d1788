import itertools

import pytest
from hypothesis import given, settings, strategies as st

from implicitdiff.formula import Formula, RawSymbol, delta_formula, raw_formula
from implicitdiff.multiset import Multiset, multisets_of_size, parse_multiset
from implicitdiff.oracle import (
    Poly,
    RatFunc,
    chain_diff,
    delta_relation_check,
    denfree_P,
    derDelta_check,
    formula_to_ratfunc,
    fvar,
    master_check,
    oracle_yI,
    trans_check,
)


def ms(text, n=3):
    return parse_multiset(text, n)


def f(H, t, n=3):
    return Poly.var(fvar(ms(H, n), t))


def rf(poly, den=None):
    return RatFunc(poly, den)


def test_ratfunc_normalisation():
    a = rf(f("1", 0) * f("{}", 1) * 2, f("{}", 1) ** 3 * 4)
    b = rf(f("1", 0), f("{}", 1) ** 2 * 2)
    assert a == b
    assert a.num == b.num and a.den == b.den
    with pytest.raises(ZeroDivisionError):
        RatFunc(f("1", 0), Poly())
    assert RatFunc(Poly()).is_polynomial()


def test_chain_diff_of_first_partial():
    fy = f("{}", 1)
    expected = rf(f("1,2", 0) * fy - f("1", 1) * f("2", 0), fy)
    assert chain_diff(rf(f("1", 0)), 2) == expected


def test_chain_diff_of_fy():
    fy = f("{}", 1)
    expected = rf(f("2", 1) * fy - f("{}", 2) * f("2", 0), fy)
    assert chain_diff(rf(fy), 2) == expected


def test_chain_diff_of_constant():
    assert chain_diff(RatFunc.const(5), 1, 3) == RatFunc.const(0)


def test_chain_diff_commutes():
    e = rf(f("1", 1) * f("2", 0) + f("{}", 2), f("{}", 1) ** 2)
    assert chain_diff(chain_diff(e, 1), 3) == chain_diff(chain_diff(e, 3), 1)


def test_oracle_order_two_is_raw_formula():
    assert oracle_yI(ms("1,2")) == formula_to_ratfunc(raw_formula(ms("1,2")), 3)
    with pytest.raises(ValueError):
        oracle_yI(Multiset.empty(3))


def test_oracle_order_three_matches_delta_form():
    I = ms("1,2,3")
    assert oracle_yI(I) == formula_to_ratfunc(delta_formula(I), 3)


def test_oracle_is_order_independent():
    I = ms("1,1,2,3")
    ref = oracle_yI(I)
    for seq in set(itertools.permutations(tuple(I))):
        assert oracle_yI(I, seq) == ref
    with pytest.raises(ValueError):
        oracle_yI(I, (1, 2, 3))


def test_denfree_base_and_order_two():
    assert denfree_P(ms("1")) == -f("1", 0)
    numerator = formula_to_ratfunc(raw_formula(ms("1,2")) * Formula.monomial([], -3), 3)
    assert numerator.is_polynomial()
    assert denfree_P(ms("1,2")) == numerator.num


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_denfree_is_polynomial_and_agrees(n):
    for I in multisets_of_size(n, 3):
        P = denfree_P(I)
        fy = f("{}", 1)
        assert RatFunc(P, fy ** (2 * n - 1)) == oracle_yI(I)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_master_identity_small(n):
    for I in multisets_of_size(n, 2):
        assert master_check(I)


def test_trans_check_cases():
    assert trans_check(ms("{}"), 3)
    assert trans_check(ms("1"), 1)
    for n in range(5):
        for J in multisets_of_size(n, 2):
            for r in range(3):
                assert trans_check(J, r)


def test_derDelta_cases():
    assert derDelta_check(ms("{}"), 0, 2)
    assert derDelta_check(ms("1"), 0, 2)
    assert derDelta_check(ms("1,1"), 1, 1)
    for n in range(4):
        for J in multisets_of_size(n, 2):
            for r in range(3):
                for k in (1, 2):
                    assert derDelta_check(J, r, k)


def test_delta_relation():
    for n in range(5):
        for J in multisets_of_size(n, 2):
            for j in (1, 2):
                assert delta_relation_check(J, j, 0)
                assert delta_relation_check(J, j, 1)


def test_formula_to_ratfunc_handles_positive_fy_powers():
    fm = Formula.monomial([(RawSymbol(ms("1"), 0), 1)], -2)
    assert formula_to_ratfunc(fm, 3) == rf(f("1", 0) * f("{}", 1) ** 2)


multisets = st.lists(st.integers(1, 3), min_size=2, max_size=4).map(
    lambda xs: Multiset.from_indices(xs, 3)
)


@settings(max_examples=25, deadline=None)
@given(multisets, st.data())
def test_oracle_any_order(I, data):
    seq = data.draw(st.permutations(tuple(I)))
    assert oracle_yI(I, tuple(seq)) == formula_to_ratfunc(raw_formula(I), 3)
