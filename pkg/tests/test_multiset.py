import math

import pytest
from hypothesis import given, strategies as st

from implicitdiff.multiset import (
    Multiset,
    PartVec,
    contains,
    format_multiset,
    index_permutations_fixing,
    mbinom,
    mdiff,
    mfact,
    msum,
    multinomial,
    multisets_of_size,
    parse_multiset,
    submultisets,
    tbinom,
)

mults3 = st.tuples(*[st.integers(0, 4)] * 3).map(Multiset)


def test_parse_both_notations():
    assert parse_multiset("1,1,3") == Multiset((2, 0, 1))
    assert parse_multiset("x1^2 x3") == Multiset((2, 0, 1))
    assert parse_multiset("1", 3) == Multiset((1, 0, 0))


def test_parse_empty_and_format():
    assert parse_multiset("{}", 2) == Multiset.empty(2)
    assert parse_multiset("", 2) == Multiset.empty(2)
    assert format_multiset(Multiset.empty(2)) == "{}"
    assert format_multiset(Multiset((2, 0, 1))) == "1,1,3"


@pytest.mark.parametrize("bad", ["1,a", "x0", "1,4", "y2"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_multiset(bad, 3)


def test_invariants():
    with pytest.raises(ValueError):
        Multiset((1, -1))
    with pytest.raises(ValueError):
        Multiset(())
    assert Multiset((1, 0)) != Multiset((1, 0, 0))
    assert len(Multiset((2, 0, 1))) == 3
    assert list(Multiset((2, 0, 1))) == [1, 1, 3]
    assert Multiset((2, 0, 1))[1] == 2
    assert 3 in Multiset((2, 0, 1)) and 2 not in Multiset((2, 0, 1))


def test_difference_requires_containment():
    with pytest.raises(ValueError):
        mdiff(Multiset((1, 0)), Multiset((0, 1)))
    with pytest.raises(ValueError):
        msum(Multiset((1,)), Multiset((1, 0)))


def test_binomials_and_factorials():
    J = Multiset((2, 1))
    assert mfact(J) == 2
    assert mbinom(J, Multiset((1, 1))) == 2
    assert mbinom(J, Multiset((0, 2))) == 0
    assert tbinom(3, Multiset((1, 1))) == 6
    assert tbinom(1, Multiset((1, 1))) == 0
    assert multinomial(2, [1, 1]) == 2
    assert multinomial(4, [1, 1]) == 12
    assert multinomial(1, [1, 1]) == 0


def test_enumerations():
    assert len(submultisets(Multiset((2, 1)))) == 6
    assert submultisets(Multiset((2, 1)))[0] == Multiset.empty(2)
    assert len(multisets_of_size(3, 3)) == 10
    assert len(index_permutations_fixing(Multiset((1, 1, 0)))) == 2
    assert len(index_permutations_fixing(Multiset((1, 1, 1)))) == 6


def test_partvec_order():
    a = PartVec(Multiset((1, 1)), 0)
    b = PartVec(Multiset((1, 0)), 1)
    assert a.weight() == b.weight() == 2
    assert sorted([b, a], key=PartVec.sort_key) == [a, b]


@given(mults3, mults3)
def test_sum_difference_roundtrip(a, b):
    s = a + b
    assert contains(s, a) and contains(s, b)
    assert s - b == a
    assert len(s) == len(a) + len(b)


@given(mults3)
def test_binomial_row_sum(J):
    # sum over K of binom(J, K) is 2^|J|
    assert sum(mbinom(J, K) for K in submultisets(J)) == 2 ** len(J)


@given(mults3)
def test_format_parse_roundtrip(m):
    assert parse_multiset(format_multiset(m), 3) == m


@given(st.integers(0, 6), mults3)
def test_tbinom_is_multinomial(t, K):
    expected = multinomial(t, K.mults)
    assert tbinom(t, K) == expected
    if t >= len(K):
        assert expected * mfact(K) * math.factorial(t - len(K)) == math.factorial(t)
