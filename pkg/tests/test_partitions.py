import pytest
from hypothesis import given, settings, strategies as st

from implicitdiff.multiset import Multiset, PartVec, parse_multiset
from implicitdiff.partitions import (
    Alpha,
    Gamma,
    enumerate_A,
    enumerate_A_h,
    enumerate_B,
    enumerate_B_g,
    from_tilde,
    to_tilde,
)


def ms(text, n=3):
    return parse_multiset(text, n)


@pytest.mark.parametrize(
    "I, size_a, size_b",
    [
        ("1,2", 1, 4),
        ("1,1", 1, 3),
        ("1,2,3", 4, 21),
        ("1,1,2", 3, 15),
        ("1,1,1", 2, 9),
        ("1,2,3,4", 20, 129),
    ],
)
def test_set_sizes(I, size_a, size_b):
    I = ms(I, 4)
    assert len(enumerate_A(I)) == size_a
    assert len(enumerate_B(I)) == size_b


def test_size_four_levels():
    # one element with one part, then 4 + 6 with two parts, then 3 + 6 with three
    I = ms("1,2,3,4", 4)
    assert [len(enumerate_A_h(I, h)) for h in (1, 2, 3)] == [1, 10, 9]


def test_singleton_B():
    (only,) = enumerate_B(ms("1", 1))
    assert only == Gamma(((PartVec(ms("1", 1), 0), 1),))
    with pytest.raises(ValueError):
        enumerate_A(ms("1", 1))
    with pytest.raises(ValueError):
        enumerate_B(Multiset.empty(2))


def test_level_ranges_checked():
    with pytest.raises(ValueError):
        enumerate_A_h(ms("1,2"), 2)
    with pytest.raises(ValueError):
        enumerate_B_g(ms("1,2"), 4)


def test_key_validation():
    with pytest.raises(ValueError):
        Alpha(((PartVec(ms("1"), 0), 1),))
    with pytest.raises(ValueError):
        Gamma(((PartVec(Multiset.empty(3), 1), 1),))
    with pytest.raises(ValueError):
        Alpha(())


def test_records_roundtrip_and_text():
    for a in enumerate_A(ms("1,1,2")):
        assert Alpha.from_records(a.to_records(), 3) == a
    a = enumerate_A(ms("1,1,1", 1))[1]
    assert str(a) == "{[1,1;0]^1, [1;1]^1}"


def test_tilde_bijection():
    I = ms("1,2,3,4", 4)
    for a in enumerate_A(I):
        t = to_tilde(a, I)
        assert t.num_parts() == len(I) - 1
        assert from_tilde(t) == a


multisets = st.lists(st.integers(1, 3), min_size=2, max_size=5).map(
    lambda xs: Multiset.from_indices(xs, 3)
)


@settings(max_examples=40, deadline=None)
@given(multisets)
def test_A_elements_valid_and_unique(I):
    items = enumerate_A(I)
    assert len(set(items)) == len(items)
    n = len(I)
    for a in items:
        assert a.is_valid_for(I)
        assert 1 <= a.h <= n - 1
        assert all(pv.weight() >= 2 for pv, _ in a)
    assert items == sorted(items, key=lambda x: x.sort_key())


@settings(max_examples=40, deadline=None)
@given(multisets)
def test_B_contains_A(I):
    gammas = set(enumerate_B(I))
    n = len(I)
    for g in gammas:
        assert g.is_valid_for(I)
        assert 1 <= g.g <= 2 * n - 1
        assert g.y_total() == g.g - 1
    assert {a.to_gamma() for a in enumerate_A(I)} <= gammas


@settings(max_examples=20, deadline=None)
@given(multisets, st.permutations([1, 2, 3]))
def test_enumeration_is_equivariant(I, perm):
    perm = tuple(perm)
    image = {a.permuted(perm) for a in enumerate_A(I)}
    assert image == set(enumerate_A(I.permuted(perm)))
