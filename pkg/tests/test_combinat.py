from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from usosig.combinat import (
    CUBE_PAIRS,
    CyclicRelationError,
    Poset,
    check_permutation,
    check_subset,
    compose,
    hyperoctahedral_group,
    inverse,
    k_subsets,
    linear_extensions,
    omit_ith,
    preserves_pairs,
    subset_index,
)


def test_omit_ith():
    assert omit_ith((2, 5, 7, 8), 2) == (2, 7, 8)
    assert omit_ith((1, 2, 3, 4), 1) == (2, 3, 4)
    assert omit_ith((1, 2, 3, 4), 4) == (1, 2, 3)
    with pytest.raises(IndexError):
        omit_ith((1, 2), 3)


def test_k_subsets_lexicographic():
    assert k_subsets(4, 2) == ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
    assert k_subsets(3, 0) == ((),)
    assert k_subsets(2, 3) == ()
    assert subset_index(5, 3)[(1, 2, 5)] == 2


def test_check_subset_rejects():
    with pytest.raises(ValueError):
        check_subset((2, 1), 4)
    with pytest.raises(ValueError):
        check_subset((1, 5), 4)
    assert check_subset((1, 3), 4) == (1, 3)


def test_hyperoctahedral_group_is_the_pair_stabilizer():
    group = hyperoctahedral_group()
    assert len(group) == 48
    brute = {p for p in permutations(range(1, 7)) if preserves_pairs(p)}
    assert group == brute
    for p in group:
        assert inverse(p) in group
        assert compose(p, inverse(p)) == tuple(range(1, 7))
    assert all(preserves_pairs(p, CUBE_PAIRS) for p in group)


@given(st.permutations(list(range(1, 7))), st.permutations(list(range(1, 7))))
def test_compose_and_inverse(p, q):
    p, q = tuple(p), tuple(q)
    assert inverse(compose(p, q)) == compose(inverse(q), inverse(p))
    assert check_permutation(p) == p


def test_check_permutation_rejects():
    with pytest.raises(ValueError):
        check_permutation((1, 1, 2))


def test_poset_and_extensions():
    p = Poset("abcd", [("a", "b"), ("b", "c")])
    assert p.less("a", "c")
    assert not p.less("c", "a")
    ext = linear_extensions(p)
    assert len(ext) == 4
    assert all(p.is_extension(e) for e in ext)
    assert not p.is_extension("bacd")
    assert not p.is_extension("abc")
    assert len(linear_extensions(Poset(range(4)))) == 24


def test_poset_rejects_cycles():
    with pytest.raises(CyclicRelationError):
        Poset([1, 2, 3], [(1, 2), (2, 3), (3, 1)])
    with pytest.raises(CyclicRelationError):
        Poset([1], [(1, 1)])
    with pytest.raises(ValueError):
        Poset([1, 2], [(1, 3)])
