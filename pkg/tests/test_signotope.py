from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import brute_force_signotopes, naive_is_signotope
from usosig.signotope import (
    BudgetExceeded,
    InvalidSignotope,
    Signotope,
    contract,
    count_signotopes,
    enumerate_signotopes,
    flip_class,
    flip_classes,
    is_signotope,
    iter_sign_chunks,
    min_sign_changes,
    random_signotopes,
    restrict,
    sign_prefixes,
    sign_sequence,
)

EIGHT = ["----", "---+", "--++", "-+++", "++++", "+++-", "++--", "+---"]


def seq_1234(chi):
    return sign_sequence(chi, (1, 2, 3, 4))


def test_sign_sequence_order():
    chi = Signotope.from_function(4, 3, lambda s: 1 if s == (2, 3, 4) else -1, check=False)
    assert seq_1234(chi) == "+---"
    chi = Signotope.from_function(4, 3, lambda s: 1 if s == (1, 2, 3) else -1, check=False)
    assert seq_1234(chi) == "---+"
    assert seq_1234(Signotope.constant(4, 3)) == "++++"
    with pytest.raises(ValueError):
        sign_sequence(Signotope.constant(4, 3), (1, 2, 3))


@pytest.mark.parametrize("seq,expected", [("----", 0), ("*-+--", 2), ("+-*++", 2), ("+-+-", 3),
                                          ("*", 0), ("", 0), ("**+-**", 1), ("-+--*", 2)])
def test_min_sign_changes(seq, expected):
    assert min_sign_changes(seq) == expected


@given(st.text(alphabet="+-*", max_size=8))
def test_min_sign_changes_matches_completions(seq):
    stars = [i for i, c in enumerate(seq) if c == "*"]
    best = None
    for fill in product("+-", repeat=len(stars)):
        s = list(seq)
        for i, c in zip(stars, fill):
            s[i] = c
        k = sum(1 for a, b in zip(s, s[1:]) if a != b)
        best = k if best is None else min(best, k)
    assert min_sign_changes(seq) == (best or 0)


def test_is_signotope_examples():
    assert is_signotope(4, 3, [1] * 4)
    bad = Signotope.from_string(4, 3, "-+-+", check=False)  # chi(1234) = (+,-,+,-)
    assert seq_1234(bad) == "+-+-"
    assert not is_signotope(4, 3, bad.signs)
    good = Signotope.from_string(4, 3, "++--", check=False)
    assert seq_1234(good) == "--++"
    assert is_signotope(4, 3, good.signs)
    with pytest.raises(InvalidSignotope):
        Signotope.from_string(4, 3, "-+-+")


def test_eight_rank3_patterns():
    seqs = sorted(seq_1234(chi) for chi in enumerate_signotopes(4, 3))
    assert seqs == sorted(EIGHT)


@pytest.mark.parametrize("n,rank", [(3, 2), (4, 2), (5, 2), (4, 3), (5, 3), (5, 4), (6, 4), (6, 5)])
def test_enumeration_matches_brute_force(n, rank):
    got = {tuple(int(s) for s in chi.signs) for chi in enumerate_signotopes(n, rank)}
    assert got == brute_force_signotopes(n, rank)


def test_enumeration_matches_vectorized_oracle_n6_rank3():
    subs = list(combinations(range(6), 3))
    pos = {s: i for i, s in enumerate(subs)}
    idx = np.arange(1 << 20, dtype=np.int64)
    bits = ((idx[:, None] >> np.arange(19, -1, -1)) & 1).astype(np.int8)
    ok = np.ones(len(idx), bool)
    for a in combinations(range(6), 4):
        cols = [pos[a[:i] + a[i + 1 :]] for i in range(4)]
        seq = bits[:, cols]
        ok &= (seq[:, 1:] != seq[:, :-1]).sum(axis=1) <= 1
    assert count_signotopes(6, 3) == int(ok.sum()) == 908


def test_known_counts():
    assert [count_signotopes(n, 3) for n in range(3, 8)] == [2, 8, 62, 908, 24698]
    assert count_signotopes(6, 4) == 148
    assert count_signotopes(6, 2) == 720  # rank 2 signotopes are permutations


def test_degenerate_ranks():
    assert len(list(enumerate_signotopes(3, 3))) == 2
    assert len(list(enumerate_signotopes(2, 3))) == 1  # no subsets: the empty map
    with pytest.raises(ValueError):
        list(enumerate_signotopes(3, 0))


def test_enumeration_is_deterministic_and_unique():
    a = [chi.to_string() for chi in enumerate_signotopes(5, 3)]
    assert a == [chi.to_string() for chi in enumerate_signotopes(5, 3)]
    assert len(set(a)) == len(a)


def test_prefix_split_partitions_the_search():
    prefixes = sign_prefixes(6, 3, 6)
    parts = [c for c in iter_sign_chunks(6, 3, prefixes=prefixes)]
    rows = np.vstack(parts)
    assert rows.shape[0] == 908
    assert len({r.tobytes() for r in rows}) == 908


def test_fixed_entries_restrict_enumeration():
    fixed = np.zeros(10, np.int8)
    fixed[0] = 1
    got = list(enumerate_signotopes(5, 3, fixed=fixed))
    assert got and all(chi.signs[0] == 1 for chi in got)
    assert len(got) == sum(1 for chi in enumerate_signotopes(5, 3) if chi.signs[0] == 1)


def test_budget_refuses():
    with pytest.raises(BudgetExceeded):
        count_signotopes(6, 3, budget=50)


def test_random_signotopes_valid_and_seeded():
    a = [chi.to_string() for chi in random_signotopes(7, 3, 20, seed=3)]
    assert a == [chi.to_string() for chi in random_signotopes(7, 3, 20, seed=3)]
    assert all(naive_is_signotope(7, 3, Signotope.from_string(7, 3, s).signs) for s in a)


def test_restrict_examples():
    chi = next(c for c in enumerate_signotopes(5, 3) if len(set(c.signs)) == 2)
    assert restrict(chi, range(1, 6)) == chi
    sub = restrict(chi, (1, 2, 4, 5))
    assert sub(1, 2, 3) == chi(1, 2, 4)
    assert sub(2, 3, 4) == chi(2, 4, 5)
    with pytest.raises(ValueError):
        restrict(chi, (1, 2))


def test_contract_examples():
    chi = list(enumerate_signotopes(6, 4))[37]
    assert contract(chi, ()) == chi
    c = contract(chi, (5, 6))
    assert (c.n, c.rank) == (4, 2)
    for m in combinations(range(1, 5), 2):
        assert c(m) == chi(tuple(sorted(m + (5, 6))))
    with pytest.raises(ValueError):
        contract(chi, (1, 2, 3, 4))


@pytest.mark.parametrize("n,rank", [(6, 3), (6, 4)])
def test_restrict_and_contract_preserve_validity(n, rank):
    for chi in enumerate_signotopes(n, rank):
        for k in range(rank, n):
            for g in combinations(range(1, n + 1), k):
                assert is_signotope(k, rank, restrict(chi, g).signs)
        for size in range(1, rank):
            for f in combinations(range(1, n + 1), size):
                c = contract(chi, f)
                assert is_signotope(c.n, c.rank, c.signs)


def test_negation_closed():
    for chi in enumerate_signotopes(6, 3):
        assert is_signotope(6, 3, chi.negated().signs)


def test_flip_class_examples():
    chi = Signotope.constant(5, 3)
    assert flip_class(chi, []) == {chi}
    both = flip_class(Signotope.constant(3, 3), [(1, 2, 3)])
    assert {c.to_string() for c in both} == {"+", "-"}


def test_flip_classes_cover_and_are_symmetric():
    allowed = [t for t in combinations(range(1, 6), 3) if t[2] <= 2 or t[0] >= 3]
    allchi = list(enumerate_signotopes(5, 3))
    classes = flip_classes(allchi, allowed)
    assert sum(len(c) for c in classes) == len(allchi) == 62
    for cls in classes:
        for chi in cls:
            assert flip_class(chi, allowed) == cls


def test_json_round_trip():
    chi = list(enumerate_signotopes(5, 3))[11]
    assert Signotope.from_json(chi.to_json()) == chi
    assert chi.to_json() == {"n": 5, "rank": 3, "signs": chi.to_string()}
