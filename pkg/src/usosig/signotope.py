"""Sign maps on r-subsets, the one-sign-change rule, enumeration, restriction,
contraction and single-sign flips."""

from __future__ import annotations

import json
from collections import deque
from functools import lru_cache
from math import comb
from typing import Iterator, Mapping

import numpy as np

from . import kernels
from .combinat import check_subset, k_subsets, omit_ith, subset_index

PLUS, MINUS = 1, -1
SIGN_CHARS = {1: "+", -1: "-"}
CHAR_SIGNS = {"+": 1, "-": -1}

SignSequence = str  # over '+', '-', '*'


class InvalidSignotope(ValueError):
    pass


@lru_cache(maxsize=None)
def omission_table(n: int, rank: int) -> np.ndarray:
    """``table[j, i]`` is the index of ``A_j`` minus its ``(i+1)``-th element.

    ``A_j`` runs over the (rank+1)-subsets of [n] in canonical order.
    """
    idx = subset_index(n, rank)
    bigger = k_subsets(n, rank + 1)
    table = np.zeros((len(bigger), rank + 1), np.int64)
    for j, a in enumerate(bigger):
        for i in range(rank + 1):
            table[j, i] = idx[omit_ith(a, i + 1)]
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def superset_lists(n: int, rank: int) -> tuple[np.ndarray, np.ndarray]:
    """CSR lists: for each rank-subset k, the (rank+1)-subsets containing it."""
    table = omission_table(n, rank)
    n_sub = comb(n, rank)
    flat_sub = table.reshape(-1)
    flat_row = np.repeat(np.arange(table.shape[0], dtype=np.int64), table.shape[1])
    order = np.lexsort((flat_row, flat_sub))
    ptr = np.zeros(n_sub + 1, np.int64)
    np.add.at(ptr, flat_sub + 1, 1)
    return np.cumsum(ptr), flat_row[order]


def count_changes(values) -> int:
    return sum(1 for a, b in zip(values, values[1:]) if a != b)


def min_sign_changes(seq: SignSequence) -> int:
    """Fewest adjacent sign changes over all ways of filling the ``*`` entries."""
    inf = len(seq) + 1
    best = {"+": 0, "-": 0}
    first = True
    for ch in seq:
        if ch not in "+-*":
            raise ValueError(f"bad sign character {ch!r}")
        allowed = "+-" if ch == "*" else ch
        if first:
            best = {s: (0 if s in allowed else inf) for s in "+-"}
            first = False
            continue
        best = {
            s: (min(best[s], best[_other(s)] + 1) if s in allowed else inf) for s in "+-"
        }
    return 0 if first else min(best.values())


def _other(s):
    return "-" if s == "+" else "+"


def changes_ok(signs: np.ndarray, n: int, rank: int) -> np.ndarray:
    """Row-wise monotonicity test for a batch of sign vectors."""
    signs = np.atleast_2d(signs)
    table = omission_table(n, rank)
    if table.shape[0] == 0:
        return np.ones(signs.shape[0], bool)
    seqs = signs[:, table]
    return ((seqs[:, :, 1:] != seqs[:, :, :-1]).sum(axis=2) <= 1).all(axis=1)


class Signotope:
    """A rank-``rank`` sign map on the subsets of ``[n]`` obeying the one-change rule.

    ``signs`` holds +1/-1 in canonical (lexicographic) subset order.
    """

    __slots__ = ("n", "rank", "signs", "_hash")

    def __init__(self, n: int, rank: int, signs, check: bool = True):
        if rank < 1 or n < 0:
            raise ValueError("need rank >= 1 and n >= 0")
        arr = np.array(signs, dtype=np.int8).reshape(-1)
        if arr.size != comb(n, rank):
            raise ValueError(f"expected {comb(n, rank)} signs, got {arr.size}")
        if not np.all(np.abs(arr) == 1):
            raise ValueError("signs must be +1 or -1")
        if check and not changes_ok(arr, n, rank)[0]:
            raise InvalidSignotope("sign map violates the one-sign-change rule")
        arr.setflags(write=False)
        self.n = n
        self.rank = rank
        self.signs = arr
        self._hash = None

    @classmethod
    def from_string(cls, n: int, rank: int, text: str, check: bool = True) -> "Signotope":
        return cls(n, rank, [CHAR_SIGNS[c] for c in text], check=check)

    @classmethod
    def constant(cls, n: int, rank: int, sign: int = PLUS) -> "Signotope":
        return cls(n, rank, np.full(comb(n, rank), sign, np.int8), check=False)

    @classmethod
    def from_function(cls, n: int, rank: int, fn, check: bool = True) -> "Signotope":
        return cls(n, rank, [fn(s) for s in k_subsets(n, rank)], check=check)

    def to_string(self) -> str:
        return "".join(SIGN_CHARS[int(s)] for s in self.signs)

    def __call__(self, *elements) -> int:
        subset = tuple(sorted(elements[0] if len(elements) == 1 and not isinstance(elements[0], int) else elements))
        return int(self.signs[subset_index(self.n, self.rank)[subset]])

    def get(self, subset, default=None):
        i = subset_index(self.n, self.rank).get(tuple(subset))
        return default if i is None else int(self.signs[i])

    def negated(self) -> "Signotope":
        return Signotope(self.n, self.rank, -self.signs, check=False)

    def flipped(self, subset) -> "Signotope":
        """Copy with one sign negated; the result is not validated."""
        arr = self.signs.copy()
        arr[subset_index(self.n, self.rank)[tuple(subset)]] *= -1
        return Signotope(self.n, self.rank, arr, check=False)

    def to_json(self) -> dict:
        return {"n": self.n, "rank": self.rank, "signs": self.to_string()}

    @classmethod
    def from_json(cls, data: Mapping) -> "Signotope":
        return cls.from_string(int(data["n"]), int(data["rank"]), data["signs"])

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def __eq__(self, other):
        return (
            isinstance(other, Signotope)
            and (self.n, self.rank) == (other.n, other.rank)
            and bool(np.array_equal(self.signs, other.signs))
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.rank, self.signs.tobytes()))
        return self._hash

    def __repr__(self):
        return f"Signotope(n={self.n}, rank={self.rank}, signs={self.to_string()!r})"


def sign_sequence(chi, subset) -> SignSequence:
    """Signs of ``subset`` minus its 1st, 2nd, ... element; ``*`` where ``chi`` is undefined.

    ``chi`` is anything with ``get(subset)`` returning +1/-1 or None, and a
    ``rank`` attribute.
    """
    a = tuple(subset)
    if len(a) != chi.rank + 1:
        raise ValueError(f"need a {chi.rank + 1}-subset, got {a}")
    out = []
    for i in range(1, len(a) + 1):
        s = chi.get(omit_ith(a, i))
        out.append("*" if s is None else SIGN_CHARS[int(s)])
    return "".join(out)


def is_signotope(n: int, rank: int, signs) -> bool:
    arr = np.asarray(signs, dtype=np.int8).reshape(-1)
    if arr.size != comb(n, rank) or not np.all(np.abs(arr) == 1):
        return False
    return bool(changes_ok(arr, n, rank)[0])


# -- enumeration -----------------------------------------------------------


class BudgetExceeded(RuntimeError):
    pass


def _fixed_vector(n_sub: int, fixed) -> np.ndarray:
    vec = np.zeros(n_sub, np.int8)
    if fixed is not None:
        vec[:] = np.asarray(fixed, np.int8)
    return vec


def _run_enum(n_sub, ptr, lst, table, fixed, budget, cap=4096):
    while True:
        out = np.zeros((cap, max(n_sub, 1)), np.int8)
        count, nodes, status = kernels.enum_signs(n_sub, ptr, lst, table, fixed, out, budget)
        if status == kernels.STATUS_BUDGET:
            raise BudgetExceeded(f"search exceeded {budget} nodes")
        if status == kernels.STATUS_FULL:
            cap *= 4
            continue
        return out[:count, :n_sub], nodes


def sign_prefixes(n: int, rank: int, depth: int, fixed=None) -> np.ndarray:
    """All locally valid assignments of the first ``depth`` canonical subsets.

    Completions of different prefixes are disjoint, so workers can split the
    search by prefix.
    """
    n_sub = comb(n, rank)
    depth = min(depth, n_sub)
    ptr, lst = superset_lists(n, rank)
    fx = _fixed_vector(n_sub, fixed)[:depth]
    prefixes, _ = _run_enum(depth, ptr[: depth + 1], lst, omission_table(n, rank), fx, 1 << 62)
    return prefixes


def iter_sign_chunks(n: int, rank: int, fixed=None, depth: int = 12, budget: int | None = None,
                     prefixes=None) -> Iterator[np.ndarray]:
    """Yield arrays of valid sign vectors, prefix by prefix, in canonical order.

    ``fixed`` pins entries (+1/-1, 0 = free). ``budget`` caps the total number
    of search-tree nodes; exceeding it raises :class:`BudgetExceeded`.
    """
    n_sub = comb(n, rank)
    ptr, lst = superset_lists(n, rank)
    table = omission_table(n, rank)
    fx = _fixed_vector(n_sub, fixed)
    if prefixes is None:
        prefixes = sign_prefixes(n, rank, depth, fx)
    remaining = budget if budget is not None else 1 << 62
    for prefix in prefixes:
        f = fx.copy()
        f[: prefix.size] = prefix
        chunk, nodes = _run_enum(n_sub, ptr, lst, table, f, remaining)
        remaining -= nodes
        if chunk.shape[0]:
            yield chunk


def enumerate_signotopes(n: int, rank: int, fixed=None, budget: int | None = None) -> Iterator[Signotope]:
    """Every rank-``rank`` signotope on ``[n]`` exactly once, in canonical order.

    For ``rank > n`` there are no subsets and the single empty map is produced.
    """
    if rank < 1:
        raise ValueError("rank must be >= 1")
    for chunk in iter_sign_chunks(n, rank, fixed=fixed, budget=budget):
        for row in chunk:
            yield Signotope(n, rank, row, check=False)


def count_signotopes(n: int, rank: int, budget: int | None = None) -> int:
    return sum(c.shape[0] for c in iter_sign_chunks(n, rank, budget=budget))


def random_signotopes(n: int, rank: int, count: int, seed: int = 0) -> Iterator[Signotope]:
    """Seeded random descents of the search tree (each child order shuffled).

    Samples are valid signotopes but not uniformly distributed.
    """
    rng = np.random.default_rng(seed)
    n_sub = comb(n, rank)
    ptr, lst = superset_lists(n, rank)
    table = omission_table(n, rank)
    for _ in range(count):
        signs = np.zeros(n_sub, np.int8)
        order = rng.integers(0, 2, n_sub)
        tried = np.zeros(n_sub, np.int8)
        k = 0
        while k < n_sub:
            if tried[k] >= 2:
                tried[k] = 0
                k -= 1
                continue
            first = 1 if order[k] else -1
            signs[k] = first if tried[k] == 0 else -first
            tried[k] += 1
            checks = lst[ptr[k] : ptr[k + 1]]
            seqs = signs[table[checks]]
            if checks.size == 0 or ((seqs[:, 1:] != seqs[:, :-1]).sum(axis=1) <= 1).all():
                k += 1
        yield Signotope(n, rank, signs, check=True)


# -- restriction, contraction, flips ----------------------------------------------


def restrict(chi: Signotope, ground) -> Signotope:
    """Signotope induced on ``ground`` (a subset of [n]), relabelled 1..|ground| in order."""
    g = check_subset(sorted(ground), chi.n)
    if len(g) < chi.rank:
        raise ValueError(f"need at least {chi.rank} elements, got {len(g)}")
    idx = subset_index(chi.n, chi.rank)
    signs = [chi.signs[idx[tuple(g[i - 1] for i in s)]] for s in k_subsets(len(g), chi.rank)]
    return Signotope(len(g), chi.rank, signs, check=False)


def contract(chi: Signotope, fixed_elements) -> Signotope:
    """``M -> chi(M | F)`` on the (rank-|F|)-subsets of ``[n] - F``, relabelled in order."""
    f = check_subset(sorted(set(fixed_elements)), chi.n)
    if len(f) != len(set(fixed_elements)):
        raise ValueError("repeated elements")
    if len(f) >= chi.rank:
        raise ValueError(f"can contract at most {chi.rank - 1} elements, got {len(f)}")
    rest = [x for x in range(1, chi.n + 1) if x not in f]
    new_rank = chi.rank - len(f)
    idx = subset_index(chi.n, chi.rank)
    signs = [
        chi.signs[idx[tuple(sorted({rest[i - 1] for i in s} | set(f)))]]
        for s in k_subsets(len(rest), new_rank)
    ]
    return Signotope(len(rest), new_rank, signs, check=False)


def flip_is_valid(chi: Signotope, position: int) -> bool:
    """Whether negating the sign at canonical ``position`` keeps the one-change rule."""
    table = omission_table(chi.n, chi.rank)
    ptr, lst = superset_lists(chi.n, chi.rank)
    rows = lst[ptr[position] : ptr[position + 1]]
    if rows.size == 0:
        return True
    signs = chi.signs.copy()
    signs[position] *= -1
    seqs = signs[table[rows]]
    return bool(((seqs[:, 1:] != seqs[:, :-1]).sum(axis=1) <= 1).all())


def flip_class(chi: Signotope, allowed) -> set[Signotope]:
    """Connected component of ``chi`` under validity-preserving single flips of ``allowed`` subsets."""
    idx = subset_index(chi.n, chi.rank)
    positions = sorted({idx[tuple(s)] for s in allowed})
    seen = {chi}
    queue = deque([chi])
    while queue:
        cur = queue.popleft()
        for p in positions:
            if flip_is_valid(cur, p):
                arr = cur.signs.copy()
                arr[p] *= -1
                nxt = Signotope(cur.n, cur.rank, arr, check=False)
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return seen


def flip_classes(signotopes, allowed) -> list[set[Signotope]]:
    """Partition ``signotopes`` (a closed family) into flip classes, in order of first appearance."""
    classes = []
    assigned: set[Signotope] = set()
    for chi in signotopes:
        if chi not in assigned:
            cls = flip_class(chi, allowed)
            assigned |= cls
            classes.append(cls)
    return classes
