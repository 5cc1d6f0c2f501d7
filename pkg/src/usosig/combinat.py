"""Ordered subsets, permutations, finite posets and the symmetry group of the 3-cube."""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

KSubset = tuple[int, ...]
Permutation = tuple[int, ...]


def omit_ith(subset: KSubset, i: int) -> KSubset:
    """Drop the ``i``-th smallest element (1-based) of ``subset``.

    >>> omit_ith((2, 5, 7, 8), 2)
    (2, 7, 8)
    """
    if not 1 <= i <= len(subset):
        raise IndexError(f"position {i} out of range for a {len(subset)}-subset")
    return tuple(subset[: i - 1]) + tuple(subset[i:])


@lru_cache(maxsize=None)
def k_subsets(n: int, k: int) -> tuple[KSubset, ...]:
    """All ``k``-subsets of ``[n]`` in lexicographic order.

    This order is the canonical index space of every sign map in the package.
    """
    if k < 0 or n < 0:
        raise ValueError("n and k must be nonnegative")
    return tuple(combinations(range(1, n + 1), k))


@lru_cache(maxsize=None)
def subset_index(n: int, k: int) -> dict[KSubset, int]:
    return {s: i for i, s in enumerate(k_subsets(n, k))}


def check_subset(subset, n: int) -> KSubset:
    s = tuple(subset)
    if any(b <= a for a, b in zip(s, s[1:])):
        raise ValueError(f"{s} is not strictly increasing")
    if s and (s[0] < 1 or s[-1] > n):
        raise ValueError(f"{s} is not a subset of [{n}]")
    return s


# -- permutations ------------------------------------------------------------
# A permutation is the tuple of images (pi(1), ..., pi(n)).


def check_permutation(images) -> Permutation:
    p = tuple(int(x) for x in images)
    if sorted(p) != list(range(1, len(p) + 1)):
        raise ValueError(f"{p} is not a permutation of 1..{len(p)}")
    return p


def compose(p: Permutation, q: Permutation) -> Permutation:
    """``p o q``: apply ``q`` first, then ``p``."""
    return tuple(p[x - 1] for x in q)


def inverse(p: Permutation) -> Permutation:
    inv = [0] * len(p)
    for i, x in enumerate(p, start=1):
        inv[x - 1] = i
    return tuple(inv)


def transposition_product(n: int, *cycles: tuple[int, int]) -> Permutation:
    img = list(range(1, n + 1))
    for a, b in cycles:
        img[a - 1], img[b - 1] = img[b - 1], img[a - 1]
    return tuple(img)


# (12), (34), (56) flip a pair; (13)(24) and (35)(46) swap two pairs.
CUBE_GENERATORS: tuple[Permutation, ...] = (
    transposition_product(6, (1, 2)),
    transposition_product(6, (3, 4)),
    transposition_product(6, (5, 6)),
    transposition_product(6, (1, 3), (2, 4)),
    transposition_product(6, (3, 5), (4, 6)),
)

CUBE_PAIRS = ((1, 2), (3, 4), (5, 6))


def closure(generators) -> frozenset[Permutation]:
    gens = [check_permutation(g) for g in generators]
    identity = tuple(range(1, len(gens[0]) + 1))
    group = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                x = compose(g, h)
                if x not in group:
                    group.add(x)
                    nxt.append(x)
        frontier = nxt
    return frozenset(group)


@lru_cache(maxsize=None)
def hyperoctahedral_group() -> frozenset[Permutation]:
    """The 48 permutations of [6] that map the pairs {1,2}, {3,4}, {5,6} onto pairs."""
    group = closure(CUBE_GENERATORS)
    assert len(group) == 48
    return group


def preserves_pairs(p: Permutation, pairs=CUBE_PAIRS) -> bool:
    images = {frozenset(p[x - 1] for x in pair) for pair in pairs}
    return images == {frozenset(pair) for pair in pairs}


# -- posets --------------------------------------------------------------------


class CyclicRelationError(ValueError):
    pass


class Poset:
    """A finite strict partial order given by generating pairs ``a < b``.

    Only the given pairs are stored; the transitive closure is computed when
    asked for.
    """

    def __init__(self, ground, relations=()):
        self.ground = tuple(ground)
        self.relations = frozenset((a, b) for a, b in relations)
        members = set(self.ground)
        for a, b in self.relations:
            if a == b:
                raise CyclicRelationError(f"reflexive pair ({a}, {b})")
            if a not in members or b not in members:
                raise ValueError(f"pair ({a}, {b}) outside the ground set")
        if self._has_cycle():
            raise CyclicRelationError("relation contains a directed cycle")

    def _has_cycle(self) -> bool:
        indeg = {x: 0 for x in self.ground}
        succ: dict = {x: [] for x in self.ground}
        for a, b in self.relations:
            succ[a].append(b)
            indeg[b] += 1
        stack = [x for x in self.ground if indeg[x] == 0]
        seen = 0
        while stack:
            x = stack.pop()
            seen += 1
            for y in succ[x]:
                indeg[y] -= 1
                if indeg[y] == 0:
                    stack.append(y)
        return seen != len(self.ground)

    def transitive_closure(self) -> frozenset[tuple]:
        succ: dict = {x: set() for x in self.ground}
        for a, b in self.relations:
            succ[a].add(b)
        out = set()
        for x in self.ground:
            stack = list(succ[x])
            reach = set()
            while stack:
                y = stack.pop()
                if y not in reach:
                    reach.add(y)
                    stack.extend(succ[y])
            out.update((x, y) for y in reach)
        return frozenset(out)

    def less(self, a, b) -> bool:
        return (a, b) in self.transitive_closure()

    def is_extension(self, order) -> bool:
        order = tuple(order)
        if len(order) != len(self.ground) or set(order) != set(self.ground):
            return False
        pos = {x: i for i, x in enumerate(order)}
        return all(pos[a] < pos[b] for a, b in self.relations)

    def __repr__(self):
        return f"Poset({self.ground!r}, {sorted(self.relations)!r})"


def linear_extensions(poset: Poset) -> list[tuple]:
    """All total orders extending ``poset``, in lexicographic order of ground-set positions."""
    ground = poset.ground
    index = {x: i for i, x in enumerate(ground)}
    preds = {x: set() for x in ground}
    for a, b in poset.relations:
        preds[b].add(a)
    out: list[tuple] = []
    order: list = []
    placed: set = set()

    def rec():
        if len(order) == len(ground):
            out.append(tuple(order))
            return
        for x in sorted(ground, key=index.__getitem__):
            if x not in placed and preds[x] <= placed:
                placed.add(x)
                order.append(x)
                rec()
                order.pop()
                placed.discard(x)

    rec()
    return out
