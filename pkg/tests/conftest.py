"""Shared independent oracles for the test suite.

The oracles are written directly from the definitions, with no use of the
package's kernels, so agreement with the package is a real cross-check.
"""

from __future__ import annotations

from itertools import combinations, permutations, product

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from usosig.arrangement2d import Arrangement2D, curves_from_uso, crossing_posets, is_valid_identification
from usosig.arrangement2d import labelled_crossings, uso_from_arrangement
from usosig.signotope import Signotope, flip_is_valid

settings.register_profile("usosig", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("usosig")


# -- signotope oracles --------------------------------------------------------


def naive_is_signotope(n, rank, signs) -> bool:
    subs = list(combinations(range(1, n + 1), rank))
    val = dict(zip(subs, signs))
    for a in combinations(range(1, n + 1), rank + 1):
        seq = [val[a[:i] + a[i + 1 :]] for i in range(rank + 1)]
        if sum(1 for x, y in zip(seq, seq[1:]) if x != y) > 1:
            return False
    return True


def brute_force_signotopes(n, rank) -> set[tuple[int, ...]]:
    m = len(list(combinations(range(n), rank)))
    return {s for s in product((1, -1), repeat=m) if naive_is_signotope(n, rank, s)}


# -- grid oracles --------------------------------------------------------------


def vertices(sizes):
    return list(product(*(range(s) for s in sizes)))


def arc_set(o):
    return set(o.arcs())


def naive_sinks(o, factors):
    arcs = arc_set(o)
    verts = list(product(*factors))
    vs = set(verts)
    return [v for v in verts if not any(a == v and b in vs for a, b in arcs)]


def all_subgrids(sizes):
    choices = []
    for s in sizes:
        choices.append([c for k in range(1, s + 1) for c in combinations(range(s), k)])
    return list(product(*choices))


def naive_is_uso(o) -> bool:
    return all(len(naive_sinks(o, f)) == 1 for f in all_subgrids(o.sizes))


def naive_isomorphic(a, b) -> bool:
    if sorted(a.sizes) != sorted(b.sizes):
        return False
    target = arc_set(b)
    r = len(a.sizes)
    for axes in permutations(range(r)):
        if tuple(a.sizes[i] for i in axes) != b.sizes:
            continue
        for labels in product(*(permutations(range(a.sizes[i])) for i in axes)):
            def m(v):
                return tuple(labels[j][v[axes[j]]] for j in range(r))
            if {(m(x), m(y)) for x, y in arc_set(a)} == target:
                return True
    return False


def naive_contains(o, pattern) -> bool:
    for f in all_subgrids(o.sizes):
        sub = o.induced(f).squeezed()
        if sorted(sub.sizes) == sorted(pattern.squeezed().sizes) and naive_isomorphic(sub, pattern.squeezed()):
            return True
    return False


# -- the running 5 x 5 example -----------------------------------------------------
# The running example of the arrangement section is only drawn, never listed, so
# an instance with the same published data is searched for: r = b = 5,
# cri(1, 6) = (4, 2), blue identification (6..10), red identification (1,4,3,5,2).

RUNNING_BLUE = (6, 7, 8, 9, 10)
RUNNING_RED = (1, 4, 3, 5, 2)


def find_running_example(seed=0, steps=200_000):
    rng = np.random.default_rng(seed)
    chi = Signotope.constant(10, 3)
    for step in range(steps):
        p = int(rng.integers(120))
        if flip_is_valid(chi, p):
            s = chi.signs.copy()
            s[p] *= -1
            chi = Signotope(10, 3, s, check=False)
        if step % 100:
            continue
        uso = uso_from_arrangement(Arrangement2D(chi, 5, 5))
        fam = curves_from_uso(uso, check=False)
        _, pr = crossing_posets(fam)
        if is_valid_identification(pr, RUNNING_RED) and labelled_crossings(fam, RUNNING_BLUE, RUNNING_RED)[1, 6] == (4, 2):
            return uso
    raise RuntimeError("no instance found")


@pytest.fixture(scope="session")
def running_example():
    """(picture USO, arrangement with the published identifications)."""
    from usosig.arrangement2d import arrangement_from

    uso = find_running_example()
    return uso, arrangement_from(uso, RUNNING_BLUE, RUNNING_RED)
