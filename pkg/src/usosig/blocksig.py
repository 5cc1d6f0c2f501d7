"""Block signotopes and the grid orientation they induce.

A block partition of ``[n]`` into consecutive intervals ``C_1 < ... < C_r``
turns a rank-(r+1) signotope into an orientation of the grid
``C_1 x ... x C_r``. Grid coordinates are positions inside the blocks
(0-based); vertices given by labels are converted with :meth:`BlockPartition.coords_of`.
"""

from __future__ import annotations

import json
from functools import lru_cache
from graphlib import CycleError, TopologicalSorter
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .combinat import k_subsets, subset_index
from .grid import GridOrientation, Subgrid, grid_shape
from .signotope import Signotope, contract, restrict


class BlockPartition:
    """Consecutive blocks given by their sizes."""

    __slots__ = ("sizes",)

    def __init__(self, sizes: Sequence[int]):
        sizes = tuple(int(s) for s in sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError(f"block sizes must be positive, got {sizes}")
        self.sizes = sizes

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def r(self) -> int:
        return len(self.sizes)

    def blocks(self) -> tuple[tuple[int, ...], ...]:
        out, start = [], 1
        for s in self.sizes:
            out.append(tuple(range(start, start + s)))
            start += s
        return tuple(out)

    def block_of(self, label: int) -> int:
        for i, b in enumerate(self.blocks()):
            if label in b:
                return i
        raise ValueError(f"label {label} outside [{self.n}]")

    def labels_of(self, coords: Sequence[int]) -> tuple[int, ...]:
        return tuple(b[c] for b, c in zip(self.blocks(), coords))

    def coords_of(self, labels: Sequence[int]) -> tuple[int, ...]:
        if len(labels) != self.r:
            raise ValueError(f"need one label per block, got {tuple(labels)}")
        res = []
        for b, x in zip(self.blocks(), labels):
            if x not in b:
                raise ValueError(f"label {x} is not in block {b}")
            res.append(b.index(x))
        return tuple(res)

    def __eq__(self, other):
        return isinstance(other, BlockPartition) and self.sizes == other.sizes

    def __hash__(self):
        return hash(self.sizes)

    def __repr__(self):
        return f"BlockPartition({list(self.sizes)})"


def compositions(n: int, parts: int) -> list[tuple[int, ...]]:
    """All block-size vectors of ``parts`` positive integers summing to ``n``."""
    return [
        tuple(b - a for a, b in zip((0,) + cuts, cuts + (n,)))
        for cuts in combinations(range(1, n), parts - 1)
    ]


class BlockSignotope:
    __slots__ = ("chi", "partition")

    def __init__(self, chi: Signotope, partition: BlockPartition | Sequence[int]):
        if not isinstance(partition, BlockPartition):
            partition = BlockPartition(partition)
        if chi.rank != partition.r + 1:
            raise ValueError(f"{partition.r} blocks need a rank-{partition.r + 1} signotope, got rank {chi.rank}")
        if chi.n != partition.n:
            raise ValueError(f"blocks cover [{partition.n}] but the signotope lives on [{chi.n}]")
        self.chi = chi
        self.partition = partition

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.partition.sizes

    def to_json(self) -> dict:
        return {"signotope": self.chi.to_json(), "blocks": list(self.sizes)}

    @classmethod
    def from_json(cls, data: Mapping) -> "BlockSignotope":
        return cls(Signotope.from_json(data["signotope"]), BlockPartition(data["blocks"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def __eq__(self, other):
        return isinstance(other, BlockSignotope) and self.chi == other.chi and self.partition == other.partition

    def __hash__(self):
        return hash((self.chi, self.partition))

    def __repr__(self):
        return f"BlockSignotope({self.chi!r}, blocks={list(self.sizes)})"


@lru_cache(maxsize=None)
def edge_subsets(sizes: tuple[int, ...]) -> np.ndarray:
    """For each canonical grid edge, the index of the (r+1)-subset deciding it."""
    part = BlockPartition(sizes)
    sh = grid_shape(sizes)
    idx = subset_index(part.n, part.r + 1)
    blocks = part.blocks()
    res = np.zeros(sh.n_edges, np.int64)
    for e in range(sh.n_edges):
        lo = sh.coords[sh.eu[e]]
        hi = sh.coords[sh.ev[e]]
        labels = {blocks[i][lo[i]] for i in range(sh.r)} | {blocks[sh.edim[e]][hi[sh.edim[e]]]}
        res[e] = idx[tuple(sorted(labels))]
    res.setflags(write=False)
    return res


def forward_bits(sign_rows: np.ndarray, sizes: Sequence[int]) -> np.ndarray:
    """Edge bits of the induced orientations for a batch of sign vectors."""
    return (np.atleast_2d(sign_rows)[:, edge_subsets(tuple(sizes))] > 0).astype(np.uint8)


def induced_orientation(block: BlockSignotope) -> GridOrientation:
    """O_chi: along block i, ``v -> v'`` (v has the smaller label) iff the sign is +."""
    return GridOrientation.from_forward(block.sizes, forward_bits(block.chi.signs, block.sizes)[0])


def rf_chi(block: BlockSignotope, vertex: Sequence[int]) -> tuple[int, ...]:
    """Refined index from signs alone; ``vertex`` lists one label per block.

    Entry i counts the c > c_i in block i with sign + plus the c < c_i with sign -.
    """
    part = block.partition
    part.coords_of(vertex)
    res = []
    for i, b in enumerate(part.blocks()):
        ci = vertex[i]
        rest = [x for j, x in enumerate(vertex) if j != i]
        count = 0
        for c in b:
            if c == ci:
                continue
            s = block.chi(tuple(sorted(rest + [c, ci])))
            if (c > ci and s > 0) or (c < ci and s < 0):
                count += 1
        res.append(count)
    return tuple(res)


@lru_cache(maxsize=None)
def _rf_tables(sizes: tuple[int, ...]):
    """``sub[v, i, c]`` subset index for vertex v, block i, other label c; ``sgn`` is +1
    when c is above v's label (the subset's + sign then counts), -1 below, 0 for c itself."""
    part = BlockPartition(sizes)
    sh = grid_shape(sizes)
    idx = subset_index(part.n, part.r + 1)
    blocks = part.blocks()
    width = max(sizes)
    sub = np.zeros((sh.n_vertices, sh.r, width), np.int64)
    sgn = np.zeros((sh.n_vertices, sh.r, width), np.int8)
    for v in range(sh.n_vertices):
        labels = [blocks[i][sh.coords[v, i]] for i in range(sh.r)]
        for i in range(sh.r):
            rest = labels[:i] + labels[i + 1 :]
            for c_pos, c in enumerate(blocks[i]):
                if c == labels[i]:
                    continue
                sub[v, i, c_pos] = idx[tuple(sorted(rest + [c, labels[i]]))]
                sgn[v, i, c_pos] = 1 if c > labels[i] else -1
    return sub, sgn


def rf_chi_batch(sign_rows: np.ndarray, sizes: Sequence[int]) -> np.ndarray:
    """``[M, V, r]`` array of the sign formula for a batch of sign vectors."""
    sub, sgn = _rf_tables(tuple(sizes))
    rows = np.atleast_2d(sign_rows)
    if rows.shape[1] == 0:  # no subsets at all: a single vertex
        return np.zeros((rows.shape[0],) + sub.shape[:2], np.int64)
    vals = rows[:, sub]
    return ((vals * sgn[None]) > 0).sum(axis=3)


def rf_chi_array(block: BlockSignotope) -> np.ndarray:
    """Formula values on the whole grid, shaped ``sizes + (r,)``."""
    return rf_chi_batch(block.chi.signs, block.sizes)[0].reshape(block.sizes + (len(block.sizes),))


# -- the digraph G_chi -----------------------------------------------------------


def g_chi_graph(chi: Signotope) -> dict[tuple[int, ...], set[tuple[int, ...]]]:
    """Successor sets of the digraph on (rank-1)-subsets of [n].

    ``R`` and ``R'`` meeting in rank-2 elements are joined, pointing from the
    lexicographically smaller to the larger iff ``chi(R | R') = +``.
    """
    k = chi.rank - 1
    nodes = k_subsets(chi.n, k)
    succ: dict = {R: set() for R in nodes}
    for R, R2 in combinations(nodes, 2):  # lexicographic pairs
        union = tuple(sorted(set(R) | set(R2)))
        if len(union) != k + 1:
            continue
        if chi(union) > 0:
            succ[R].add(R2)
        else:
            succ[R2].add(R)
    return succ


def is_acyclic_digraph(succ: Mapping) -> bool:
    ts = TopologicalSorter({v: () for v in succ})
    for v, ws in succ.items():
        for w in ws:
            ts.add(w, v)
    try:
        ts.prepare()
    except CycleError:
        return False
    return True


def transversal_subgraph(chi: Signotope, partition: BlockPartition) -> dict:
    """G_chi restricted to sets meeting every block exactly once."""
    succ = g_chi_graph(chi)
    blocks = [set(b) for b in partition.blocks()]

    def keep(R):
        return all(len(set(R) & b) == 1 for b in blocks)

    return {R: {W for W in ws if keep(W)} for R, ws in succ.items() if keep(R)}


def orientation_as_digraph(block: BlockSignotope) -> dict:
    """O_chi as successor sets on label tuples (one label per block, sorted)."""
    o = induced_orientation(block)
    part = block.partition
    res: dict = {}
    for a, b in o.arcs():
        res.setdefault(part.labels_of(a), set()).add(part.labels_of(b))
        res.setdefault(part.labels_of(b), set())
    if not res:
        res[part.labels_of((0,) * part.r)] = set()
    return res


# -- subgrids -------------------------------------------------------------------------


def subgrid_block_signotope(block: BlockSignotope, subgrid: Subgrid) -> BlockSignotope:
    """Block signotope inducing the orientation of ``subgrid`` (size-one blocks dropped).

    Restricts to the surviving labels, then contracts the labels of blocks of
    size one. A single-vertex subgrid gives one block of size one.
    """
    part = block.partition
    if len(subgrid) != part.r:
        raise ValueError("subgrid has the wrong number of factors")
    blocks = part.blocks()
    chosen = []
    for i, factor in enumerate(subgrid):
        if not factor or any(not 0 <= c < part.sizes[i] for c in factor):
            raise ValueError(f"bad factor {factor} on block {i}")
        chosen.append(sorted(blocks[i][c] for c in factor))
    if all(len(f) == 1 for f in chosen):
        # a single vertex: rank 2 on one element has no subsets at all
        return BlockSignotope(Signotope(1, 2, []), BlockPartition([1]))
    ground = sorted(x for f in chosen for x in f)
    chi = restrict(block.chi, ground)
    relabel = {x: j + 1 for j, x in enumerate(ground)}
    singles = [i for i, f in enumerate(chosen) if len(f) == 1]
    fixed = [relabel[chosen[i][0]] for i in singles]
    if fixed:
        chi = contract(chi, fixed)
    new_sizes = [len(f) for i, f in enumerate(chosen) if i not in singles]
    return BlockSignotope(chi, BlockPartition(new_sizes))
