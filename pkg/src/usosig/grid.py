"""Grid orientations: subgrids, sinks, unique sink orientations, refined index,
acyclicity, isomorphism classes and pattern containment.

Coordinates are 0-based: the grid of size ``(n_1, ..., n_r)`` has vertices
``[0, n_1) x ... x [0, n_r)``, numbered in C order (first coordinate most
significant). An orientation is stored as out-masks ``out[v, i]``: bit ``c``
is set iff ``v`` points to the vertex obtained by setting coordinate ``i`` to
``c``.
"""

from __future__ import annotations

import json
from functools import lru_cache
from itertools import permutations, product
from math import prod
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import kernels

Vertex = tuple[int, ...]
Subgrid = tuple[tuple[int, ...], ...]


class NotAUSO(ValueError):
    pass


class ShapeTooLarge(ValueError):
    pass


# -- shapes ------------------------------------------------------------------


class GridShape:
    """Index tables for one grid size; cached, treat as immutable."""

    def __init__(self, sizes: Sequence[int]):
        sizes = tuple(int(s) for s in sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError(f"bad grid size {sizes}")
        if any(s > 62 for s in sizes):
            raise ValueError("axis longer than 62 does not fit an int64 mask")
        self.sizes = sizes
        self.r = len(sizes)
        self.n_vertices = prod(sizes)
        strides = [1] * self.r
        for i in range(self.r - 2, -1, -1):
            strides[i] = strides[i + 1] * sizes[i + 1]
        self.strides = np.array(strides, np.int64)
        self.coords = np.array(list(product(*(range(s) for s in sizes))), np.int64).reshape(-1, self.r)
        eu, ev, ed = [], [], []
        for u in range(self.n_vertices):
            for i in range(self.r):
                cu = int(self.coords[u, i])
                for c in range(cu + 1, sizes[i]):
                    eu.append(u)
                    ev.append(u + (c - cu) * strides[i])
                    ed.append(i)
        self.eu = np.array(eu, np.int64)
        self.ev = np.array(ev, np.int64)
        self.edim = np.array(ed, np.int64)
        self.n_edges = len(eu)
        self.edge_index = {(int(a), int(b)): e for e, (a, b) in enumerate(zip(eu, ev))}
        for arr in (self.strides, self.coords, self.eu, self.ev, self.edim):
            arr.setflags(write=False)

    @property
    def dimension(self) -> int:
        return sum(1 for s in self.sizes if s > 1)

    def vertex(self, index: int) -> Vertex:
        return tuple(int(c) for c in self.coords[index])

    def index(self, vertex: Sequence[int]) -> int:
        if len(vertex) != self.r or any(not 0 <= c < s for c, s in zip(vertex, self.sizes)):
            raise ValueError(f"vertex {tuple(vertex)} outside grid {self.sizes}")
        return int(np.dot(vertex, self.strides))

    @lru_cache(maxsize=None)
    def subgrid_masks(self) -> np.ndarray:
        """All subgrids as per-axis bit masks, smallest vertex count first."""
        per_axis = [range(1, 1 << s) for s in self.sizes]
        masks = np.array(list(product(*per_axis)), np.int64).reshape(-1, self.r)
        counts = np.ones(masks.shape[0], np.int64)
        for i in range(self.r):
            counts *= kernels.popcount(masks[:, i])
        order = np.lexsort(tuple(masks[:, i] for i in range(self.r - 1, -1, -1)) + (counts,))
        masks = masks[order]
        masks.setflags(write=False)
        return masks

    @lru_cache(maxsize=None)
    def path_requirements(self) -> np.ndarray:
        """Holt-Klee path count each subgrid needs: sum of sizes minus the number of axes."""
        masks = self.subgrid_masks()
        need = kernels.popcount(masks).sum(axis=1) - self.r
        need.setflags(write=False)
        return need

    def __eq__(self, other):
        return isinstance(other, GridShape) and self.sizes == other.sizes

    def __hash__(self):
        return hash(self.sizes)

    def __repr__(self):
        return f"GridShape{self.sizes}"


@lru_cache(maxsize=None)
def grid_shape(sizes: tuple[int, ...]) -> GridShape:
    return GridShape(sizes)


def subgrid_mask(subgrid: Subgrid, sizes: Sequence[int]) -> np.ndarray:
    if len(subgrid) != len(sizes):
        raise ValueError("subgrid has the wrong number of factors")
    mask = np.zeros(len(sizes), np.int64)
    for i, (factor, size) in enumerate(zip(subgrid, sizes)):
        if not factor:
            raise ValueError(f"factor {i} is empty")
        for c in factor:
            if not 0 <= c < size:
                raise ValueError(f"coordinate {c} out of range on axis {i}")
            mask[i] |= 1 << c
    return mask


def mask_to_subgrid(mask) -> Subgrid:
    return tuple(tuple(c for c in range(63) if (int(m) >> c) & 1) for m in mask)


def full_subgrid(sizes: Sequence[int]) -> Subgrid:
    return tuple(tuple(range(s)) for s in sizes)


# -- orientations --------------------------------------------------------------


class GridOrientation:
    """An orientation of every edge of a grid."""

    __slots__ = ("shape", "out", "_hash")

    def __init__(self, sizes: Sequence[int], out):
        self.shape = grid_shape(tuple(int(s) for s in sizes))
        arr = np.array(out, np.int64).reshape(self.shape.n_vertices, self.shape.r)
        arr.setflags(write=False)
        self.out = arr
        self._hash = None

    # construction

    @classmethod
    def from_forward(cls, sizes, forward) -> "GridOrientation":
        """``forward[e]`` true orients canonical edge ``e`` from its low to its high end."""
        shape = grid_shape(tuple(sizes))
        fw = np.asarray(forward, np.uint8).reshape(1, -1)
        if fw.shape[1] != shape.n_edges:
            raise ValueError(f"expected {shape.n_edges} edge bits, got {fw.shape[1]}")
        out = kernels.forward_to_out(fw, shape.eu, shape.ev, shape.edim, shape.coords, shape.r)
        return cls(shape.sizes, out[0])

    @classmethod
    def from_function(cls, sizes, points_up) -> "GridOrientation":
        """``points_up(u, v)`` decides the edge between vertex tuples ``u`` (low) and ``v`` (high)."""
        shape = grid_shape(tuple(sizes))
        fw = [bool(points_up(shape.vertex(u), shape.vertex(v))) for u, v in zip(shape.eu, shape.ev)]
        return cls.from_forward(sizes, fw)

    @classmethod
    def from_edges(cls, sizes, arcs) -> "GridOrientation":
        """Build from directed arcs ``(v, w)`` given as vertex tuples; every edge exactly once."""
        shape = grid_shape(tuple(sizes))
        fw = np.full(shape.n_edges, -1, np.int8)
        for v, w in arcs:
            a, b = shape.index(v), shape.index(w)
            key = (min(a, b), max(a, b))
            if key not in shape.edge_index:
                raise ValueError(f"{tuple(v)} and {tuple(w)} are not adjacent")
            e = shape.edge_index[key]
            if fw[e] != -1:
                raise ValueError(f"edge {tuple(v)}-{tuple(w)} given twice")
            fw[e] = 1 if a < b else 0
        if (fw < 0).any():
            raise ValueError(f"{int((fw < 0).sum())} edges missing")
        return cls.from_forward(sizes, fw)

    @classmethod
    def from_refined_index(cls, rf) -> "GridOrientation":
        return uso_from_refined_index(rf)

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.shape.sizes

    def forward(self) -> np.ndarray:
        """Edge bits in canonical order (1 = low end points to high end)."""
        sh = self.shape
        bit = (self.out[sh.eu, sh.edim] >> sh.coords[sh.ev, sh.edim]) & 1
        return bit.astype(np.uint8)

    def arcs(self) -> list[tuple[Vertex, Vertex]]:
        sh = self.shape
        res = []
        for e, f in enumerate(self.forward()):
            a, b = sh.vertex(sh.eu[e]), sh.vertex(sh.ev[e])
            res.append((a, b) if f else (b, a))
        return res

    def points_to(self, v: Sequence[int], w: Sequence[int]) -> bool:
        diff = [i for i, (a, b) in enumerate(zip(v, w)) if a != b]
        if len(diff) != 1:
            raise ValueError(f"{tuple(v)} and {tuple(w)} are not adjacent")
        i = diff[0]
        return bool((self.out[self.shape.index(v), i] >> w[i]) & 1)

    # predicates

    def sinks(self, subgrid: Subgrid | None = None) -> list[Vertex]:
        sh = self.shape
        mask = subgrid_mask(subgrid if subgrid is not None else full_subgrid(sh.sizes), sh.sizes)
        inside = np.all((mask[None, :] >> sh.coords) & 1, axis=1)
        sink = inside & ~np.any(self.out & mask[None, :], axis=1)
        return [sh.vertex(v) for v in np.nonzero(sink)[0]]

    def sources(self, subgrid: Subgrid | None = None) -> list[Vertex]:
        return self.reversed().sinks(subgrid)

    def first_bad_subgrid(self) -> Subgrid | None:
        """A subgrid without exactly one sink (smallest first), or None."""
        masks = self.shape.subgrid_masks()
        s = int(kernels.first_bad_subgrid(self.out[None], self.shape.coords, masks)[0])
        return None if s < 0 else mask_to_subgrid(masks[s])

    def is_uso(self) -> bool:
        return self.first_bad_subgrid() is None

    def refined_index(self) -> np.ndarray:
        """Array of shape ``sizes + (r,)``: out-degree of each vertex in each dimension."""
        return kernels.popcount(self.out).reshape(self.sizes + (self.shape.r,))

    def is_acyclic(self) -> bool:
        sh = self.shape
        return bool(kernels.acyclic(self.out[None], sh.coords, sh.strides)[0])

    # transformations

    def reversed(self) -> "GridOrientation":
        return GridOrientation.from_forward(self.sizes, 1 - self.forward())

    def relabeled(self, axis_perm: Sequence[int], label_perms: Sequence[Sequence[int]]) -> "GridOrientation":
        """Isomorphic copy: old axis ``axis_perm[j]`` becomes new axis ``j``, and on
        old axis ``i`` label ``c`` becomes ``label_perms[i][c]``."""
        fw, _ = _relabel_maps(self.sizes, tuple(axis_perm), tuple(tuple(p) for p in label_perms))
        new_sizes = tuple(self.sizes[a] for a in axis_perm)
        return GridOrientation.from_forward(new_sizes, fw(self.forward()))

    def transposed(self) -> "GridOrientation":
        """Axes in reverse order (for two axes: rows and columns swapped)."""
        perm = tuple(range(self.shape.r - 1, -1, -1))
        return self.relabeled(perm, [tuple(range(s)) for s in self.sizes])

    def induced(self, subgrid: Subgrid) -> "GridOrientation":
        """Orientation of a subgrid, its factors relabelled 0.. in increasing order."""
        sh = self.shape
        subgrid_mask(subgrid, sh.sizes)
        factors = [tuple(sorted(f)) for f in subgrid]
        new_sizes = tuple(len(f) for f in factors)
        new = grid_shape(new_sizes)
        out = np.zeros((new.n_vertices, new.r), np.int64)
        for nv in range(new.n_vertices):
            old = tuple(factors[i][new.coords[nv, i]] for i in range(new.r))
            ov = sh.index(old)
            for i in range(new.r):
                m = int(self.out[ov, i])
                for c, oc in enumerate(factors[i]):
                    if (m >> oc) & 1:
                        out[nv, i] |= 1 << c
        return GridOrientation(new_sizes, out)

    def squeezed(self) -> "GridOrientation":
        """Drop axes of size one."""
        keep = [i for i, s in enumerate(self.sizes) if s > 1] or [0]
        return GridOrientation(tuple(self.sizes[i] for i in keep), self.out[:, keep])

    # serialization

    def to_json(self, form: str = "edges") -> dict:
        if form == "rf":
            if not self.is_uso():
                raise NotAUSO("the refined-index form is only defined for USOs")
            return {"shape": list(self.sizes), "rf": self.refined_index().tolist()}
        if form != "edges":
            raise ValueError(f"unknown form {form!r}")
        return {"shape": list(self.sizes), "edges": [[list(a), list(b)] for a, b in self.arcs()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "GridOrientation":
        sizes = tuple(int(s) for s in data["shape"])
        if "rf" in data:
            rf = np.array(data["rf"], np.int64)
            if rf.shape != sizes + (len(sizes),):
                raise ValueError(f"rf array has shape {rf.shape}, expected {sizes + (len(sizes),)}")
            return uso_from_refined_index(rf)
        if "edges" in data:
            return cls.from_edges(sizes, [(tuple(a), tuple(b)) for a, b in data["edges"]])
        raise ValueError("orientation JSON needs 'rf' or 'edges'")

    def dumps(self, form: str = "edges") -> str:
        return json.dumps(self.to_json(form))

    def __eq__(self, other):
        return (
            isinstance(other, GridOrientation)
            and self.sizes == other.sizes
            and bool(np.array_equal(self.out, other.out))
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.sizes, self.out.tobytes()))
        return self._hash

    def __repr__(self):
        bits = "".join(map(str, self.forward()))
        return f"GridOrientation({self.sizes}, forward={bits!r})"


def orientations_from_forward(sizes, forward) -> np.ndarray:
    """Out-mask batch ``[M, V, r]`` for rows of edge bits."""
    sh = grid_shape(tuple(sizes))
    return kernels.forward_to_out(np.atleast_2d(forward), sh.eu, sh.ev, sh.edim, sh.coords, sh.r)


# -- refined index -------------------------------------------------------------


def uso_from_refined_index(rf) -> GridOrientation:
    """Orient ``u -> v`` on each line of dimension ``i`` iff ``rf_i(u) > rf_i(v)``.

    The values along every line must be a permutation of ``0..len-1``.
    """
    rf = np.asarray(rf, np.int64)
    sizes = rf.shape[:-1]
    r = len(sizes)
    if rf.shape[-1] != r:
        raise ValueError("last axis of rf must have one entry per dimension")
    for i in range(r):
        line = np.moveaxis(rf[..., i], i, -1)
        if not np.array_equal(np.sort(line, axis=-1), np.broadcast_to(np.arange(sizes[i]), line.shape)):
            raise ValueError(f"rf values along dimension {i} are not a bijection onto 0..{sizes[i] - 1}")
    sh = grid_shape(tuple(sizes))
    flat = rf.reshape(-1, r)
    fw = flat[sh.eu, sh.edim] > flat[sh.ev, sh.edim]
    return GridOrientation.from_forward(sizes, fw)


# -- isomorphism -----------------------------------------------------------------


@lru_cache(maxsize=None)
def _relabel_maps(sizes, axis_perm, label_perms):
    """Edge map and flip bits turning old forward bits into relabelled ones."""
    old = grid_shape(sizes)
    new_sizes = tuple(sizes[a] for a in axis_perm)
    new = grid_shape(new_sizes)
    src = np.zeros(new.n_edges, np.int64)
    flip = np.zeros(new.n_edges, np.uint8)
    inv = [np.argsort(p) for p in label_perms]
    for e in range(new.n_edges):
        lo = new.coords[new.eu[e]]
        hi = new.coords[new.ev[e]]
        a_old = [0] * old.r
        b_old = [0] * old.r
        for j, a in enumerate(axis_perm):
            a_old[a] = int(inv[a][lo[j]])
            b_old[a] = int(inv[a][hi[j]])
        ia, ib = old.index(a_old), old.index(b_old)
        src[e] = old.edge_index[(min(ia, ib), max(ia, ib))]
        flip[e] = 1 if ia > ib else 0

    def apply(fw):
        return np.asarray(fw, np.uint8)[..., src] ^ flip

    return apply, (src, flip)


@lru_cache(maxsize=None)
def symmetries(sizes: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], tuple[tuple[int, ...], ...]], ...]:
    """All (axis permutation, label permutations) keeping the shape ``sizes``."""
    r = len(sizes)
    axis_perms = [p for p in permutations(range(r)) if all(sizes[p[j]] == sizes[j] for j in range(r))]
    label_sets = list(product(*(list(permutations(range(s))) for s in sizes)))
    return tuple((ap, lp) for ap in axis_perms for lp in label_sets)


@lru_cache(maxsize=None)
def _symmetry_tables(sizes):
    syms = symmetries(sizes)
    src = np.stack([_relabel_maps(sizes, ap, lp)[1][0] for ap, lp in syms])
    flip = np.stack([_relabel_maps(sizes, ap, lp)[1][1] for ap, lp in syms])
    return syms, src, flip


def _sorted_axes(sizes) -> tuple[int, ...]:
    return tuple(sorted(range(len(sizes)), key=lambda i: (sizes[i], i)))


def _lexmin_rows(bits: np.ndarray) -> np.ndarray:
    """Index of the lexicographically smallest row in each ``bits[m]`` (shape ``[M, G, E]``)."""
    m_count, g_count, _ = bits.shape
    alive = np.ones((m_count, g_count), bool)
    for col in range(bits.shape[2]):
        vals = np.where(alive, bits[:, :, col], 2)
        alive &= vals == vals.min(axis=1, keepdims=True)
    return alive.argmax(axis=1)


def canonical_forms(sizes, forward) -> list[tuple[tuple[int, ...], str]]:
    """Canonical form of every row of ``forward`` (edge bits of one grid size)."""
    sizes = tuple(sizes)
    fw = np.atleast_2d(np.asarray(forward, np.uint8))
    keep = [i for i in _sorted_axes(sizes) if sizes[i] > 1] or [0]
    if sum(1 for s in sizes if s > 1) == 0:
        return [((1,), "")] * fw.shape[0]
    # move to squeezed, size-sorted axes; drops nothing since size-1 axes carry no edges
    new_sizes = tuple(sizes[i] for i in keep)
    full_perm = tuple(keep) + tuple(i for i in range(len(sizes)) if i not in keep)
    to_sorted, _ = _relabel_maps(sizes, full_perm, tuple(tuple(range(s)) for s in sizes))
    base = to_sorted(fw)
    _, src, flip = _symmetry_tables(new_sizes)
    res = []
    step = max(1, 4_000_000 // max(1, src.size))
    for lo in range(0, base.shape[0], step):
        chunk = base[lo : lo + step]
        cand = chunk[:, src] ^ flip[None]
        best = _lexmin_rows(cand)
        for m, g in enumerate(best):
            res.append((new_sizes, "".join(map(str, cand[m, g]))))
    return res


def canonical_form(orientation: GridOrientation) -> tuple[tuple[int, ...], str]:
    """Lexicographically smallest edge-bit string over all isomorphic copies.

    Axes of size one are dropped and the rest sorted by size first, so two
    orientations are isomorphic iff their canonical forms are equal.
    """
    return canonical_forms(orientation.sizes, orientation.forward()[None])[0]


def from_canonical(form: tuple[tuple[int, ...], str]) -> GridOrientation:
    sizes, bits = form
    return GridOrientation.from_forward(tuple(sizes), [int(b) for b in bits])


def find_isomorphism(a: GridOrientation, b: GridOrientation):
    """``(axis_perm, label_perms)`` with ``a.relabeled(...) == b``, or None."""
    if sorted(a.sizes) != sorted(b.sizes):
        return None
    fb = b.forward()
    r = len(a.sizes)
    for ap in permutations(range(r)):
        if tuple(a.sizes[i] for i in ap) != b.sizes:
            continue
        for lp in product(*(list(permutations(range(s))) for s in a.sizes)):
            fw, _ = _relabel_maps(a.sizes, ap, lp)
            if np.array_equal(fw(a.forward()), fb):
                return ap, lp
    return None


def contains_pattern(orientation: GridOrientation, pattern: GridOrientation):
    """A subgrid whose induced orientation is isomorphic to ``pattern``.

    Returns ``(subgrid, (axis_perm, label_perms))`` mapping the induced
    orientation (with size-one axes dropped) onto ``pattern`` (likewise
    squeezed), or None.
    """
    target = pattern.squeezed()
    want = canonical_form(target)
    want_sizes = sorted(s for s in pattern.sizes if s > 1)
    sh = orientation.shape
    for mask in sh.subgrid_masks():
        sub_sizes = [int(kernels.popcount(m)) for m in mask]
        if sorted(s for s in sub_sizes if s > 1) != want_sizes:
            continue
        if want_sizes == [] and sum(sub_sizes) != len(sub_sizes):
            continue
        sub = mask_to_subgrid(mask)
        induced = orientation.induced(sub).squeezed()
        if canonical_form(induced) == want:
            return sub, find_isomorphism(induced, target)
    return None


# -- enumeration ---------------------------------------------------------------

DEFAULT_NODE_BUDGET = 2_000_000_000


@lru_cache(maxsize=None)
def _enum_tables(sizes):
    sh = grid_shape(sizes)
    masks = sh.subgrid_masks()
    bits = (masks[:, None, :] >> sh.coords[None, :, :]) & 1
    member = bits.all(axis=2)
    # last edge index inside each subgrid
    e_in = member[:, sh.eu] & member[:, sh.ev]
    has = e_in.any(axis=1)
    if sh.n_edges:
        last = np.where(has, sh.n_edges - 1 - np.argmax(e_in[:, ::-1], axis=1), -1)
    else:
        last = np.full(masks.shape[0], -1)
    subs = np.nonzero(has)[0]
    order = subs[np.argsort(last[subs], kind="stable")]
    done_ptr = np.zeros(sh.n_edges + 1, np.int64)
    np.add.at(done_ptr, last[order] + 1, 1)
    done_ptr = np.cumsum(done_ptr)
    member_ptr = np.concatenate([[0], np.cumsum(member.sum(axis=1))]).astype(np.int64)
    member_list = np.nonzero(member)[1].astype(np.int64)
    return masks, done_ptr, order.astype(np.int64), member_ptr, member_list


def enumerate_uso_bits(sizes, budget: int = DEFAULT_NODE_BUDGET, max_edges: int = 64,
                       fixed=None) -> np.ndarray:
    """Edge bits ``[M, E]`` of every USO of the grid, in canonical backtracking order.

    ``fixed`` optionally pins edges (-1 free, 0/1 forced). Raises
    :class:`ShapeTooLarge` rather than truncating when the shape has more
    than ``max_edges`` edges or the search exceeds ``budget`` nodes.
    """
    sizes = tuple(int(s) for s in sizes)
    sh = grid_shape(sizes)
    if sh.n_edges > max_edges:
        raise ShapeTooLarge(f"{sh.n_edges} edges exceeds the limit of {max_edges}")
    masks, done_ptr, done_list, member_ptr, member_list = _enum_tables(sizes)
    pins = np.full(max(sh.n_edges, 1), -1, np.int8)
    if fixed is not None:
        pins[: sh.n_edges] = np.asarray(fixed, np.int8)
    cap = 1024
    while True:
        buf = np.zeros((cap, max(sh.n_edges, 1)), np.uint8)
        count, nodes, status = kernels.enum_usos(
            sh.eu, sh.ev, sh.edim, sh.coords, masks, done_ptr, done_list,
            member_ptr, member_list, pins, buf, budget,
        )
        if status == kernels.STATUS_BUDGET:
            raise ShapeTooLarge(f"USO search for {sizes} exceeded {budget} nodes")
        if status == kernels.STATUS_FULL:
            cap *= 8
            continue
        return buf[:count, : sh.n_edges]


def enumerate_usos(sizes, budget: int = DEFAULT_NODE_BUDGET, max_edges: int = 64) -> Iterator[GridOrientation]:
    for row in enumerate_uso_bits(sizes, budget, max_edges):
        yield GridOrientation.from_forward(sizes, row)


def normalized_pins(sizes) -> np.ndarray:
    """Pins for two-axis grids: row 0 and column 0 are linearly ordered with 0 lowest.

    Every 2-dim USO has exactly one relabelling (by label permutations) of
    this form, since the line orders through the global sink fix both label
    orders. So the USOs of an ``(a, b)`` grid are ``a! * b!`` times the
    normalized ones, and isomorphism invariants only need the latter.
    """
    sh = grid_shape(tuple(sizes))
    if sh.r != 2:
        raise ValueError("normalisation is defined for two axes")
    pins = np.full(sh.n_edges, -1, np.int8)
    for e in range(sh.n_edges):
        d = sh.edim[e]
        other = sh.coords[sh.eu[e], 1 - d]
        if other == 0:
            pins[e] = 0  # the higher label points down to the lower one
    return pins


def enumerate_normalized_usos_bits(sizes, budget: int = DEFAULT_NODE_BUDGET) -> np.ndarray:
    return enumerate_uso_bits(sizes, budget=budget, fixed=normalized_pins(sizes))


def all_orientation_bits(sizes) -> np.ndarray:
    """Every orientation as edge bits (only sensible for a handful of edges)."""
    sh = grid_shape(tuple(sizes))
    if sh.n_edges > 24:
        raise ShapeTooLarge(f"2^{sh.n_edges} orientations is too many to list")
    idx = np.arange(1 << sh.n_edges, dtype=np.int64)
    shifts = np.arange(sh.n_edges - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def uso_mask(sizes, forward_rows) -> np.ndarray:
    """Boolean USO flag per row of edge bits."""
    sh = grid_shape(tuple(sizes))
    outs = orientations_from_forward(sizes, forward_rows)
    return kernels.first_bad_subgrid(outs, sh.coords, sh.subgrid_masks()) < 0


def acyclic_mask(sizes, forward_rows) -> np.ndarray:
    sh = grid_shape(tuple(sizes))
    outs = orientations_from_forward(sizes, forward_rows)
    return kernels.acyclic(outs, sh.coords, sh.strides)


# -- batch pattern containment -------------------------------------------------


def _row_keys(bits: np.ndarray) -> np.ndarray:
    packed = np.ascontiguousarray(np.packbits(np.atleast_2d(bits).astype(np.uint8), axis=1))
    return packed.view(np.dtype((np.void, packed.shape[1]))).reshape(-1)


@lru_cache(maxsize=None)
def _pattern_edge_maps(sizes: tuple[int, ...], target: tuple[int, ...]) -> tuple[np.ndarray, ...]:
    """For each subgrid whose squeezed, size-sorted shape is ``target``: the parent
    edge index of every edge of the induced orientation (in ``target`` layout)."""
    sh = grid_shape(sizes)
    new = grid_shape(target)
    maps = []
    for mask in sh.subgrid_masks():
        factors = mask_to_subgrid(mask)
        keep = [i for i in _sorted_axes([len(f) for f in factors]) if len(factors[i]) > 1]
        if tuple(len(factors[i]) for i in keep) != target:
            continue
        emap = np.zeros(new.n_edges, np.int64)
        for e in range(new.n_edges):
            ends = []
            for nv in (new.eu[e], new.ev[e]):
                old = [f[0] for f in factors]
                for j, i in enumerate(keep):
                    old[i] = factors[i][new.coords[nv, j]]
                ends.append(sh.index(old))
            emap[e] = sh.edge_index[(min(ends), max(ends))]
        maps.append(emap)
    return tuple(maps)


def pattern_orbit(pattern: GridOrientation) -> tuple[tuple[int, ...], np.ndarray]:
    """Squeezed size-sorted shape of ``pattern`` and the edge bits of all its relabelings."""
    sizes, bits = canonical_form(pattern)
    _, src, flip = _symmetry_tables(sizes)
    base = np.array([int(b) for b in bits], np.uint8)
    return sizes, np.unique(base[src] ^ flip, axis=0)


def pattern_mask(sizes, forward_rows, pattern: GridOrientation) -> np.ndarray:
    """Per row of edge bits: does the orientation contain ``pattern``?"""
    sizes = tuple(sizes)
    rows = np.atleast_2d(np.asarray(forward_rows, np.uint8))
    target, orbit = pattern_orbit(pattern)
    keys = _row_keys(orbit)
    hit = np.zeros(rows.shape[0], bool)
    for emap in _pattern_edge_maps(sizes, target):
        hit |= np.isin(_row_keys(rows[:, emap]), keys)
    return hit
