"""Holt-Klee admissibility: internally disjoint source-to-sink paths in every subgrid.

Path counts are vertex-split maximum flows. The forbidden patterns DT, NAC1
and NAC2 are derived by exhaustive search, never entered by hand.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import kernels
from .grid import (
    GridOrientation,
    NotAUSO,
    Subgrid,
    acyclic_mask,
    canonical_forms,
    contains_pattern,
    enumerate_uso_bits,
    from_canonical,
    full_subgrid,
    grid_shape,
    mask_to_subgrid,
    orientations_from_forward,
    pattern_mask,
    subgrid_mask,
)


class NoUniqueSourceSink(ValueError):
    pass


class CatalogMismatch(RuntimeError):
    pass


def max_disjoint_dipaths(orientation: GridOrientation, subgrid: Subgrid | None = None) -> int:
    """Largest number of source-to-sink dipaths inside ``subgrid`` sharing no inner vertex."""
    sh = orientation.shape
    mask = subgrid_mask(subgrid if subgrid is not None else full_subgrid(sh.sizes), sh.sizes)
    src, snk = kernels.source_sink(orientation.out, sh.coords, mask)
    if src < 0 or snk < 0:
        raise NoUniqueSourceSink("subgrid has no unique source or no unique sink")
    if src == snk:
        return 0
    limit = sh.n_vertices * sh.r
    return int(kernels.max_paths(orientation.out, sh.coords, sh.strides, mask, src, snk, limit))


def path_requirement(subgrid: Subgrid) -> int:
    return sum(len(f) for f in subgrid) - len(subgrid)


@dataclass(frozen=True)
class Violation:
    subgrid: Subgrid
    paths: int
    required: int


def first_violation(orientation: GridOrientation) -> Violation | None:
    """Smallest subgrid (by vertex count) with too few disjoint paths."""
    sh = orientation.shape
    masks, need = sh.subgrid_masks(), sh.path_requirements()
    s = int(kernels.first_inadmissible(orientation.out[None], sh.coords, sh.strides, masks, need)[0])
    if s == -1:
        return None
    if s == -2:
        raise NotAUSO("some subgrid lacks a unique source or sink")
    sub = mask_to_subgrid(masks[s])
    return Violation(sub, max_disjoint_dipaths(orientation, sub), int(need[s]))


def is_admissible(orientation: GridOrientation) -> bool:
    """Every subgrid of size (n_1', ..., n_r') has sum(n_i') - r disjoint dipaths.

    Cyclic USOs are evaluated too; the definition does not ask for acyclicity.
    """
    if not orientation.is_uso():
        raise NotAUSO("admissibility is defined for unique sink orientations")
    return first_violation(orientation) is None


def admissible_mask(sizes, forward_rows) -> np.ndarray:
    """Batch version for rows of edge bits that are all USOs."""
    sh = grid_shape(tuple(sizes))
    outs = orientations_from_forward(sizes, forward_rows)
    res = kernels.first_inadmissible(outs, sh.coords, sh.strides, sh.subgrid_masks(), sh.path_requirements())
    if (res == -2).any():
        raise NotAUSO("batch contains an orientation that is not a USO")
    return res == -1


# -- forbidden patterns --------------------------------------------------------


@dataclass(frozen=True)
class PatternCatalog:
    DT: GridOrientation
    NAC1: GridOrientation
    NAC2: GridOrientation
    dt_shape: tuple[int, ...]
    smaller_shapes: tuple[tuple[int, ...], ...]
    cube_uso_count: int
    cube_acyclic_count: int

    def to_json(self) -> dict:
        def enc(o):
            return {"shape": list(o.sizes), "forward": "".join(map(str, o.forward()))}

        return {
            "DT": enc(self.DT),
            "NAC1": enc(self.NAC1),
            "NAC2": enc(self.NAC2),
            "dt_shape": list(self.dt_shape),
            "shapes_without_dt": [list(s) for s in self.smaller_shapes],
            "cube_uso_count": self.cube_uso_count,
            "cube_acyclic_count": self.cube_acyclic_count,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def two_dim_shapes_by_edges(limit: int) -> list[tuple[int, int]]:
    """Shapes (a, b), 2 <= a <= b, ordered by edge count, up to ``limit`` edges."""
    shapes = []
    for a in range(2, limit + 1):
        for b in range(a, limit + 1):
            edges = a * b * (a + b - 2) // 2
            if edges <= limit:
                shapes.append((edges, a, b))
    return [(a, b) for _, a, b in sorted(shapes)]


def bad_classes(sizes) -> list[tuple]:
    """Canonical forms of the acyclic, non-admissible USOs of a grid size."""
    rows = enumerate_uso_bits(sizes)
    rows = rows[acyclic_mask(sizes, rows)]
    bad = rows[~admissible_mask(sizes, rows)]
    return sorted(set(canonical_forms(sizes, bad))) if len(bad) else []


@lru_cache(maxsize=None)
def derive_pattern_catalog(edge_limit: int = 30) -> PatternCatalog:
    """Search 2-dim shapes by edge count for DT, and the 3-cube for NAC1/NAC2."""
    smaller = []
    dt = None
    for shape in two_dim_shapes_by_edges(edge_limit):
        classes = bad_classes(shape)
        if not classes:
            smaller.append(shape)
            continue
        if len(classes) != 1:
            raise CatalogMismatch(f"{len(classes)} non-admissible classes at the minimal shape {shape}")
        dt = from_canonical(classes[0])
        dt_shape = shape
        break
    if dt is None:
        raise CatalogMismatch(f"no non-admissible acyclic 2-dim USO within {edge_limit} edges")
    cube = (2, 2, 2)
    rows = enumerate_uso_bits(cube)
    acyc = rows[acyclic_mask(cube, rows)]
    bad = acyc[~admissible_mask(cube, acyc)]
    classes = sorted(set(canonical_forms(cube, bad)))
    if len(classes) != 2:
        raise CatalogMismatch(f"expected two non-admissible acyclic cube classes, found {len(classes)}")
    # the two classes share every invariant we tried; the larger canonical form is the
    # one certified by the first table, so it takes the name NAC1
    nac2, nac1 = (from_canonical(c) for c in classes)
    return PatternCatalog(dt, nac1, nac2, dt_shape, tuple(smaller), len(rows), len(acyc))


def _check_dim3(orientation: GridOrientation):
    if orientation.shape.dimension > 3:
        raise ValueError("the pattern criterion covers dimension at most 3")
    if not orientation.is_uso():
        raise NotAUSO("pattern criterion needs a USO")
    if not orientation.is_acyclic():
        raise ValueError("pattern criterion needs an acyclic orientation")


def is_admissible_dim3(orientation: GridOrientation, catalog: PatternCatalog | None = None) -> bool:
    """Admissible iff none of DT, NAC1, NAC2 occurs (acyclic USOs, dimension <= 3)."""
    _check_dim3(orientation)
    cat = catalog or derive_pattern_catalog()
    return all(contains_pattern(orientation, p) is None for p in (cat.DT, cat.NAC1, cat.NAC2))


def pattern_free_mask(sizes, forward_rows, patterns: Sequence[GridOrientation]) -> np.ndarray:
    """Batch: True where no pattern occurs. Inputs are assumed to be acyclic USOs."""
    rows = np.atleast_2d(np.asarray(forward_rows, np.uint8))
    hit = np.zeros(rows.shape[0], bool)
    for p in patterns:
        if p.shape.dimension <= sum(1 for s in sizes if s > 1):
            hit |= pattern_mask(sizes, rows, p)
    return ~hit


def dim3_mask(sizes, forward_rows, catalog: PatternCatalog | None = None) -> np.ndarray:
    cat = catalog or derive_pattern_catalog()
    return pattern_free_mask(sizes, forward_rows, (cat.DT, cat.NAC1, cat.NAC2))
