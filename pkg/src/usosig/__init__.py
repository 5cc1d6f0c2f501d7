"""Unique sink orientations of grids induced by block signotopes."""

from ._jit import backend
from .admissibility import derive_pattern_catalog, is_admissible, is_admissible_dim3, max_disjoint_dipaths
from .arrangement2d import Arrangement2D, arrangement_from, crossing_index, uso_from_arrangement
from .blocksig import BlockPartition, BlockSignotope, induced_orientation, rf_chi
from .grid import GridOrientation, canonical_form, contains_pattern, enumerate_usos
from .signotope import Signotope, enumerate_signotopes, is_signotope

__version__ = "0.1.0"

__all__ = [
    "Arrangement2D",
    "BlockPartition",
    "BlockSignotope",
    "GridOrientation",
    "Signotope",
    "arrangement_from",
    "backend",
    "canonical_form",
    "contains_pattern",
    "crossing_index",
    "derive_pattern_catalog",
    "enumerate_signotopes",
    "enumerate_usos",
    "induced_orientation",
    "is_admissible",
    "is_admissible_dim3",
    "is_signotope",
    "max_disjoint_dipaths",
    "rf_chi",
    "uso_from_arrangement",
]
