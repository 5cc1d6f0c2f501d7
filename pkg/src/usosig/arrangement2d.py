"""Block colored pseudoline arrangements (rank 3, two blocks), grid drawings,
curve families of 2-dim USOs and the arrangement/orientation correspondence.

Labels ``1..r`` are red and ``r+1..r+b`` blue. Crossing orders are read off
the signs: for reds ``i < j`` and a blue ``k``, ``chi(i, j, k) = +`` iff ``k``
(left to right) meets ``i`` before ``j``; for a red ``p`` and blues
``k < l``, ``chi(p, k, l) = +`` iff ``p`` (top to bottom) meets ``k`` before
``l``. The grid has ``b`` rows and ``r`` columns; grid point ``(x, y)`` is
row ``x``, column ``y``, counted from the top left.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Mapping, Sequence

import numpy as np

from .admissibility import admissible_mask
from .blocksig import BlockPartition, BlockSignotope
from .combinat import Poset, k_subsets, linear_extensions
from .grid import GridOrientation, enumerate_normalized_usos_bits, uso_from_refined_index
from .signotope import Signotope, enumerate_signotopes, flip_classes


class Arrangement2D:
    """A rank-3 signotope on ``[r + b]`` with the blocks ``(r, b)``."""

    __slots__ = ("chi", "r", "b")

    def __init__(self, chi: Signotope, r: int, b: int):
        if r < 1 or b < 1:
            raise ValueError("need at least one red and one blue pseudoline")
        if chi.rank != 3 or chi.n != r + b:
            raise ValueError(f"need a rank-3 signotope on [{r + b}], got rank {chi.rank} on [{chi.n}]")
        self.chi = chi
        self.r = r
        self.b = b

    @classmethod
    def from_block(cls, block: BlockSignotope) -> "Arrangement2D":
        if len(block.sizes) != 2:
            raise ValueError("an arrangement has exactly two blocks")
        return cls(block.chi, *block.sizes)

    @property
    def block(self) -> BlockSignotope:
        return BlockSignotope(self.chi, BlockPartition([self.r, self.b]))

    @property
    def reds(self) -> range:
        return range(1, self.r + 1)

    @property
    def blues(self) -> range:
        return range(self.r + 1, self.r + self.b + 1)

    def to_json(self) -> dict:
        return self.block.to_json()

    @classmethod
    def from_json(cls, data: Mapping) -> "Arrangement2D":
        return cls.from_block(BlockSignotope.from_json(data))

    def __eq__(self, other):
        return isinstance(other, Arrangement2D) and (self.chi, self.r, self.b) == (other.chi, other.r, other.b)

    def __hash__(self):
        return hash((self.chi, self.r, self.b))

    def __repr__(self):
        return f"Arrangement2D(r={self.r}, b={self.b}, signs={self.chi.to_string()!r})"


def crossing_index(arr: Arrangement2D, p: int, q: int) -> tuple[int, int]:
    """``(x, y)``: blues that ``p`` meets before ``q``, reds that ``q`` meets before ``p``."""
    if p not in arr.reds:
        raise ValueError(f"{p} is not a red label")
    if q not in arr.blues:
        raise ValueError(f"{q} is not a blue label")
    chi = arr.chi
    x = sum(1 for k in arr.blues if k < q and chi(p, k, q) > 0)
    x += sum(1 for k in arr.blues if k > q and chi(p, q, k) < 0)
    y = sum(1 for i in arr.reds if i < p and chi(i, p, q) > 0)
    y += sum(1 for i in arr.reds if i > p and chi(p, i, q) < 0)
    return x, y


def crossing_table(arr: Arrangement2D) -> dict[tuple[int, int], tuple[int, int]]:
    return {(p, q): crossing_index(arr, p, q) for p in arr.reds for q in arr.blues}


def uso_from_arrangement(arr: Arrangement2D) -> GridOrientation:
    """The USO of size ``(b, r)`` whose refined index at (blue q, red p) is ``cri(p, q)``."""
    rf = np.zeros((arr.b, arr.r, 2), np.int64)
    for (p, q), xy in crossing_table(arr).items():
        rf[q - arr.r - 1, p - 1] = xy
    return uso_from_refined_index(rf)


# -- drawings and curves ------------------------------------------------------------------


@dataclass(frozen=True)
class GridDrawing:
    rows: int
    cols: int
    placement: dict = field(hash=False)  # (p, q) -> (row, col)
    red_paths: dict = field(hash=False)  # p -> points sorted by row
    blue_paths: dict = field(hash=False)  # q -> points sorted by column


def grid_drawing(arr: Arrangement2D) -> GridDrawing:
    """Every red-blue crossing sits at grid point ``cri(p, q)``; polylines follow."""
    table = crossing_table(arr)
    if len(set(table.values())) != arr.r * arr.b:
        raise ValueError("crossing indices are not bijective")
    red = {p: sorted(table[p, q] for q in arr.blues) for p in arr.reds}
    blue = {q: sorted((table[p, q] for p in arr.reds), key=lambda t: t[1]) for q in arr.blues}
    return GridDrawing(arr.b, arr.r, dict(sorted(table.items())), red, blue)


@dataclass(frozen=True)
class CurveFamily:
    """``blue[i - 1][col]`` is the row of ``B_i`` in column ``col``;
    ``red[j - 1][row]`` is the column of ``R_j`` in row ``row``."""

    rows: int
    cols: int
    blue: tuple[tuple[int, ...], ...]
    red: tuple[tuple[int, ...], ...]


def curves_from_uso(uso: GridOrientation, check: bool = True) -> CurveFamily:
    """Blue curve per row of the orientation, red curve per column, through the rf points."""
    if len(uso.sizes) != 2:
        raise ValueError("curves are defined for two-axis grids")
    if check:
        if not uso.is_uso():
            raise ValueError("not a unique sink orientation")
        if not admissible_mask(uso.sizes, uso.forward()[None])[0]:
            raise ValueError("orientation is not admissible")
    b, r = uso.sizes
    rf = uso.refined_index()
    blue = [None] * b
    for i in range(b):
        rows = [0] * r
        for j in range(r):
            x, y = rf[i, j]
            rows[y] = int(x)
        blue[rows[0]] = tuple(rows)  # B_k starts in row k - 1
    red = [None] * r
    for j in range(r):
        cols = [0] * b
        for i in range(b):
            x, y = rf[i, j]
            cols[x] = int(y)
        red[r - 1 - cols[0]] = tuple(cols)  # R_k starts in column r - k
    return CurveFamily(b, r, tuple(blue), tuple(red))


def picture(arr: Arrangement2D) -> CurveFamily:
    return curves_from_uso(uso_from_arrangement(arr), check=False)


def _swaps(a: Sequence[int], c: Sequence[int]) -> int:
    signs = [1 if u > v else -1 for u, v in zip(a, c)]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def crossing_counts(family: CurveFamily) -> tuple[np.ndarray, np.ndarray]:
    """How often each pair of blue (resp. red) curves swaps order."""
    nb, nr = len(family.blue), len(family.red)
    blue = np.zeros((nb, nb), np.int64)
    red = np.zeros((nr, nr), np.int64)
    for i, j in combinations(range(nb), 2):
        blue[i, j] = blue[j, i] = _swaps(family.blue[i], family.blue[j])
    for i, j in combinations(range(nr), 2):
        red[i, j] = red[j, i] = _swaps(family.red[i], family.red[j])
    return blue, red


def crossing_posets(family: CurveFamily) -> tuple[Poset, Poset]:
    """``i < j`` in the blue (red) poset iff ``B_i``, ``B_j`` (``R_i``, ``R_j``) cross."""
    blue, red = crossing_counts(family)
    nb, nr = len(family.blue), len(family.red)
    pb = Poset(range(1, nb + 1), [(i + 1, j + 1) for i, j in combinations(range(nb), 2) if blue[i, j]])
    pr = Poset(range(1, nr + 1), [(i + 1, j + 1) for i, j in combinations(range(nr), 2) if red[i, j]])
    return pb, pr


# -- identifications -------------------------------------------------------------------
# An identification lists the pseudoline label of each curve: (label of B_1, ..., B_b).
# It is valid iff crossing curves B_i, B_j (i < j) get increasing labels, i.e. iff
# the curves sorted by label form a linear extension of the crossing poset.


def identification(arr: Arrangement2D) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Labels of ``(B_1, ..., B_b)`` and ``(R_1, ..., R_r)`` in ``arr``."""
    table = crossing_table(arr)
    blue = [0] * arr.b
    red = [0] * arr.r
    for (p, q), (x, y) in table.items():
        if y == 0:
            blue[x] = q
        if x == 0:
            red[arr.r - 1 - y] = p
    return tuple(blue), tuple(red)


def is_valid_identification(poset: Poset, labels: Sequence[int]) -> bool:
    if sorted(poset.ground) != list(range(1, len(labels) + 1)):
        return False
    return all(labels[i - 1] < labels[j - 1] for i, j in poset.relations)


def extension_of(labels: Sequence[int]) -> tuple[int, ...]:
    """Curve indices in increasing label order."""
    return tuple(i + 1 for i in sorted(range(len(labels)), key=lambda i: labels[i]))


def identification_of(extension: Sequence[int], first_label: int) -> tuple[int, ...]:
    """Inverse of :func:`extension_of` with labels ``first_label, first_label + 1, ...``."""
    res = [0] * len(extension)
    for pos, curve in enumerate(extension):
        res[curve - 1] = first_label + pos
    return tuple(res)


@lru_cache(maxsize=None)
def monochromatic_triples(r: int, b: int) -> tuple[tuple[int, ...], ...]:
    reds = [t for t in k_subsets(r + b, 3) if t[2] <= r]
    blues = [t for t in k_subsets(r + b, 3) if t[0] > r]
    return tuple(reds + blues)


def labelled_crossings(family: CurveFamily, blue_labels: Sequence[int], red_labels: Sequence[int]) -> dict:
    """``(p, q) -> (row, col)``: where the curves identified with ``p`` and ``q`` meet."""
    on_blue = {}
    for k, rows in enumerate(family.blue):
        for col, row in enumerate(rows):
            on_blue[row, col] = blue_labels[k]
    res = {}
    for k, cols in enumerate(family.red):
        for row, col in enumerate(cols):
            res[red_labels[k], on_blue[row, col]] = (row, col)
    return res


def bichromatic_signs(family: CurveFamily, blue_labels: Sequence[int], red_labels: Sequence[int]) -> np.ndarray:
    """Sign vector forced by a picture and an identification (0 on monochromatic triples)."""
    b, r = family.rows, family.cols
    cri = labelled_crossings(family, blue_labels, red_labels)
    n = r + b
    fixed = np.zeros(comb(n, 3), np.int8)
    for pos, t in enumerate(k_subsets(n, 3)):
        n_red = sum(1 for x in t if x <= r)
        if n_red == 2:
            i, j, k = t
            fixed[pos] = 1 if cri[i, k][1] < cri[j, k][1] else -1
        elif n_red == 1:
            p, k, l = t
            fixed[pos] = 1 if cri[p, k][0] < cri[p, l][0] else -1
    return fixed


def arrangement_from(uso: GridOrientation, blue_labels: Sequence[int], red_labels: Sequence[int]) -> Arrangement2D:
    """An arrangement with the picture of ``uso`` and the given curve labels.

    ``blue_labels[k]`` is the pseudoline of ``B_{k+1}`` (labels ``r+1..r+b``),
    ``red_labels[k]`` that of ``R_{k+1}`` (labels ``1..r``). The crossing signs
    follow from the picture; the monochromatic signs are completed by search,
    taking the first completion in canonical order (all completions are one
    flip class).
    """
    fam = curves_from_uso(uso)
    b, r = fam.rows, fam.cols
    if sorted(blue_labels) != list(range(r + 1, r + b + 1)) or sorted(red_labels) != list(range(1, r + 1)):
        raise ValueError("labels must be a permutation of the red resp. blue block")
    pb, pr = crossing_posets(fam)
    if not is_valid_identification(pb, blue_labels):
        raise ValueError("blue labels contradict the blue crossing poset")
    if not is_valid_identification(pr, red_labels):
        raise ValueError("red labels contradict the red crossing poset")
    fixed = bichromatic_signs(fam, blue_labels, red_labels)
    for chi in enumerate_signotopes(r + b, 3, fixed=fixed):
        return Arrangement2D(chi, r, b)
    raise RuntimeError("no signotope completes the crossing signs")


# -- the counting identity ---------------------------------------------------------------


def flip_class_partition(r: int, b: int) -> list[set[Signotope]]:
    return flip_classes(enumerate_signotopes(r + b, 3), monochromatic_triples(r, b))


def admissible_pictures(r: int, b: int) -> list[GridOrientation]:
    """One admissible USO of size ``(b, r)`` per picture (label-permutation orbit)."""
    rows = enumerate_normalized_usos_bits((b, r))
    rows = rows[admissible_mask((b, r), rows)]
    return [GridOrientation.from_forward((b, r), row) for row in rows]


def extension_product(uso: GridOrientation) -> int:
    pb, pr = crossing_posets(curves_from_uso(uso, check=False))
    return len(linear_extensions(pb)) * len(linear_extensions(pr))


@dataclass
class BijectionReport:
    r: int
    b: int
    signotopes: int
    flip_classes: int
    pictures: int
    extension_sum: int
    round_trips: int
    round_trip_failures: int

    @property
    def ok(self) -> bool:
        return self.flip_classes == self.extension_sum and self.round_trip_failures == 0


def bijection_report(r: int, b: int) -> BijectionReport:
    classes = flip_class_partition(r, b)
    owner = {chi: k for k, cls in enumerate(classes) for chi in cls}
    pics = admissible_pictures(r, b)
    total = sum(extension_product(o) for o in pics)
    failures = 0
    for chi in owner:
        arr = Arrangement2D(chi, r, b)
        uso = uso_from_arrangement(arr)
        blue, red = identification(arr)
        back = arrangement_from(uso, blue, red)
        if owner.get(back.chi) != owner[chi] or picture(back) != picture(arr):
            failures += 1
    return BijectionReport(r, b, len(owner), len(classes), len(pics), total, len(owner), failures)


# -- SVG -----------------------------------------------------------------------------------


@dataclass(frozen=True)
class SvgStyle:
    spacing: float = 40.0
    margin: float = 50.0
    overhang: float = 25.0
    point_radius: float = 3.0
    stroke_width: float = 2.0
    red: str = "#c0392b"
    blue: str = "#2e6fb7"
    point: str = "#333333"
    font_size: float = 12.0


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def emit_svg(drawing: GridDrawing, style: SvgStyle = SvgStyle()) -> str:
    """Deterministic SVG of a grid drawing, in the layout of a wiring sketch."""
    s = style

    def px(row, col):
        return s.margin + col * s.spacing, s.margin + row * s.spacing

    width = 2 * s.margin + (drawing.cols - 1) * s.spacing
    height = 2 * s.margin + (drawing.rows - 1) * s.spacing
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f'<g fill="none" stroke-width="{_fmt(s.stroke_width)}">',
    ]
    labels = []
    for p, pts in sorted(drawing.red_paths.items()):
        xy = [px(*pt) for pt in pts]
        xy = [(xy[0][0], xy[0][1] - s.overhang)] + xy + [(xy[-1][0], xy[-1][1] + s.overhang)]
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in xy)
        out.append(f'<polyline class="red" stroke="{s.red}" points="{coords}"/>')
        labels.append((xy[0][0], xy[0][1] - 4, "middle", s.red, p))
        labels.append((xy[-1][0], xy[-1][1] + s.font_size + 2, "middle", s.red, p))
    for q, pts in sorted(drawing.blue_paths.items()):
        xy = [px(*pt) for pt in pts]
        xy = [(xy[0][0] - s.overhang, xy[0][1])] + xy + [(xy[-1][0] + s.overhang, xy[-1][1])]
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in xy)
        out.append(f'<polyline class="blue" stroke="{s.blue}" points="{coords}"/>')
        labels.append((xy[0][0] - 4, xy[0][1] + s.font_size / 3, "end", s.blue, q))
        labels.append((xy[-1][0] + 4, xy[-1][1] + s.font_size / 3, "start", s.blue, q))
    out.append("</g>")
    out.append(f'<g fill="{s.point}">')
    for row in range(drawing.rows):
        for col in range(drawing.cols):
            x, y = px(row, col)
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(s.point_radius)}"/>')
    out.append("</g>")
    out.append(f'<g font-family="sans-serif" font-size="{_fmt(s.font_size)}">')
    for x, y, anchor, color, text in labels:
        out.append(f'<text x="{_fmt(x)}" y="{_fmt(y)}" text-anchor="{anchor}" fill="{color}">{text}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
