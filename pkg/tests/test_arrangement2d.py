import numpy as np
import pytest

from conftest import RUNNING_BLUE, RUNNING_RED
from usosig.admissibility import derive_pattern_catalog, is_admissible
from usosig.arrangement2d import (
    Arrangement2D,
    admissible_pictures,
    arrangement_from,
    bijection_report,
    crossing_counts,
    crossing_index,
    crossing_posets,
    crossing_table,
    curves_from_uso,
    emit_svg,
    extension_of,
    flip_class_partition,
    grid_drawing,
    identification,
    identification_of,
    is_valid_identification,
    picture,
    uso_from_arrangement,
)
from usosig.blocksig import BlockSignotope, induced_orientation
from usosig.combinat import Poset, linear_extensions
from usosig.grid import GridOrientation, contains_pattern, enumerate_normalized_usos_bits, uso_from_refined_index
from usosig.signotope import Signotope, enumerate_signotopes, random_signotopes


def arrangements(r, b):
    for chi in enumerate_signotopes(r + b, 3):
        yield Arrangement2D(chi, r, b)


def mirror_index(arr, p, q):
    # red p meets blue k < q before q iff chi(p, k, q) = -
    chi = arr.chi
    x = sum(1 for k in arr.blues if k < q and chi(p, k, q) < 0)
    x += sum(1 for k in arr.blues if k > q and chi(p, q, k) > 0)
    y = sum(1 for i in arr.reds if i < p and chi(i, p, q) > 0)
    y += sum(1 for i in arr.reds if i > p and chi(p, i, q) < 0)
    return x, y


def test_running_example(running_example):
    uso, arr = running_example
    assert crossing_index(arr, 1, 6) == (4, 2)
    assert identification(arr) == (RUNNING_BLUE, RUNNING_RED)
    assert picture(arr) == curves_from_uso(uso)
    assert is_admissible(uso) and uso.sizes == (5, 5)
    assert tuple(uso_from_arrangement(arr).refined_index()[0, 0]) == (4, 2)


def test_arrangement_validation_and_json():
    with pytest.raises(ValueError):
        Arrangement2D(Signotope.constant(4, 3), 2, 3)
    with pytest.raises(ValueError):
        Arrangement2D(Signotope.constant(4, 3), 0, 4)
    arr = Arrangement2D(Signotope.constant(5, 3), 2, 3)
    assert Arrangement2D.from_json(arr.to_json()) == arr
    assert list(arr.reds) == [1, 2] and list(arr.blues) == [3, 4, 5]
    with pytest.raises(ValueError):
        crossing_index(arr, 3, 3)
    with pytest.raises(ValueError):
        crossing_index(arr, 1, 2)


@pytest.mark.parametrize("r,b", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_crossing_rule_is_pinned_by_the_induced_orientation(r, b):
    # the orientation of an arrangement is the induced one, reversed and transposed;
    # the mirrored reading of the red order is also bijective but never agrees
    mirror_agrees = 0
    for arr in arrangements(r, b):
        o = induced_orientation(BlockSignotope(arr.chi, [r, b])).reversed().transposed()
        assert uso_from_arrangement(arr) == o
        rf = np.zeros((b, r, 2), np.int64)
        for p in arr.reds:
            for q in arr.blues:
                rf[q - r - 1, p - 1] = mirror_index(arr, p, q)
        points = {tuple(v) for v in rf.reshape(-1, 2).tolist()}
        assert len(points) == r * b
        mirror_agrees += uso_from_refined_index(rf) == o
    assert mirror_agrees == 0


@pytest.mark.parametrize("r,b", [(1, 3), (2, 2), (3, 2), (2, 4)])
def test_crossing_index_is_bijective(r, b):
    target = {(x, y) for x in range(b) for y in range(r)}
    for arr in arrangements(r, b):
        assert set(crossing_table(arr).values()) == target


def test_arrangement_usos_are_admissible_and_avoid_dt():
    dt = derive_pattern_catalog().DT
    for arr in arrangements(3, 3):
        o = uso_from_arrangement(arr)
        assert is_admissible(o)
        assert contains_pattern(o, dt) is None


def test_grid_drawing_paths():
    arr = next(iter(arrangements(2, 3)))
    d = grid_drawing(arr)
    assert (d.rows, d.cols) == (3, 2)
    for p, pts in d.red_paths.items():
        assert [pt[0] for pt in pts] == list(range(3))
        assert all(abs(a[1] - c[1]) <= 1 for a, c in zip(pts, pts[1:]))
    for q, pts in d.blue_paths.items():
        assert [pt[1] for pt in pts] == list(range(2))
    assert d.placement[1, 3] == crossing_index(arr, 1, 3)


def test_curves_cross_at_most_once():
    for sizes in [(2, 3), (3, 3), (3, 4), (4, 4)]:
        rows = enumerate_normalized_usos_bits(sizes)
        rows = rows[:: max(1, len(rows) // 300)]
        for row in rows:
            o = GridOrientation.from_forward(sizes, row)
            if not is_admissible(o):
                continue
            blue, red = crossing_counts(curves_from_uso(o))
            assert blue.max(initial=0) <= 1 and red.max(initial=0) <= 1


def test_curves_reject_bad_input():
    dt = derive_pattern_catalog().DT
    with pytest.raises(ValueError):
        curves_from_uso(dt)
    with pytest.raises(ValueError):
        curves_from_uso(GridOrientation.from_function((2, 2, 2), lambda u, v: True))


def test_identification_helpers():
    assert extension_of((3, 1, 2)) == (2, 3, 1)
    assert identification_of(extension_of((6, 4, 5)), 4) == (6, 4, 5)
    pos = Poset([1, 2, 3], [(1, 3)])
    assert is_valid_identification(pos, (4, 6, 5))
    assert not is_valid_identification(pos, (5, 6, 4))
    assert sum(is_valid_identification(pos, identification_of(e, 1)) for e in linear_extensions(pos)) == 3


def test_identification_is_valid_for_its_picture():
    for arr in list(arrangements(3, 3))[::7]:
        blue, red = identification(arr)
        pb, pr = crossing_posets(picture(arr))
        assert is_valid_identification(pb, [q - arr.r for q in blue])
        assert is_valid_identification(pr, red)


def test_arrangement_from_round_trip():
    classes = flip_class_partition(2, 3)
    owner = {chi: k for k, cls in enumerate(classes) for chi in cls}
    for arr in arrangements(2, 3):
        back = arrangement_from(uso_from_arrangement(arr), *identification(arr))
        assert picture(back) == picture(arr)
        assert identification(back) == identification(arr)
        assert owner[back.chi] == owner[arr.chi]


def test_arrangement_from_rejects_bad_labels():
    o = admissible_pictures(2, 2)[0]
    with pytest.raises(ValueError):
        arrangement_from(o, (1, 2), (3, 4))
    pb, _ = crossing_posets(curves_from_uso(o))
    if pb.relations:
        with pytest.raises(ValueError):
            arrangement_from(o, (4, 3), (1, 2))


def test_bijection_small_cases():
    one = bijection_report(1, 1)
    assert (one.signotopes, one.flip_classes, one.pictures, one.extension_sum) == (1, 1, 1, 1)
    two = bijection_report(2, 2)
    assert two.ok and two.signotopes == 8 and two.round_trip_failures == 0
    assert two.flip_classes == two.extension_sum


def test_random_arrangements_are_consistent():
    for chi in random_signotopes(7, 3, 10, seed=5):
        arr = Arrangement2D(chi, 3, 4)
        o = uso_from_arrangement(arr)
        assert o.is_uso() and is_admissible(o)
        assert set(crossing_table(arr).values()) == {(x, y) for x in range(4) for y in range(3)}


def test_svg_is_deterministic():
    arr = next(iter(arrangements(2, 2)))
    a = emit_svg(grid_drawing(arr))
    assert a == emit_svg(grid_drawing(arr))
    assert a.startswith("<svg") and a.endswith("</svg>\n")
    assert a.count("<circle") == 4 and a.count('class="red"') == 2 and a.count('class="blue"') == 2


def test_svg_single_point_and_five_by_five(running_example):
    one = emit_svg(grid_drawing(Arrangement2D(Signotope.constant(2, 3), 1, 1)))
    assert one.count("<circle") == 1
    _, arr = running_example
    svg = emit_svg(grid_drawing(arr))
    assert svg.count("<circle") == 25
    assert svg.count("<polyline") == 10

