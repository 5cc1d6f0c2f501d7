import os
import subprocess
import sys
from math import comb

import numpy as np
import pytest

from usosig import kernels
from usosig.grid import all_orientation_bits, enumerate_uso_bits, grid_shape, orientations_from_forward
from usosig.signotope import omission_table, superset_lists


def workloads():
    yield (2, 3), all_orientation_bits((2, 3))[::5]
    yield (2, 2, 2), all_orientation_bits((2, 2, 2))[::17]
    yield (3, 3), enumerate_uso_bits((3, 3))[::97]


@pytest.mark.parametrize("n,rank", [(5, 3), (6, 4), (5, 2)])
def test_enum_signs_twins(n, rank):
    n_sub = comb(n, rank)
    ptr, lst = superset_lists(n, rank)
    table = omission_table(n, rank)
    fixed = np.zeros(n_sub, np.int8)
    res = []
    for kernel in (kernels._enum_signs_nb, kernels._enum_signs_np):
        out = np.zeros((1000, n_sub), np.int8)
        count, nodes, status = kernel(n_sub, ptr, lst, table, fixed, out, 1 << 40)
        res.append((out[:count].copy(), nodes, status))
    assert np.array_equal(res[0][0], res[1][0])
    assert res[0][1:] == res[1][1:]
    assert res[0][2] == kernels.STATUS_DONE


def test_enum_signs_status_codes():
    n_sub = comb(6, 3)
    ptr, lst = superset_lists(6, 3)
    table = omission_table(6, 3)
    fixed = np.zeros(n_sub, np.int8)
    for kernel in (kernels._enum_signs_nb, kernels._enum_signs_np):
        out = np.zeros((10, n_sub), np.int8)
        assert kernel(n_sub, ptr, lst, table, fixed, out, 1 << 40)[2] == kernels.STATUS_FULL
        out = np.zeros((1000, n_sub), np.int8)
        assert kernel(n_sub, ptr, lst, table, fixed, out, 5)[2] == kernels.STATUS_BUDGET


@pytest.mark.parametrize("sizes,rows", list(workloads()), ids=lambda x: str(x) if isinstance(x, tuple) else "")
def test_orientation_kernel_twins(sizes, rows):
    sh = grid_shape(sizes)
    outs = orientations_from_forward(sizes, rows)
    fw = np.ascontiguousarray(rows, np.uint8)
    buf = [np.zeros((len(rows), sh.n_vertices, sh.r), np.int64) for _ in range(2)]
    assert np.array_equal(kernels._forward_to_out_nb(fw, sh.eu, sh.ev, sh.edim, sh.coords, buf[0]),
                          kernels._forward_to_out_np(fw, sh.eu, sh.ev, sh.edim, sh.coords, buf[1]))
    masks, need = sh.subgrid_masks(), sh.path_requirements()
    sz = np.asarray(sizes, np.int64)
    bad = kernels._first_bad_subgrid_nb(outs, sh.coords, masks)
    assert np.array_equal(bad, kernels._first_bad_subgrid_np(outs, sh.coords, masks))
    assert np.array_equal(kernels._acyclic_nb(outs, sh.coords, sh.strides),
                          kernels._acyclic_np(outs, sh.coords, sh.strides))
    usos = outs[bad < 0]
    assert np.array_equal(kernels._rf_bijective_nb(usos, sz, sh.strides),
                          kernels._rf_bijective_np(usos, sz, sh.strides))
    small = usos[:12]
    assert np.array_equal(kernels._first_inadmissible_nb(small, sh.coords, sh.strides, masks, need),
                          kernels._first_inadmissible_np(small, sh.coords, sh.strides, masks, need))
    full = masks[-1]
    for out in small:
        s_nb = kernels._source_sink_nb(out, sh.coords, full)
        assert tuple(s_nb) == tuple(kernels._source_sink_np(out, sh.coords, full))
        src, snk = s_nb
        args = (out, sh.coords, sh.strides, full, src, snk, sh.n_vertices * sh.r)
        assert kernels._max_paths_nb(*args) == kernels._max_paths_np(*args)


def test_popcount():
    x = np.array([0, 1, 2, 3, 255, 1 << 40], np.int64)
    assert kernels.popcount(x).tolist() == [0, 1, 1, 2, 8, 1]


def test_numpy_backend_in_subprocess():
    code = (
        "from usosig import backend\n"
        "from usosig.signotope import count_signotopes\n"
        "from usosig.grid import enumerate_uso_bits, acyclic_mask\n"
        "from usosig.admissibility import admissible_mask\n"
        "rows = enumerate_uso_bits((2, 3))\n"
        "print(backend(), count_signotopes(5, 3), len(rows), int(acyclic_mask((2, 3), rows).sum()),"
        " int(admissible_mask((2, 3), rows).sum()))\n"
    )
    env = dict(os.environ, USOSIG_NO_NUMBA="1")
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, timeout=600)
    assert res.returncode == 0, res.stderr
    from usosig.admissibility import admissible_mask

    rows = enumerate_uso_bits((2, 3))
    expected = f"numpy 62 132 132 {int(admissible_mask((2, 3), rows).sum())}"
    assert res.stdout.strip() == expected


def test_backend_flag():
    from usosig import backend
    from usosig._jit import USE_NUMBA

    assert backend() == ("numba" if USE_NUMBA else "numpy")
