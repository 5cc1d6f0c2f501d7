"""Time the numba kernels against their numpy twins on fixed workloads.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each pair is checked for identical output before it is timed. The first
numba call (compilation or cache load) is excluded.
"""

from __future__ import annotations

import argparse
import time
from math import comb

import numpy as np

from usosig import kernels
from usosig._jit import USE_NUMBA
from usosig.grid import enumerate_uso_bits, enumerate_normalized_usos_bits, grid_shape, orientations_from_forward
from usosig.signotope import omission_table, superset_lists


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        res = fn()
        times.append(time.perf_counter() - t)
    return min(times), res


def same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return bool(np.array_equal(np.asarray(a), np.asarray(b)))


def signotope_case(n, rank):
    n_sub = comb(n, rank)
    ptr, lst = superset_lists(n, rank)
    table = omission_table(n, rank)
    fixed = np.zeros(n_sub, np.int8)

    def run(kernel):
        out = np.zeros((1_300_000, n_sub), np.int8)
        count, nodes, status = kernel(n_sub, ptr, lst, table, fixed, out, 1 << 62)
        return out[:count].copy(), nodes

    return f"enum_signs n={n} rank={rank}", lambda: run(kernels._enum_signs_nb), lambda: run(kernels._enum_signs_np)


def orientation_cases(sizes, rows):
    sh = grid_shape(sizes)
    outs = orientations_from_forward(sizes, rows)
    masks, need = sh.subgrid_masks(), sh.path_requirements()
    sz = np.asarray(sizes, np.int64)
    tag = f"{len(rows)} USOs of {sizes}"
    return [
        (f"first_bad_subgrid, {tag}",
         lambda: kernels._first_bad_subgrid_nb(outs, sh.coords, masks),
         lambda: kernels._first_bad_subgrid_np(outs, sh.coords, masks)),
        (f"acyclic, {tag}",
         lambda: kernels._acyclic_nb(outs, sh.coords, sh.strides),
         lambda: kernels._acyclic_np(outs, sh.coords, sh.strides)),
        (f"rf_bijective, {tag}",
         lambda: kernels._rf_bijective_nb(outs, sz, sh.strides),
         lambda: kernels._rf_bijective_np(outs, sz, sh.strides)),
        (f"first_inadmissible, {tag}",
         lambda: kernels._first_inadmissible_nb(outs, sh.coords, sh.strides, masks, need),
         lambda: kernels._first_inadmissible_np(outs, sh.coords, sh.strides, masks, need)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args()
    if not USE_NUMBA:
        print("numba disabled (USOSIG_NO_NUMBA set or numba missing): both columns run the fallback")

    if args.quick:
        cases = [signotope_case(6, 3)]
        cases += orientation_cases((2, 2, 2), enumerate_uso_bits((2, 2, 2)))
    else:
        cases = [signotope_case(7, 3), signotope_case(6, 4)]
        cases += orientation_cases((2, 2, 3), enumerate_uso_bits((2, 2, 3))[::100])
        cases += orientation_cases((3, 4), enumerate_normalized_usos_bits((3, 4))[::10])

    print(f"{'kernel':<48} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    for name, fast, slow in cases:
        fast()  # compile or load from cache
        t_fast, r_fast = best_of(fast, args.repeat)
        t_slow, r_slow = best_of(slow, max(1, args.repeat - 2))
        if not same(r_fast, r_slow):
            raise SystemExit(f"{name}: numba and numpy results differ")
        print(f"{name:<48} {t_fast:>10.4f} {t_slow:>10.4f} {t_slow / t_fast:>7.1f}x")


if __name__ == "__main__":
    main()
