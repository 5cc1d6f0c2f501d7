"""Hot loops: signotope backtracking, subgrid sink counting, acyclicity, disjoint paths.

Every kernel exists twice, a numba version (``*_nb``) and a numpy or plain
Python version (``*_np``). The public names dispatch on ``USOSIG_NO_NUMBA``;
the twins are kept importable so tests and ``benchmarks/`` can compare them.

Orientations enter the kernels as out-masks: ``out[v, i]`` has bit ``c`` set
iff vertex ``v`` points to the vertex obtained by setting coordinate ``i`` to
``c``. Batches carry a leading axis.
"""

from __future__ import annotations

import numpy as np

from ._jit import USE_NUMBA, njit

STATUS_DONE = 0
STATUS_FULL = 1
STATUS_BUDGET = 2


# -- signotope backtracking ------------------------------------------------


def _enum_signs_dfs(n_sub, check_ptr, check_list, seq_idx, fixed, out, node_budget):
    """Depth-first search over sign vectors in canonical subset order, '+' first.

    ``check_list[check_ptr[k]:check_ptr[k + 1]]`` are the (rank+1)-subsets
    containing subset ``k``. Once ``k`` is assigned, each of them must show at
    most one change among its assigned entries (indices <= k); that count can
    only grow. Returns ``(count, nodes, status)``.
    """
    cap = out.shape[0]
    signs = np.zeros(max(n_sub, 1), np.int8)
    state = np.zeros(max(n_sub, 1), np.int8)
    count = 0
    nodes = 0
    k = 0
    if n_sub == 0:
        if cap == 0:
            return 0, 0, 1
        return 1, 0, 0
    while k >= 0:
        if k == n_sub:
            if count >= cap:
                return count, nodes, 1
            for t in range(n_sub):
                out[count, t] = signs[t]
            count += 1
            k -= 1
            continue
        nopt = 1 if fixed[k] != 0 else 2
        if state[k] >= nopt:
            state[k] = 0
            k -= 1
            continue
        if fixed[k] != 0:
            val = fixed[k]
        elif state[k] == 0:
            val = 1
        else:
            val = -1
        state[k] += 1
        signs[k] = val
        nodes += 1
        if nodes > node_budget:
            return count, nodes, 2
        ok = True
        for q in range(check_ptr[k], check_ptr[k + 1]):
            j = check_list[q]
            changes = 0
            prev = 0
            for t in range(seq_idx.shape[1]):
                p = seq_idx[j, t]
                if p > k:
                    continue
                if prev != 0 and signs[p] != prev:
                    changes += 1
                prev = signs[p]
            if changes > 1:
                ok = False
                break
        if ok:
            k += 1
    return count, nodes, 0


_enum_signs_nb = njit(_enum_signs_dfs)


def _enum_signs_np(n_sub, check_ptr, check_list, seq_idx, fixed, out, node_budget):
    """Level-by-level frontier expansion; same output order as the DFS."""
    cap = out.shape[0]
    if n_sub == 0:
        if cap == 0:
            return 0, 0, STATUS_FULL
        return 1, 0, STATUS_DONE
    frontier = np.zeros((1, 0), np.int8)
    nodes = 0
    for k in range(n_sub):
        if fixed[k] != 0:
            ext = np.full((frontier.shape[0], 1), fixed[k], np.int8)
            frontier = np.hstack([frontier, ext])
        else:
            rep = np.repeat(frontier, 2, axis=0)
            col = np.tile(np.array([1, -1], np.int8), frontier.shape[0])[:, None]
            frontier = np.hstack([rep, col])
        nodes += frontier.shape[0]
        if nodes > node_budget:
            return 0, nodes, STATUS_BUDGET
        checks = check_list[check_ptr[k] : check_ptr[k + 1]]
        if checks.size:
            ok = np.ones(frontier.shape[0], bool)
            for j in checks:
                seqs = frontier[:, seq_idx[j][seq_idx[j] <= k]]
                ok &= (seqs[:, 1:] != seqs[:, :-1]).sum(axis=1) <= 1
            frontier = frontier[ok]
    count = frontier.shape[0]
    if count > cap:
        return count, nodes, STATUS_FULL
    out[:count] = frontier
    return count, nodes, STATUS_DONE


enum_signs = _enum_signs_nb if USE_NUMBA else _enum_signs_np


# -- orientation assembly --------------------------------------------------


@njit
def _forward_to_out_nb(forward, eu, ev, edim, coords, out):
    m_count = forward.shape[0]
    for m in range(m_count):
        for e in range(eu.shape[0]):
            u = eu[e]
            v = ev[e]
            d = edim[e]
            if forward[m, e]:
                out[m, u, d] |= np.int64(1) << coords[v, d]
            else:
                out[m, v, d] |= np.int64(1) << coords[u, d]
    return out


def _forward_to_out_np(forward, eu, ev, edim, coords, out):
    fw = forward.astype(bool)
    for e in range(eu.shape[0]):
        u, v, d = eu[e], ev[e], edim[e]
        out[:, u, d] |= np.where(fw[:, e], np.int64(1) << coords[v, d], 0)
        out[:, v, d] |= np.where(fw[:, e], 0, np.int64(1) << coords[u, d])
    return out


def forward_to_out(forward, eu, ev, edim, coords, r):
    forward = np.ascontiguousarray(forward, dtype=np.uint8)
    out = np.zeros((forward.shape[0], coords.shape[0], r), np.int64)
    if USE_NUMBA:
        return _forward_to_out_nb(forward, eu, ev, edim, coords, out)
    return _forward_to_out_np(forward, eu, ev, edim, coords, out)


# -- unique sinks ------------------------------------------------------------


@njit
def _first_bad_subgrid_nb(outs, coords, sub_masks):
    """Index of the first subgrid without exactly one sink, or -1, per orientation."""
    m_count, n_vert, r = outs.shape
    res = np.full(m_count, -1, np.int64)
    for m in range(m_count):
        for s in range(sub_masks.shape[0]):
            sinks = 0
            for v in range(n_vert):
                inside = True
                sink = True
                for i in range(r):
                    mask = sub_masks[s, i]
                    if (mask >> coords[v, i]) & 1 == 0:
                        inside = False
                        break
                    if outs[m, v, i] & mask:
                        sink = False
                if inside and sink:
                    sinks += 1
                    if sinks > 1:
                        break
            if sinks != 1:
                res[m] = s
                break
    return res


def _first_bad_subgrid_np(outs, coords, sub_masks):
    # member[s, v] and sink[m, s, v]
    bits = (sub_masks[:, None, :] >> coords[None, :, :]) & 1
    member = bits.all(axis=2)
    res = np.full(outs.shape[0], -1, np.int64)
    step = max(1, 2_000_000 // max(1, sub_masks.shape[0] * coords.shape[0]))
    for lo in range(0, outs.shape[0], step):
        chunk = outs[lo : lo + step]
        hit = (chunk[:, None, :, :] & sub_masks[None, :, None, :]) != 0
        sink = ~hit.any(axis=3) & member[None]
        counts = sink.sum(axis=2)
        bad = counts != 1
        any_bad = bad.any(axis=1)
        res[lo : lo + step] = np.where(any_bad, bad.argmax(axis=1), -1)
    return res


def first_bad_subgrid(outs, coords, sub_masks):
    if USE_NUMBA:
        return _first_bad_subgrid_nb(outs, coords, sub_masks)
    return _first_bad_subgrid_np(outs, coords, sub_masks)


# -- acyclicity --------------------------------------------------------------


@njit
def _acyclic_nb(outs, coords, strides):
    m_count, n_vert, r = outs.shape
    res = np.ones(m_count, np.bool_)
    indeg = np.zeros(n_vert, np.int64)
    stack = np.zeros(n_vert, np.int64)
    for m in range(m_count):
        indeg[:] = 0
        for v in range(n_vert):
            for i in range(r):
                mask = outs[m, v, i]
                c = 0
                while mask:
                    if mask & 1:
                        w = v + (c - coords[v, i]) * strides[i]
                        indeg[w] += 1
                    mask >>= 1
                    c += 1
        top = 0
        for v in range(n_vert):
            if indeg[v] == 0:
                stack[top] = v
                top += 1
        seen = 0
        while top > 0:
            top -= 1
            v = stack[top]
            seen += 1
            for i in range(r):
                mask = outs[m, v, i]
                c = 0
                while mask:
                    if mask & 1:
                        w = v + (c - coords[v, i]) * strides[i]
                        indeg[w] -= 1
                        if indeg[w] == 0:
                            stack[top] = w
                            top += 1
                    mask >>= 1
                    c += 1
        res[m] = seen == n_vert
    return res


def adjacency_from_out(outs, coords, strides):
    """Dense boolean adjacency ``A[m, v, w]`` (v -> w) for a batch of out-masks."""
    m_count, n_vert, r = outs.shape
    adj = np.zeros((m_count, n_vert, n_vert), bool)
    for i in range(r):
        size = int(coords[:, i].max()) + 1
        for c in range(size):
            hit = (outs[:, :, i] >> c) & 1
            target = np.arange(n_vert) + (c - coords[:, i]) * strides[i]
            valid = coords[:, i] != c
            vs = np.nonzero(valid)[0]
            adj[:, vs, target[vs]] |= hit[:, vs].astype(bool)
    return adj


def _acyclic_np(outs, coords, strides):
    adj = adjacency_from_out(outs, coords, strides)
    alive = np.ones(adj.shape[:2], bool)
    for _ in range(adj.shape[1]):
        has_out = (adj & alive[:, None, :]).any(axis=2)
        sinks = alive & ~has_out
        if not sinks.any():
            break
        alive &= ~sinks
    return ~alive.any(axis=1)


def acyclic(outs, coords, strides):
    if USE_NUMBA:
        return _acyclic_nb(outs, coords, strides)
    return _acyclic_np(outs, coords, strides)


# -- refined index -------------------------------------------------------------


@njit
def _rf_bijective_nb(outs, sizes, strides):
    m_count, n_vert, r = outs.shape
    res = np.ones(m_count, np.bool_)
    hit = np.zeros(n_vert, np.bool_)
    for m in range(m_count):
        hit[:] = False
        for v in range(n_vert):
            code = 0
            for i in range(r):
                mask = outs[m, v, i]
                deg = 0
                while mask:
                    deg += mask & 1
                    mask >>= 1
                code += deg * strides[i]
            if hit[code]:
                res[m] = False
                break
            hit[code] = True
    return res


def popcount(x):
    x = np.asarray(x, np.int64)
    total = np.zeros(x.shape, np.int64)
    while np.any(x):
        total += x & 1
        x = x >> 1
    return total


def _rf_bijective_np(outs, sizes, strides):
    rf = popcount(outs)
    codes = (rf * strides[None, None, :]).sum(axis=2)
    codes.sort(axis=1)
    return (codes == np.arange(outs.shape[1])[None, :]).all(axis=1)


def rf_bijective(outs, sizes, strides):
    if USE_NUMBA:
        return _rf_bijective_nb(outs, sizes, strides)
    return _rf_bijective_np(outs, sizes, strides)


# -- internally disjoint paths ---------------------------------------------


@njit
def _max_paths_nb(out, coords, strides, smask, src, snk, limit):
    """Vertex-disjoint src->snk dipaths inside a subgrid (unit capacities, BFS augmentation)."""
    n_vert, r = out.shape
    n = 2 * n_vert
    cap = np.zeros((n, n), np.int8)
    for v in range(n_vert):
        inside = True
        for i in range(r):
            if (smask[i] >> coords[v, i]) & 1 == 0:
                inside = False
                break
        if not inside:
            continue
        if v != src and v != snk:
            cap[2 * v, 2 * v + 1] = 1
        for i in range(r):
            mask = out[v, i] & smask[i]
            c = 0
            while mask:
                if mask & 1:
                    w = v + (c - coords[v, i]) * strides[i]
                    cap[2 * v + 1, 2 * w] = 1
                mask >>= 1
                c += 1
    s = 2 * src + 1
    t = 2 * snk
    parent = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    flow = 0
    while flow < limit:
        parent[:] = -1
        parent[s] = s
        head = 0
        tail = 1
        queue[0] = s
        while head < tail and parent[t] == -1:
            x = queue[head]
            head += 1
            for y in range(n):
                if cap[x, y] > 0 and parent[y] == -1:
                    parent[y] = x
                    queue[tail] = y
                    tail += 1
        if parent[t] == -1:
            break
        y = t
        while y != s:
            x = parent[y]
            cap[x, y] -= 1
            cap[y, x] += 1
            y = x
        flow += 1
    return flow


def _max_paths_np(out, coords, strides, smask, src, snk, limit):
    """Same quantity through scipy's maximum flow on the split graph."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_flow

    n_vert, r = out.shape
    inside = np.all((smask[None, :] >> coords) & 1, axis=1)
    rows, cols = [], []
    for v in np.nonzero(inside)[0]:
        if v != src and v != snk:
            rows.append(2 * v)
            cols.append(2 * v + 1)
        for i in range(r):
            mask = int(out[v, i] & smask[i])
            c = 0
            while mask:
                if mask & 1:
                    rows.append(2 * v + 1)
                    cols.append(2 * (v + (c - coords[v, i]) * strides[i]))
                mask >>= 1
                c += 1
    n = 2 * n_vert
    graph = csr_matrix((np.ones(len(rows), np.int32), (rows, cols)), shape=(n, n))
    value = maximum_flow(graph, 2 * src + 1, 2 * snk).flow_value
    return min(int(value), limit)


def max_paths(out, coords, strides, smask, src, snk, limit):
    if USE_NUMBA:
        return _max_paths_nb(out, coords, strides, smask, src, snk, limit)
    return _max_paths_np(out, coords, strides, smask, src, snk, limit)


@njit
def _source_sink_nb(out, coords, smask):
    """Unique source and sink of a subgrid, -1 when missing, -2 when not unique."""
    n_vert, r = out.shape
    src = -1
    snk = -1
    for v in range(n_vert):
        inside = True
        for i in range(r):
            if (smask[i] >> coords[v, i]) & 1 == 0:
                inside = False
                break
        if not inside:
            continue
        is_sink = True
        is_src = True
        for i in range(r):
            own = np.int64(1) << coords[v, i]
            if out[v, i] & smask[i]:
                is_sink = False
            if (smask[i] & ~out[v, i] & ~own) != 0:
                is_src = False
        if is_sink:
            snk = v if snk == -1 else -2
        if is_src:
            src = v if src == -1 else -2
    return src, snk


def _source_sink_np(out, coords, smask):
    inside = np.all((smask[None, :] >> coords) & 1, axis=1)
    own = np.int64(1) << coords
    is_sink = inside & ~np.any(out & smask[None, :], axis=1)
    is_src = inside & np.all((smask[None, :] & ~out & ~own) == 0, axis=1)

    def pick(flags):
        idx = np.nonzero(flags)[0]
        if idx.size == 0:
            return -1
        return int(idx[0]) if idx.size == 1 else -2

    return pick(is_src), pick(is_sink)


def source_sink(out, coords, smask):
    if USE_NUMBA:
        return _source_sink_nb(out, coords, smask)
    return _source_sink_np(out, coords, smask)


@njit
def _first_inadmissible_nb(outs, coords, strides, sub_masks, need):
    """Per orientation: first subgrid whose path count is below ``need``, -1 if none.

    -2 flags a subgrid without a unique source or sink.
    """
    m_count = outs.shape[0]
    res = np.full(m_count, -1, np.int64)
    for m in range(m_count):
        out = outs[m]
        for s in range(sub_masks.shape[0]):
            if need[s] <= 0:
                continue
            src, snk = _source_sink_nb(out, coords, sub_masks[s])
            if src < 0 or snk < 0:
                res[m] = -2
                break
            got = _max_paths_nb(out, coords, strides, sub_masks[s], src, snk, need[s])
            if got < need[s]:
                res[m] = s
                break
    return res


def _first_inadmissible_np(outs, coords, strides, sub_masks, need):
    res = np.full(outs.shape[0], -1, np.int64)
    for m in range(outs.shape[0]):
        for s in range(sub_masks.shape[0]):
            if need[s] <= 0:
                continue
            src, snk = _source_sink_np(outs[m], coords, sub_masks[s])
            if src < 0 or snk < 0:
                res[m] = -2
                break
            got = _max_paths_np(outs[m], coords, strides, sub_masks[s], src, snk, need[s])
            if got < need[s]:
                res[m] = s
                break
    return res


def first_inadmissible(outs, coords, strides, sub_masks, need):
    if USE_NUMBA:
        return _first_inadmissible_nb(outs, coords, strides, sub_masks, need)
    return _first_inadmissible_np(outs, coords, strides, sub_masks, need)


# -- USO enumeration ---------------------------------------------------------


def _enum_usos(eu, ev, edim, coords, sub_masks, done_ptr, done_list, member_ptr, member_list,
               fixed, out_buf, node_budget):
    """Backtrack over edges in canonical order; a subgrid is checked once its last edge is set.

    ``fixed[e]`` is -1 for a free edge, else the forced bit. Writes forward
    bits (1 = low -> high) into ``out_buf``. Returns ``(count, nodes, status)``.
    """
    n_edges = eu.shape[0]
    n_vert, r = coords.shape
    cap = out_buf.shape[0]
    out = np.zeros((n_vert, r), np.int64)
    fwd = np.zeros(max(n_edges, 1), np.uint8)
    state = np.zeros(max(n_edges, 1), np.int8)
    count = 0
    nodes = 0
    k = 0
    while k >= 0:
        if k == n_edges:
            if count >= cap:
                return count, nodes, 1
            for t in range(n_edges):
                out_buf[count, t] = fwd[t]
            count += 1
            k -= 1
            continue
        u = eu[k]
        v = ev[k]
        d = edim[k]
        if state[k] > 0:
            if fwd[k]:
                out[u, d] &= ~(np.int64(1) << coords[v, d])
            else:
                out[v, d] &= ~(np.int64(1) << coords[u, d])
        nopt = 2 if fixed[k] < 0 else 1
        if state[k] >= nopt:
            state[k] = 0
            k -= 1
            continue
        if fixed[k] >= 0:
            bit = fixed[k]
        else:
            bit = 1 - state[k]
        state[k] += 1
        fwd[k] = bit
        if bit:
            out[u, d] |= np.int64(1) << coords[v, d]
        else:
            out[v, d] |= np.int64(1) << coords[u, d]
        nodes += 1
        if nodes > node_budget:
            return count, nodes, 2
        ok = True
        for q in range(done_ptr[k], done_ptr[k + 1]):
            s = done_list[q]
            sinks = 0
            for p in range(member_ptr[s], member_ptr[s + 1]):
                x = member_list[p]
                sink = True
                for i in range(r):
                    if out[x, i] & sub_masks[s, i]:
                        sink = False
                        break
                if sink:
                    sinks += 1
            if sinks != 1:
                ok = False
                break
        if ok:
            k += 1
    return count, nodes, 0


_enum_usos_nb = njit(_enum_usos)
enum_usos = _enum_usos_nb if USE_NUMBA else _enum_usos
