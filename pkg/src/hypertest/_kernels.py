"""Compiled counting kernels (numba), with pure-Python fallbacks.

The hot loops are loose-cycle backtracking and the exact triple census;
both are written against flat numpy arrays so numba can compile them.
When numba is unavailable the same functions run as plain Python,
slower but bit-identical in results.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


@njit(cache=True)
def loose_cycle_count(edge_arr, inc_starts, inc_ids, n, h):
    """Count loose cycles of exactly ``h`` hyperedges (h >= 3).

    A cycle is a sequence of distinct edges where consecutive edges share
    exactly one vertex, all h junction vertices are distinct, and
    non-consecutive edges are disjoint. Each cycle is counted once:
    anchored at its minimal edge index, direction fixed by requiring the
    second edge id to be smaller than the closing edge id.
    """
    E, m = edge_arr.shape
    count = 0
    if E < h:
        return 0
    in_use = np.zeros(n, dtype=np.uint8)
    is_junction = np.zeros(n, dtype=np.uint8)
    path = np.empty(h, dtype=np.int64)
    junc = np.empty(h, dtype=np.int64)
    vi = np.zeros(h, dtype=np.int64)
    ci = np.zeros(h, dtype=np.int64)

    for a in range(E):
        path[0] = a
        for t in range(m):
            in_use[edge_arr[a, t]] = 1
        d = 1
        vi[1] = 0
        ci[1] = 0
        while d >= 1:
            progressed = False
            last = path[d - 1]
            while vi[d] < m:
                v = edge_arr[last, vi[d]]
                if is_junction[v] == 1:
                    vi[d] += 1
                    ci[d] = 0
                    continue
                s0 = inc_starts[v]
                s1 = inc_starts[v + 1]
                hit_end = True
                while ci[d] < s1 - s0:
                    g = inc_ids[s0 + ci[d]]
                    ci[d] += 1
                    if g <= a:
                        continue
                    used = 0
                    w = np.int64(-1)
                    for t in range(m):
                        u = edge_arr[g, t]
                        if in_use[u] == 1:
                            used += 1
                            if u != v:
                                w = u
                    if d < h - 1:
                        if used == 1:
                            path[d] = g
                            junc[d] = v
                            is_junction[v] = 1
                            for t in range(m):
                                u = edge_arr[g, t]
                                if u != v:
                                    in_use[u] = 1
                            d += 1
                            vi[d] = 0
                            ci[d] = 0
                            progressed = True
                            hit_end = False
                            break
                    else:
                        if used == 2 and w >= 0 and is_junction[w] == 0 and path[1] < g:
                            in_anchor = False
                            for t in range(m):
                                if edge_arr[a, t] == w:
                                    in_anchor = True
                                    break
                            if in_anchor:
                                count += 1
                if progressed:
                    break
                if hit_end:
                    vi[d] += 1
                    ci[d] = 0
            if progressed:
                continue
            # depth exhausted: backtrack
            d -= 1
            if d >= 1:
                g = path[d]
                v = junc[d]
                is_junction[v] = 0
                for t in range(m):
                    u = edge_arr[g, t]
                    if u != v:
                        in_use[u] = 0
        for t in range(m):
            in_use[edge_arr[a, t]] = 0
    return count


@njit(cache=True)
def triangle_census(edge_arr, pair_i, pair_j, nbr_starts, nbr_ids, l):
    """Count unordered edge triples with pairwise overlap exactly ``l``
    and empty three-way intersection.

    ``pair_i``/``pair_j`` list the overlap-l pairs (i < j); ``nbr_*`` is the
    CSR adjacency of that pair graph with each neighbor list ascending.
    """
    E, m = edge_arr.shape
    count = 0
    for p in range(pair_i.size):
        i = pair_i[p]
        j = pair_j[p]
        a0 = nbr_starts[i]
        a1 = nbr_starts[i + 1]
        b0 = nbr_starts[j]
        b1 = nbr_starts[j + 1]
        # advance both lists to entries > j
        while a0 < a1 and nbr_ids[a0] <= j:
            a0 += 1
        while b0 < b1 and nbr_ids[b0] <= j:
            b0 += 1
        while a0 < a1 and b0 < b1:
            ka = nbr_ids[a0]
            kb = nbr_ids[b0]
            if ka < kb:
                a0 += 1
            elif kb < ka:
                b0 += 1
            else:
                # candidate k: check junction of (i, j) misses edge k
                k = ka
                ok = True
                ti = 0
                tj = 0
                while ti < m and tj < m and ok:
                    u = edge_arr[i, ti]
                    v = edge_arr[j, tj]
                    if u == v:
                        for t in range(m):
                            if edge_arr[k, t] == u:
                                ok = False
                                break
                        ti += 1
                        tj += 1
                    elif u < v:
                        ti += 1
                    else:
                        tj += 1
                if ok:
                    count += 1
                a0 += 1
                b0 += 1
    return count


@njit(cache=True)
def aligned_vee_m3_l1(edge_arr, pair_i, pair_j):
    """Count aligned vees among overlap-1 pairs of a 3-uniform hypergraph.

    A pair is aligned when, on the sorted 5-cycle of its vertices, both
    private pairs are cyclically adjacent (0 or 3 of the other vertices
    fall strictly between them).
    """
    count = 0
    for p in range(pair_i.size):
        ei = edge_arr[pair_i[p]]
        ej = edge_arr[pair_j[p]]
        # junction = unique shared vertex; privates keep sorted order
        a0 = a1 = b0 = b1 = -1
        v = -1
        for t in range(3):
            u = ei[t]
            shared = u == ej[0] or u == ej[1] or u == ej[2]
            if shared:
                v = u
            elif a0 < 0:
                a0 = u
            else:
                a1 = u
        for t in range(3):
            u = ej[t]
            if u != v:
                if b0 < 0:
                    b0 = u
                else:
                    b1 = u
        cnt_a = 0
        if a0 < b0 < a1:
            cnt_a += 1
        if a0 < b1 < a1:
            cnt_a += 1
        if a0 < v < a1:
            cnt_a += 1
        if cnt_a != 0 and cnt_a != 3:
            continue
        cnt_b = 0
        if b0 < a0 < b1:
            cnt_b += 1
        if b0 < a1 < b1:
            cnt_b += 1
        if b0 < v < b1:
            cnt_b += 1
        if cnt_b == 0 or cnt_b == 3:
            count += 1
    return count


@njit(cache=True)
def aligned_triangle_m3_l1(edge_arr, max_order, max_starts, pk_keys, pk_edges, n):
    """Count aligned loose triangles in a 3-uniform hypergraph (overlap 1).

    Aligned means the three edges form consecutive arcs in the sorted
    order of their six vertices. Every such triple decomposes uniquely as
    a chain A-B with max(A) = min(B) closed by an edge through
    {min(A), max(B)} whose third vertex lies outside that span.
    """
    count = 0
    E = edge_arr.shape[0]
    if E == 0:
        return 0
    for bi in range(E):
        v = edge_arr[bi, 0]
        # edges A with max == v, via the order-by-max index
        a0 = max_starts[v]
        a1 = max_starts[v + 1]
        for ap in range(a0, a1):
            ai = max_order[ap]
            lo = edge_arr[ai, 0]
            hi = edge_arr[bi, 2]
            key = np.int64(lo) * n + hi
            c0 = np.searchsorted(pk_keys, key)
            c1 = c0
            while c1 < pk_keys.size and pk_keys[c1] == key:
                c1 += 1
            for cp in range(c0, c1):
                ci = pk_edges[cp]
                w = edge_arr[ci, 0] + edge_arr[ci, 1] + edge_arr[ci, 2] - lo - hi
                if w < lo or w > hi:
                    count += 1
    return count
