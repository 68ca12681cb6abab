"""Shared fixtures and independent brute-force reference counters.

The reference implementations here deliberately share no code with the
package counting paths: motif counts come from itertools enumeration over
edge subsets, graph counts from dense adjacency algebra.
"""

from __future__ import annotations

from itertools import combinations, permutations

import numpy as np
import pytest

from hypertest.hypercore import Hypergraph
from hypertest.genmodel import sample_uniform_er


def brute_vees(edges, l: int) -> int:
    """Unordered pairs of edges sharing exactly l vertices."""
    sets = [set(e) for e in edges]
    return sum(
        1 for a, b in combinations(sets, 2) if len(a & b) == l
    )


def brute_triangles(edges, l: int) -> int:
    """Unordered triples pairwise sharing exactly l vertices, empty
    three-way intersection."""
    sets = [set(e) for e in edges]
    count = 0
    for a, b, c in combinations(sets, 3):
        if (
            len(a & b) == l
            and len(b & c) == l
            and len(a & c) == l
            and not (a & b & c)
        ):
            count += 1
    return count


def brute_loose_cycles(edges, h: int) -> int:
    """Loose cycles of h edges by exhaustive arrangement checking."""
    sets = [set(e) for e in edges]
    if not sets:
        return 0
    m = len(next(iter(sets)))
    if h == 2:
        if m == 2:
            return 0
        return sum(1 for a, b in combinations(sets, 2) if len(a & b) == 2)
    count = 0
    for combo in combinations(range(len(sets)), h):
        found = False
        for perm in permutations(combo):
            if perm[0] != min(perm):
                continue
            seq = [sets[i] for i in perm]
            ok = True
            junctions = []
            for i in range(h):
                inter = seq[i] & seq[(i + 1) % h]
                if len(inter) != 1:
                    ok = False
                    break
                junctions.append(next(iter(inter)))
            if not ok or len(set(junctions)) != h:
                continue
            for i in range(h):
                for j in range(i + 2, h):
                    if i == 0 and j == h - 1:
                        continue
                    if seq[i] & seq[j]:
                        ok = False
                        break
                if not ok:
                    break
            if ok and len(set().union(*seq)) == h * (m - 1):
                found = True
                break
        if found:
            count += 1
    return count


def graph_edge_vee_triangle(edges, n: int) -> tuple[int, int, int]:
    """Independent m=2 counts from dense adjacency algebra."""
    adj = np.zeros((n, n), dtype=np.int64)
    for u, v in edges:
        adj[u, v] = adj[v, u] = 1
    deg = adj.sum(axis=1)
    wedges = int((deg * (deg - 1) // 2).sum())
    tris = int(np.trace(np.linalg.matrix_power(adj, 3)) // 6)
    return len(edges), wedges, tris


def random_uniform_hypergraph(rng, n: int, m: int, p: float) -> Hypergraph:
    g = sample_uniform_er(n, m, p, rng)
    if g.num_edges == 0:
        return Hypergraph(n, [], uniform_size=m)
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(20240801)
