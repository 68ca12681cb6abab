"""Exact sub-hypergraph census and the empirical densities built on it.

Two families of quantities live here:

* census counts: every unordered occurrence of a motif — hyperedges,
  overlap-l vees (edge pairs sharing exactly l vertices), overlap-l
  triangles (edge triples with pairwise overlap exactly l and empty
  three-way intersection), and loose cycles of a given length.

* aligned counts and the (Ê, V̂, T̂) densities: the motif occurrences
  whose edges form consecutive arcs in the sorted cyclic order of their
  own vertex set. These are the placements the cyclic index sums of the
  test statistics range over; dividing by the number of aligned
  placements gives unbiased density estimates. ``tensor_sum_oracle``
  recomputes the same densities by brute force over index tuples and
  adjacency products, as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from . import _kernels
from .hypercore import Hypergraph, HypergraphError

__all__ = [
    "MotifCounts",
    "EmpiricalDensities",
    "NotUniform",
    "OverlapOutOfRange",
    "LengthTooSmall",
    "TooLargeForOracle",
    "count_hypervees",
    "count_hypertriangles",
    "count_loose_cycles",
    "aligned_vee_count",
    "aligned_triangle_count",
    "vee_placements",
    "triangle_placements",
    "empirical_evt",
    "tensor_sum_oracle",
    "census",
]


class NotUniform(HypergraphError):
    """Operation requires a uniform hypergraph with known edge size."""


class OverlapOutOfRange(HypergraphError):
    """Overlap l must satisfy 1 <= l <= m/2."""


class LengthTooSmall(HypergraphError):
    """Loose cycles need at least two hyperedges."""


class TooLargeForOracle(HypergraphError):
    """Brute-force oracle guard tripped (too many index tuples)."""


def _uniform_size(g: Hypergraph) -> int:
    if g.uniform_size is None:
        raise NotUniform("hypergraph has mixed or unknown edge sizes")
    return g.uniform_size


def _check_overlap(m: int, l: int) -> None:
    if not (1 <= l and 2 * l <= m):
        raise OverlapOutOfRange(f"need 1 <= l <= m/2, got l={l}, m={m}")


# ---------------------------------------------------------------------------
# pair enumeration


def _overlap_pairs(g: Hypergraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All unordered edge pairs with nonempty intersection.

    Returns (i, j, overlap) with i < j. Each pair sharing t vertices shows
    up in t per-vertex incidence lists, so the multiplicity of the packed
    key is exactly the overlap.
    """
    E = g.num_edges
    if E < 2:
        z = np.empty(0, dtype=np.int64)
        return z, z, z
    parts = []
    for lst in g.incidence:
        d = len(lst)
        if d >= 2:
            arr = np.asarray(lst, dtype=np.int64)
            iu, ju = np.triu_indices(d, k=1)
            parts.append(arr[iu] * E + arr[ju])
    if not parts:
        z = np.empty(0, dtype=np.int64)
        return z, z, z
    keys = np.concatenate(parts)
    uniq, counts = np.unique(keys, return_counts=True)
    return uniq // E, uniq % E, counts


def count_hypervees(g: Hypergraph, l: int) -> int:
    """Number of unordered hyperedge pairs sharing exactly ``l`` vertices."""
    m = _uniform_size(g)
    _check_overlap(m, l)
    if m == 2:
        # distinct graph edges overlap in at most one vertex
        return sum(d * (d - 1) // 2 for d in map(len, g.incidence))
    _, _, ov = _overlap_pairs(g)
    return int(np.count_nonzero(ov == l))


def _pair_graph(g: Hypergraph, l: int):
    """Overlap-l pairs plus the CSR adjacency of the pair graph."""
    i, j, ov = _overlap_pairs(g)
    keep = ov == l
    pi, pj = i[keep], j[keep]
    E = g.num_edges
    src = np.concatenate([pi, pj])
    dst = np.concatenate([pj, pi])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    starts = np.searchsorted(src, np.arange(E + 1))
    return pi, pj, starts, dst


def count_hypertriangles(g: Hypergraph, l: int) -> int:
    """Number of unordered edge triples with pairwise overlap exactly ``l``
    and no vertex common to all three."""
    m = _uniform_size(g)
    _check_overlap(m, l)
    if 3 * (m - l) > g.n:
        return 0
    if m == 2 and g.n <= 600:
        adj = np.zeros((g.n, g.n), dtype=np.int64)
        arr = g.edge_array()
        adj[arr[:, 0], arr[:, 1]] = 1
        adj[arr[:, 1], arr[:, 0]] = 1
        return int(((adj @ adj) * adj).sum() // 6)
    pi, pj, starts, nbrs = _pair_graph(g, l)
    if pi.size == 0:
        return 0
    return int(
        _kernels.triangle_census(g.edge_array().astype(np.int64), pi, pj, starts, nbrs, l)
    )


def _iter_triangles(g: Hypergraph, l: int):
    """Yield census triangles as (i, j, k) edge-index triples (python path)."""
    pi, pj, starts, nbrs = _pair_graph(g, l)
    edges = g.edges
    for i, j in zip(pi.tolist(), pj.tolist()):
        junction = set(edges[i]) & set(edges[j])
        ni = nbrs[starts[i]:starts[i + 1]]
        nj = nbrs[starts[j]:starts[j + 1]]
        for k in np.intersect1d(ni, nj, assume_unique=True):
            if k > j and not junction & set(edges[k]):
                yield i, j, int(k)


# ---------------------------------------------------------------------------
# loose cycles


def count_loose_cycles(g: Hypergraph, h: int) -> int:
    """Number of loose cycles made of exactly ``h`` hyperedges.

    For h >= 3: distinct edges arranged cyclically so that consecutive
    edges share exactly one vertex, the h junction vertices are distinct,
    and non-consecutive edges are disjoint (the cycle covers h(m-1)
    vertices). For h = 2 the two junction slots join the same edge pair,
    which therefore shares exactly two vertices.
    """
    m = _uniform_size(g)
    if h < 2:
        raise LengthTooSmall(f"cycle length must be >= 2, got {h}")
    if g.num_edges < 2:
        return 0
    if h == 2:
        if m == 2:
            return 0
        _, _, ov = _overlap_pairs(g)
        return int(np.count_nonzero(ov == 2))
    inc_starts, inc_ids = _incidence_csr(g)
    return int(
        _kernels.loose_cycle_count(
            g.edge_array().astype(np.int64), inc_starts, inc_ids, g.n, h
        )
    )


def _incidence_csr(g: Hypergraph) -> tuple[np.ndarray, np.ndarray]:
    counts = np.fromiter((len(lst) for lst in g.incidence), dtype=np.int64, count=g.n)
    starts = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(counts, out=starts[1:])
    ids = np.fromiter(
        (e for lst in g.incidence for e in lst), dtype=np.int64, count=int(starts[-1])
    )
    return starts, ids


# ---------------------------------------------------------------------------
# aligned placements


def _is_arc(positions: list[int], size: int) -> bool:
    """True when a position set is consecutive on the cycle 0..size-1."""
    k = len(positions)
    if k == 0 or k == size:
        return True
    present = [False] * size
    for p in positions:
        present[p] = True
    # count boundaries between in/out blocks; an arc has exactly one run
    runs = 0
    for p in range(size):
        if present[p] and not present[(p - 1) % size]:
            runs += 1
    return runs == 1


def _is_aligned_vee(e1: tuple[int, ...], e2: tuple[int, ...]) -> bool:
    s1, s2 = set(e1), set(e2)
    union = sorted(s1 | s2)
    pos = {v: p for p, v in enumerate(union)}
    size = len(union)
    junction = s1 & s2
    blocks = (junction, s1 - junction, s2 - junction)
    return all(_is_arc([pos[v] for v in blk], size) for blk in blocks)


def _is_aligned_triangle(edges3, m: int, l: int) -> bool:
    sets = [frozenset(e) for e in edges3]
    union = sorted(sets[0] | sets[1] | sets[2])
    R = 3 * (m - l)
    if len(union) != R:
        return False
    target = set(sets)
    for s in range(m - l):
        arcs = set()
        for t in range(3):
            start = s + t * (m - l)
            arcs.add(frozenset(union[(start + i) % R] for i in range(m)))
        if arcs == target:
            return True
    return False


def vee_placements(n: int, m: int, l: int) -> int:
    """Aligned vee placements on n labeled vertices: C(n, 2m-l)*(2m-l)."""
    return comb(n, 2 * m - l) * (2 * m - l)


def triangle_placements(n: int, m: int, l: int) -> int:
    """Aligned triangle placements on n labeled vertices: C(n, 3(m-l))*(m-l)."""
    return comb(n, 3 * (m - l)) * (m - l)


def aligned_vee_count(g: Hypergraph, l: int) -> int:
    """Overlap-l pairs whose junction and private parts are all arcs of
    the sorted cyclic order of the pair's vertex set."""
    m = _uniform_size(g)
    _check_overlap(m, l)
    if m == 2:
        return count_hypervees(g, l)
    if m == 3 and l == 1:
        return _aligned_vee_m3_l1(g)
    i, j, ov = _overlap_pairs(g)
    keep = ov == l
    edges = g.edges
    return sum(
        _is_aligned_vee(edges[a], edges[b])
        for a, b in zip(i[keep].tolist(), j[keep].tolist())
    )


def _aligned_vee_m3_l1(g: Hypergraph) -> int:
    i, j, ov = _overlap_pairs(g)
    keep = ov == 1
    if not keep.any():
        return 0
    arr = g.edge_array().astype(np.int64)
    return int(_kernels.aligned_vee_m3_l1(arr, i[keep], j[keep]))


def aligned_triangle_count(g: Hypergraph, l: int) -> int:
    """Overlap-l triangles whose edges are consecutive arcs of the sorted
    cyclic order of their 3(m-l) vertices."""
    m = _uniform_size(g)
    _check_overlap(m, l)
    if 3 * (m - l) > g.n:
        return 0
    if m == 2:
        return count_hypertriangles(g, l)
    if m == 3 and l == 1:
        return _aligned_tri_m3_l1(g)
    edges = g.edges
    return sum(
        _is_aligned_triangle((edges[i], edges[j], edges[k]), m, l)
        for i, j, k in _iter_triangles(g, l)
    )


def _aligned_tri_m3_l1(g: Hypergraph) -> int:
    arr = g.edge_array().astype(np.int64)
    E = arr.shape[0]
    if E < 3:
        return 0
    n = g.n
    max_order = np.argsort(arr[:, 2], kind="stable").astype(np.int64)
    max_starts = np.searchsorted(arr[max_order, 2], np.arange(n + 1)).astype(np.int64)
    # index every vertex pair inside an edge: key = lo*n + hi
    keys = np.concatenate(
        [arr[:, 0] * n + arr[:, 1], arr[:, 0] * n + arr[:, 2], arr[:, 1] * n + arr[:, 2]]
    )
    owners = np.tile(np.arange(E, dtype=np.int64), 3)
    order = np.argsort(keys, kind="stable")
    return int(
        _kernels.aligned_triangle_m3_l1(
            arr, max_order, max_starts, keys[order], owners[order], n
        )
    )


# ---------------------------------------------------------------------------
# empirical densities and the brute-force oracle


@dataclass(frozen=True)
class EmpiricalDensities:
    """Unbiased density estimates (Ê, V̂, T̂) with the raw aligned counts."""

    e_hat: float
    v_hat: float
    t_hat: float
    edge_count: int
    vee_count: int
    triangle_count: int


def empirical_evt(g: Hypergraph, l: int) -> EmpiricalDensities:
    """Hyperedge, vee, and triangle densities at overlap ``l``.

    Each is the aligned occurrence count divided by the total number of
    aligned placements on n labeled vertices, so its expectation equals
    the corresponding occurrence probability of the sampling model.
    """
    m = _uniform_size(g)
    _check_overlap(m, l)
    n = g.n
    ec = g.num_edges
    vc = aligned_vee_count(g, l)
    tc = aligned_triangle_count(g, l)
    return EmpiricalDensities(
        e_hat=ec / comb(n, m) if comb(n, m) else 0.0,
        v_hat=vc / vee_placements(n, m, l) if vee_placements(n, m, l) else 0.0,
        t_hat=tc / triangle_placements(n, m, l) if triangle_placements(n, m, l) else 0.0,
        edge_count=ec,
        vee_count=vc,
        triangle_count=tc,
    )


_ORACLE_TUPLE_GUARD = 10**7


def tensor_sum_oracle(g: Hypergraph, l: int) -> EmpiricalDensities:
    """Brute-force evaluation of the same densities as ``empirical_evt``.

    Iterates every increasing index tuple and every cyclic arc pattern,
    multiplying raw adjacency indicators. Shares no code with the
    counting path; used as ground truth in tests.
    """
    m = _uniform_size(g)
    _check_overlap(m, l)
    n = g.n
    r_vee = 2 * m - l
    r_tri = 3 * (m - l)
    if comb(n, r_tri) > _ORACLE_TUPLE_GUARD:
        raise TooLargeForOracle(f"C({n},{r_tri}) exceeds oracle guard")
    eset = {frozenset(e) for e in g.edges}

    def a(vertices) -> int:
        return 1 if frozenset(vertices) in eset else 0

    e_sum = sum(a(tup) for tup in combinations(range(n), m))

    v_sum = 0
    for tup in combinations(range(n), r_vee):
        for s in range(r_vee):
            arc1 = [tup[(s + i) % r_vee] for i in range(m)]
            arc2 = [tup[(s + m - l + i) % r_vee] for i in range(m)]
            v_sum += a(arc1) * a(arc2)

    t_sum = 0
    for tup in combinations(range(n), r_tri):
        for s in range(m - l):
            arc1 = [tup[(s + i) % r_tri] for i in range(m)]
            arc2 = [tup[(s + (m - l) + i) % r_tri] for i in range(m)]
            arc3 = [tup[(s + 2 * (m - l) + i) % r_tri] for i in range(m)]
            t_sum += a(arc1) * a(arc2) * a(arc3)

    return EmpiricalDensities(
        e_hat=e_sum / comb(n, m) if comb(n, m) else 0.0,
        v_hat=v_sum / vee_placements(n, m, l) if vee_placements(n, m, l) else 0.0,
        t_hat=t_sum / triangle_placements(n, m, l) if triangle_placements(n, m, l) else 0.0,
        edge_count=e_sum,
        vee_count=v_sum,
        triangle_count=t_sum,
    )


@dataclass(frozen=True)
class MotifCounts:
    """Census result: full (not aligned) occurrence counts."""

    hyperedges: int
    hypervees: int
    hypertriangles: int
    loose_cycles: dict[int, int]
    l: int


def census(g: Hypergraph, l: int, cycle_lengths: tuple[int, ...] = ()) -> MotifCounts:
    """Full census of hyperedges, vees, triangles, and loose cycles."""
    return MotifCounts(
        hyperedges=g.num_edges,
        hypervees=count_hypervees(g, l),
        hypertriangles=count_hypertriangles(g, l),
        loose_cycles={h: count_loose_cycles(g, h) for h in cycle_lengths},
        l=l,
    )
