"""Canonical immutable hypergraph representation.

Vertices are dense integers ``0..n-1``. Hyperedges are strictly increasing
vertex tuples with at least two vertices (no self-loops, no multi-edges).
Edges are stored sorted lexicographically so that iteration order, and
therefore every downstream count, is independent of construction order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Hypergraph",
    "NonuniformHypergraph",
    "HypergraphError",
    "RepeatedVertex",
    "VertexOutOfRange",
    "EdgeTooSmall",
    "DuplicateHyperedge",
    "canonicalize_hyperedge",
    "intersection_size",
    "vertex_degree",
]


class HypergraphError(ValueError):
    """Base class for hypergraph construction/query errors."""


class RepeatedVertex(HypergraphError):
    """A hyperedge listed the same vertex more than once."""


class VertexOutOfRange(HypergraphError):
    """A vertex id is negative or >= n."""


class EdgeTooSmall(HypergraphError):
    """A hyperedge has fewer than two vertices."""


class DuplicateHyperedge(HypergraphError):
    """The same vertex set appears twice in an edge list."""


def canonicalize_hyperedge(vertices: Iterable[int], n: int | None = None) -> tuple[int, ...]:
    """Sort a vertex collection into canonical hyperedge form.

    Rejects repeated vertices (two hyperedge slots naming the same vertex
    would be a self-loop), edges with fewer than two vertices, and, when
    ``n`` is given, out-of-range ids.
    """
    vs = [int(v) for v in vertices]
    if len(vs) < 2:
        raise EdgeTooSmall(f"hyperedge needs >= 2 vertices, got {len(vs)}")
    edge = tuple(sorted(vs))
    for a, b in zip(edge, edge[1:]):
        if a == b:
            raise RepeatedVertex(f"vertex {a} repeated in hyperedge")
    if edge[0] < 0:
        raise VertexOutOfRange(f"negative vertex id {edge[0]}")
    if n is not None and edge[-1] >= n:
        raise VertexOutOfRange(f"vertex {edge[-1]} >= n={n}")
    return edge


def intersection_size(e1: Sequence[int], e2: Sequence[int]) -> int:
    """Size of the intersection of two canonical (sorted) hyperedges."""
    i = j = hits = 0
    while i < len(e1) and j < len(e2):
        a, b = e1[i], e2[j]
        if a == b:
            hits += 1
            i += 1
            j += 1
        elif a < b:
            i += 1
        else:
            j += 1
    return hits


@dataclass(frozen=True)
class Hypergraph:
    """Immutable hypergraph over vertices ``0..n-1``.

    ``uniform_size`` is the common hyperedge size when every edge has the
    same size (it may be supplied explicitly for edgeless hypergraphs so
    uniform operations still know their arity).
    """

    n: int
    edges: tuple[tuple[int, ...], ...]
    uniform_size: int | None = None
    incidence: tuple[tuple[int, ...], ...] = field(repr=False, default=())

    def __init__(
        self,
        n: int,
        edges: Iterable[Iterable[int]] = (),
        uniform_size: int | None = None,
    ):
        if n < 0:
            raise VertexOutOfRange("vertex count must be >= 0")
        canon = sorted(canonicalize_hyperedge(e, n) for e in edges)
        for a, b in zip(canon, canon[1:]):
            if a == b:
                raise DuplicateHyperedge(f"hyperedge {a} appears twice")
        sizes = {len(e) for e in canon}
        if len(sizes) == 1:
            m = sizes.pop()
            if uniform_size is not None and uniform_size != m:
                raise HypergraphError(f"uniform_size={uniform_size} but edges have size {m}")
            uniform_size = m
        elif len(sizes) > 1:
            if uniform_size is not None:
                raise HypergraphError("uniform_size given but edge sizes are mixed")
        inc: list[list[int]] = [[] for _ in range(n)]
        for idx, e in enumerate(canon):
            for v in e:
                inc[v].append(idx)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(canon))
        object.__setattr__(self, "uniform_size", uniform_size)
        object.__setattr__(self, "incidence", tuple(tuple(lst) for lst in inc))

    @classmethod
    def _from_canonical(cls, n: int, edges: list[tuple[int, ...]], uniform_size: int):
        """Construction bypass for already-canonical, lexsorted, duplicate-free
        edge lists (sampler internals); invariants are the caller's duty."""
        self = object.__new__(cls)
        inc: list[list[int]] = [[] for _ in range(n)]
        for idx, e in enumerate(edges):
            for v in e:
                inc[v].append(idx)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "uniform_size", uniform_size)
        object.__setattr__(self, "incidence", tuple(tuple(lst) for lst in inc))
        return self

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise VertexOutOfRange(f"vertex {v} not in 0..{self.n - 1}")
        return len(self.incidence[v])

    def edge_set(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self.edges)

    def edge_array(self) -> np.ndarray:
        """Edges as an (num_edges, m) int32 array; requires a uniform size."""
        m = self.uniform_size
        if m is None:
            raise HypergraphError("edge_array requires a uniform hypergraph")
        if not self.edges:
            return np.empty((0, m), dtype=np.int32)
        return np.asarray(self.edges, dtype=np.int32)

    def relabel(self, perm: Sequence[int]) -> "Hypergraph":
        """Apply a vertex permutation (perm[v] is the new id of v)."""
        if len(perm) != self.n:
            raise VertexOutOfRange("permutation length must equal n")
        return Hypergraph(
            self.n,
            [[perm[v] for v in e] for e in self.edges],
            uniform_size=self.uniform_size,
        )


def vertex_degree(g: Hypergraph, v: int) -> int:
    """Number of hyperedges incident to ``v``."""
    return g.degree(v)


@dataclass(frozen=True)
class NonuniformHypergraph:
    """A superposition of uniform layers sharing one vertex set.

    ``layers`` maps hyperedge size m to the m-uniform layer; every layer
    must report that size as its ``uniform_size`` and share the same n.
    """

    n: int
    layers: Mapping[int, Hypergraph]

    def __init__(self, n: int, layers: Mapping[int, Hypergraph]):
        layers = dict(sorted(layers.items()))
        for m, g in layers.items():
            if g.n != n:
                raise HypergraphError(f"layer {m} has n={g.n}, expected {n}")
            if g.uniform_size not in (None, m):
                raise HypergraphError(f"layer keyed {m} has uniform_size={g.uniform_size}")
            if g.uniform_size is None and g.edges:
                raise HypergraphError(f"layer {m} is not uniform")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "layers", layers)

    @property
    def max_size(self) -> int:
        return max(self.layers) if self.layers else 0

    @property
    def num_edges(self) -> int:
        return sum(g.num_edges for g in self.layers.values())

    def total_degree(self, v: int) -> int:
        """Hyperedge incidences of ``v`` summed over all layers."""
        return sum(g.degree(v) for g in self.layers.values())

    def all_edges(self) -> list[tuple[int, ...]]:
        out: list[tuple[int, ...]] = []
        for _, g in sorted(self.layers.items()):
            out.extend(g.edges)
        return out
