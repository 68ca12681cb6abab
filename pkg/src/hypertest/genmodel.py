"""Samplers for the planted-partition hypergraph models.

Both the blocked model (within-community probability p, between q, labels
iid from a community distribution, optional per-vertex degree weights)
and its matched single-probability counterpart are provided, for a single
uniform layer or a superposition of layers sharing one vertex set.

Samplers are pure functions of (spec, rng): the same generator state
yields the same hypergraph bit for bit. Dense layers are sampled by
enumerating all vertex m-subsets; very large sparse layers use geometric
gap skipping over the lexicographic rank space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb, floor, log, log1p

import numpy as np

from .hypercore import Hypergraph, HypergraphError, NonuniformHypergraph

__all__ = [
    "CommunityDistribution",
    "WeightLaw",
    "LayerSpec",
    "ProbabilityOverflow",
    "InvalidDistribution",
    "InvalidWeightLaw",
    "sample_labels",
    "sample_uniform_hsbm",
    "sample_uniform_er",
    "sample_nonuniform",
    "matched_null_probability",
]


class ProbabilityOverflow(HypergraphError):
    """An effective hyperedge probability exceeds 1."""


class InvalidDistribution(HypergraphError):
    """Community probabilities malformed."""


class InvalidWeightLaw(HypergraphError):
    """Degree-weight law violates its moment constraints."""


_PROB_TOL = 1e-12
_MOMENT_TOL = 1e-9


@dataclass(frozen=True)
class CommunityDistribution:
    """Label distribution over k communities (defaults to uniform)."""

    k: int
    probs: tuple[float, ...] = ()

    def __post_init__(self):
        if self.k < 1:
            raise InvalidDistribution(f"k must be >= 1, got {self.k}")
        probs = self.probs or tuple(1.0 / self.k for _ in range(self.k))
        if len(probs) != self.k:
            raise InvalidDistribution(f"expected {self.k} probabilities, got {len(probs)}")
        if any(p < 0 for p in probs):
            raise InvalidDistribution("negative community probability")
        if abs(sum(probs) - 1.0) > _PROB_TOL:
            raise InvalidDistribution(f"probabilities sum to {sum(probs)}, not 1")
        object.__setattr__(self, "probs", tuple(float(p) for p in probs))

    @classmethod
    def uniform(cls, k: int) -> "CommunityDistribution":
        return cls(k=k)

    @classmethod
    def imbalanced(cls, varsigma: float, k: int = 2) -> "CommunityDistribution":
        """Two communities with the smaller one drawn with probability varsigma."""
        if k != 2:
            raise InvalidDistribution("imbalanced form is defined for k=2")
        if not 0 < varsigma <= 0.5:
            raise InvalidDistribution(f"varsigma must be in (0, 0.5], got {varsigma}")
        return cls(k=2, probs=(varsigma, 1.0 - varsigma))


@dataclass(frozen=True)
class WeightLaw:
    """Per-vertex degree weight law: point mass at 1, or a two-point law.

    Constraints: E[W] != 0 and E[W^2] = 1, all values nonnegative.
    """

    kind: str = "dirac"
    values: tuple[float, float] = (1.0, 1.0)
    probs: tuple[float, float] = (1.0, 0.0)

    def __post_init__(self):
        if self.kind not in ("dirac", "two_point"):
            raise InvalidWeightLaw(f"unknown weight law kind {self.kind!r}")
        if self.kind == "dirac":
            object.__setattr__(self, "values", (1.0, 1.0))
            object.__setattr__(self, "probs", (1.0, 0.0))
            return
        w1, w2 = self.values
        p1, p2 = self.probs
        if w1 < 0 or w2 < 0:
            raise InvalidWeightLaw("weights must be nonnegative")
        if p1 < 0 or p2 < 0 or abs(p1 + p2 - 1.0) > _PROB_TOL:
            raise InvalidWeightLaw("two-point probabilities must be a distribution")
        second = p1 * w1 * w1 + p2 * w2 * w2
        if abs(second - 1.0) > _MOMENT_TOL:
            raise InvalidWeightLaw(f"E[W^2] = {second}, must equal 1")
        if abs(self.mean) < _MOMENT_TOL:
            raise InvalidWeightLaw("E[W] must be nonzero")

    @classmethod
    def dirac(cls) -> "WeightLaw":
        return cls()

    @classmethod
    def two_point(cls, w1: float, pi: float) -> "WeightLaw":
        """Two-point law with P(W=w1)=pi; the second value is solved so
        that E[W^2] = 1."""
        if not 0 < pi < 1:
            raise InvalidWeightLaw("pi must be in (0, 1)")
        rem = 1.0 - pi * w1 * w1
        if rem < 0:
            raise InvalidWeightLaw("no nonnegative w2 satisfies E[W^2] = 1")
        w2 = (rem / (1.0 - pi)) ** 0.5
        return cls(kind="two_point", values=(w1, w2), probs=(pi, 1.0 - pi))

    @property
    def mean(self) -> float:
        return self.probs[0] * self.values[0] + self.probs[1] * self.values[1]

    @property
    def max_value(self) -> float:
        return max(self.values)

    @property
    def is_dirac(self) -> bool:
        return self.kind == "dirac"

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.is_dirac:
            return np.ones(n)
        draw = rng.random(n)
        return np.where(draw < self.probs[0], self.values[0], self.values[1])


@dataclass(frozen=True)
class LayerSpec:
    """Sampling parameters of one m-uniform layer."""

    n: int
    m: int
    k: int
    p_within: float
    p_between: float
    communities: CommunityDistribution | None = None
    weights: WeightLaw = field(default_factory=WeightLaw)

    def __post_init__(self):
        if self.n < 0 or self.m < 2 or self.k < 1:
            raise HypergraphError(f"bad layer shape n={self.n} m={self.m} k={self.k}")
        if not 0 <= self.p_between <= self.p_within <= 1:
            raise ProbabilityOverflow(
                f"need 0 <= p_between <= p_within <= 1, "
                f"got ({self.p_within}, {self.p_between})"
            )
        if self.weights.max_value ** self.m * self.p_within > 1 + _PROB_TOL:
            raise ProbabilityOverflow(
                "degree weights push the effective probability above 1"
            )
        if self.communities is None:
            object.__setattr__(self, "communities", CommunityDistribution.uniform(self.k))
        elif self.communities.k != self.k:
            raise InvalidDistribution("community distribution k mismatch")

    @classmethod
    def from_rates(cls, n, m, k, a_n, b_n, **kwargs) -> "LayerSpec":
        """Build from density rates: probabilities a_n/n^(m-1), b_n/n^(m-1)."""
        scale = float(n) ** (m - 1)
        return cls(n=n, m=m, k=k, p_within=a_n / scale, p_between=b_n / scale, **kwargs)


def matched_null_probability(p_within: float, p_between: float, m: int, k: int) -> float:
    """Single-probability counterpart with the same expected degree:
    (p + (k^(m-1) - 1) q) / k^(m-1)."""
    blocks = k ** (m - 1)
    return (p_within + (blocks - 1) * p_between) / blocks


def sample_labels(
    dist: CommunityDistribution, n: int, rng: np.random.Generator
) -> np.ndarray:
    """n iid community labels in 0..k-1."""
    cum = np.cumsum(np.asarray(dist.probs))
    return np.searchsorted(cum, rng.random(n), side="right").astype(np.int64)


@lru_cache(maxsize=16)
def _combo_array(n: int, m: int) -> np.ndarray:
    if comb(n, m) == 0:
        return np.empty((0, m), dtype=np.int32)
    out = np.fromiter(
        (v for tup in combinations(range(n), m) for v in tup),
        dtype=np.int32,
        count=comb(n, m) * m,
    )
    out = out.reshape(-1, m)
    out.setflags(write=False)
    return out

_SPARSE_THRESHOLD = 2_000_000


def _unrank_combination(rank: int, n: int, m: int) -> tuple[int, ...]:
    """Lexicographic rank -> increasing m-tuple over 0..n-1."""
    out = []
    x = 0
    r = rank
    for pos in range(m):
        c = comb(n - 1 - x, m - 1 - pos)
        while c <= r:
            r -= c
            x += 1
            c = comb(n - 1 - x, m - 1 - pos)
        out.append(x)
        x += 1
    return tuple(out)


def _skip_sample_ranks(total: int, p: float, rng: np.random.Generator) -> list[int]:
    """Indices of successes among ``total`` Bernoulli(p) slots, via
    geometric gaps (expected cost proportional to the output size)."""
    if p <= 0.0 or total == 0:
        return []
    if p >= 1.0:
        return list(range(total))
    out: list[int] = []
    denom = log1p(-p)
    rank = -1
    while True:
        u = rng.random()
        if u <= 0.0:
            u = np.nextafter(0.0, 1.0)
        rank += 1 + floor(log(u) / denom)
        if rank >= total:
            return out
        out.append(rank)


def _sample_edges_dense(
    n, m, p_within, p_between, labels, weights, rng
) -> np.ndarray:
    combos = _combo_array(n, m)
    if combos.shape[0] == 0:
        return combos
    lab = labels[combos]
    mono = (lab == lab[:, :1]).all(axis=1)
    prob = np.where(mono, p_within, p_between)
    if weights is not None:
        prob = prob * weights[combos].prod(axis=1)
        if (prob > 1.0 + _PROB_TOL).any():
            raise ProbabilityOverflow("effective hyperedge probability exceeds 1")
    return combos[rng.random(prob.size) < prob]


def _sample_edges_sparse(n, m, p_within, p_between, labels, rng) -> list[tuple[int, ...]]:
    """Union of a global pass at the between rate and a per-community
    top-up pass so monochromatic subsets reach the within rate."""
    edges: set[tuple[int, ...]] = set()
    for rank in _skip_sample_ranks(comb(n, m), p_between, rng):
        edges.add(_unrank_combination(rank, n, m))
    if p_within > p_between:
        top_up = (p_within - p_between) / (1.0 - p_between)
        k = int(labels.max()) + 1 if labels.size else 0
        for c in range(k):
            members = np.flatnonzero(labels == c)
            nc = members.size
            if nc < m:
                continue
            for rank in _skip_sample_ranks(comb(nc, m), top_up, rng):
                local = _unrank_combination(rank, nc, m)
                edges.add(tuple(int(members[i]) for i in local))
    return sorted(edges)


def sample_uniform_hsbm(
    spec: LayerSpec,
    rng: np.random.Generator,
    labels: np.ndarray | None = None,
) -> tuple[Hypergraph, np.ndarray, np.ndarray]:
    """Sample one uniform layer; returns (hypergraph, labels, weights).

    Pass ``labels`` to reuse an existing assignment (superposition layers
    sharing one partition); otherwise labels are drawn here.
    """
    if labels is None:
        labels = sample_labels(spec.communities, spec.n, rng)
    weights = spec.weights.sample(rng, spec.n)
    use_sparse = (
        comb(spec.n, spec.m) > _SPARSE_THRESHOLD
        and spec.weights.is_dirac
    )
    if use_sparse:
        edges = _sample_edges_sparse(
            spec.n, spec.m, spec.p_within, spec.p_between, labels, rng
        )
    else:
        warr = None if spec.weights.is_dirac else weights
        arr = _sample_edges_dense(
            spec.n, spec.m, spec.p_within, spec.p_between, labels, warr, rng
        )
        edges = [tuple(int(v) for v in row) for row in arr]
    g = Hypergraph._from_canonical(spec.n, edges, spec.m)
    return g, labels, weights


def sample_uniform_er(n: int, m: int, p: float, rng: np.random.Generator) -> Hypergraph:
    """Uniform hypergraph with one common hyperedge probability."""
    if not 0 <= p <= 1:
        raise ProbabilityOverflow(f"probability {p} outside [0, 1]")
    if comb(n, m) > _SPARSE_THRESHOLD:
        labels = np.zeros(n, dtype=np.int64)
        edges = _sample_edges_sparse(n, m, p, p, labels, rng)
    else:
        combos = _combo_array(n, m)
        arr = combos[rng.random(combos.shape[0]) < p] if combos.size else combos
        edges = [tuple(int(v) for v in row) for row in arr]
    return Hypergraph._from_canonical(n, edges, m)


def sample_nonuniform(
    specs: list[LayerSpec],
    rng: np.random.Generator,
    shared_labels: bool = True,
) -> tuple[NonuniformHypergraph, dict[int, np.ndarray], dict[int, np.ndarray]]:
    """Sample independent uniform layers over one vertex set.

    With ``shared_labels`` a single label vector is drawn once and reused
    by all layers; weights stay independent per layer. Returns the
    superposition plus per-layer labels and weights keyed by m.
    """
    if not specs:
        raise HypergraphError("need at least one layer spec")
    n = specs[0].n
    if any(s.n != n for s in specs):
        raise HypergraphError("all layers must share the vertex count")
    if len({s.m for s in specs}) != len(specs):
        raise HypergraphError("duplicate layer size m")
    specs = sorted(specs, key=lambda s: s.m)
    shared = None
    if shared_labels:
        if len({(s.k, s.communities.probs) for s in specs}) != 1:
            raise InvalidDistribution("shared labels need a common community law")
        shared = sample_labels(specs[0].communities, n, rng)
    layers: dict[int, Hypergraph] = {}
    labels_by_m: dict[int, np.ndarray] = {}
    weights_by_m: dict[int, np.ndarray] = {}
    for s in specs:
        g, lab, w = sample_uniform_hsbm(s, rng, labels=shared)
        layers[s.m] = g
        labels_by_m[s.m] = lab
        weights_by_m[s.m] = w
    return NonuniformHypergraph(n, layers), labels_by_m, weights_by_m
