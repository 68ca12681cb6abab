"""File I/O for real hypergraph data.

Hyperedge file grammar (UTF-8, LF or CRLF):

    file     ::= line*
    line     ::= comment | blank | hyperedge
    comment  ::= "#" <anything>
    hyperedge::= id (ws id)+        ; >= 2 distinct nonnegative integers

Label file grammar:

    line     ::= comment | blank | id ws label_string

External ids are arbitrary nonnegative integers; they are remapped to the
dense internal range 0..n-1 (ascending external order) and the mapping is
kept on the dataset for round-tripping. Duplicate hyperedges collapse to
one; mixed sizes are split into uniform layers automatically.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .hypercore import Hypergraph, HypergraphError, NonuniformHypergraph

__all__ = [
    "LabeledDataset",
    "ParseError",
    "EmptyFile",
    "MissingLabels",
    "UnknownLabel",
    "read_hyperedge_file",
    "read_label_file",
    "write_hyperedge_file",
    "write_label_file",
    "degree_filter",
    "induce_subnetwork",
    "incidence_pattern_rows",
]

DEFAULT_MAX_EDGE_SIZE = 8


class ParseError(HypergraphError):
    """Malformed input line (message carries the line number)."""


class EmptyFile(HypergraphError):
    """No hyperedges found."""


class MissingLabels(HypergraphError):
    pass


class UnknownLabel(HypergraphError):
    pass


@dataclass(frozen=True)
class LabeledDataset:
    """A layered hypergraph plus its external-id map and optional labels.

    ``id_map[i]`` is the external id of internal vertex i; ``labels``,
    when present, assigns a community string to every internal vertex.
    """

    hypergraph: NonuniformHypergraph
    id_map: tuple[int, ...]
    labels: tuple[str, ...] | None = None

    @property
    def n(self) -> int:
        return self.hypergraph.n

    def external_edges(self) -> list[tuple[int, ...]]:
        return [
            tuple(self.id_map[v] for v in e) for e in self.hypergraph.all_edges()
        ]


def _layered(n: int, edges: set[tuple[int, ...]]) -> NonuniformHypergraph:
    by_size: dict[int, list[tuple[int, ...]]] = {}
    for e in edges:
        by_size.setdefault(len(e), []).append(e)
    layers = {
        m: Hypergraph(n, es, uniform_size=m) for m, es in sorted(by_size.items())
    }
    return NonuniformHypergraph(n, layers)


def read_hyperedge_file(path, max_edge_size: int = DEFAULT_MAX_EDGE_SIZE) -> LabeledDataset:
    """Parse a hyperedge file into a layered dataset with dense ids."""
    raw_edges: list[tuple[int, ...]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for ln_no, ln in enumerate(fh, start=1):
            body = ln.strip()
            if not body or body.startswith("#"):
                continue
            try:
                ids = [int(tok) for tok in body.split()]
            except ValueError as exc:
                raise ParseError(f"{path}:{ln_no}: non-integer vertex id") from exc
            if any(i < 0 for i in ids):
                raise ParseError(f"{path}:{ln_no}: negative vertex id")
            if len(ids) < 2:
                raise ParseError(f"{path}:{ln_no}: hyperedge needs >= 2 vertices")
            if len(set(ids)) != len(ids):
                raise ParseError(f"{path}:{ln_no}: repeated vertex in hyperedge")
            if len(ids) > max_edge_size:
                raise ParseError(
                    f"{path}:{ln_no}: hyperedge size {len(ids)} exceeds "
                    f"limit {max_edge_size}"
                )
            raw_edges.append(tuple(sorted(ids)))
    if not raw_edges:
        raise EmptyFile(f"{path}: no hyperedges")
    externals = sorted({v for e in raw_edges for v in e})
    to_internal = {ext: i for i, ext in enumerate(externals)}
    edges = {tuple(sorted(to_internal[v] for v in e)) for e in raw_edges}
    return LabeledDataset(
        hypergraph=_layered(len(externals), edges),
        id_map=tuple(externals),
    )


def read_label_file(path, ds: LabeledDataset) -> LabeledDataset:
    """Attach community labels (external_id label) to an existing dataset."""
    by_ext: dict[int, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for ln_no, ln in enumerate(fh, start=1):
            body = ln.strip()
            if not body or body.startswith("#"):
                continue
            parts = body.split()
            if len(parts) != 2:
                raise ParseError(f"{path}:{ln_no}: expected 'external_id label'")
            try:
                ext = int(parts[0])
            except ValueError as exc:
                raise ParseError(f"{path}:{ln_no}: non-integer vertex id") from exc
            by_ext[ext] = parts[1]
    missing = [ext for ext in ds.id_map if ext not in by_ext]
    if missing:
        raise MissingLabels(f"{path}: no label for vertices {missing[:5]}")
    labels = tuple(by_ext[ext] for ext in ds.id_map)
    return replace(ds, labels=labels)


def write_hyperedge_file(ds: LabeledDataset, path, header: str = "") -> None:
    """One hyperedge per line, external ids, deterministic order."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            for ln in header.splitlines():
                fh.write(f"# {ln}\n")
        for e in sorted(ds.external_edges(), key=lambda e: (len(e), e)):
            fh.write(" ".join(str(v) for v in e) + "\n")


def write_label_file(ds: LabeledDataset, path, header: str = "") -> None:
    if ds.labels is None:
        raise MissingLabels("dataset carries no labels")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            for ln in header.splitlines():
                fh.write(f"# {ln}\n")
        for ext, lab in zip(ds.id_map, ds.labels):
            fh.write(f"{ext} {lab}\n")


def _take_vertices(ds: LabeledDataset, keep: list[int]) -> LabeledDataset:
    """Keep the given internal vertices (and edges fully inside them),
    remapping densely and preserving external ids/labels."""
    keep_set = set(keep)
    remap = {old: new for new, old in enumerate(keep)}
    edges = {
        tuple(sorted(remap[v] for v in e))
        for e in ds.hypergraph.all_edges()
        if keep_set.issuperset(e)
    }
    labels = tuple(ds.labels[v] for v in keep) if ds.labels is not None else None
    return LabeledDataset(
        hypergraph=_layered(len(keep), edges),
        id_map=tuple(ds.id_map[v] for v in keep),
        labels=labels,
    )


def degree_filter(
    ds: LabeledDataset,
    min_deg: int,
    max_deg: int,
    iterate: bool = False,
) -> LabeledDataset:
    """Drop vertices whose total cross-layer degree is outside [min, max].

    Single pass by default: the band is evaluated against the original
    degrees, vertices outside it are removed together with every edge
    touching them. ``iterate`` repeats the pass until a fixed point.
    """
    if min_deg > max_deg:
        raise HypergraphError(f"min_deg {min_deg} > max_deg {max_deg}")
    while True:
        degs = [ds.hypergraph.total_degree(v) for v in range(ds.n)]
        keep = [v for v in range(ds.n) if min_deg <= degs[v] <= max_deg]
        out = _take_vertices(ds, keep)
        if not iterate or out.n == ds.n:
            return out
        ds = out


def induce_subnetwork(ds: LabeledDataset, community: str) -> LabeledDataset:
    """Vertices carrying the given label plus the edges fully inside them."""
    if ds.labels is None:
        raise MissingLabels("dataset carries no labels")
    if community not in set(ds.labels):
        raise UnknownLabel(f"label {community!r} not present")
    keep = [v for v in range(ds.n) if ds.labels[v] == community]
    return _take_vertices(ds, keep)


def incidence_pattern_rows(ds: LabeledDataset) -> list[tuple]:
    """Rows (layer_m, edge_index, external ids..., within_flag) describing
    the incidence pattern; within_flag needs labels and marks edges whose
    vertices share one community."""
    rows = []
    for m, layer in sorted(ds.hypergraph.layers.items()):
        for idx, e in enumerate(layer.edges):
            within = ""
            if ds.labels is not None:
                within = "1" if len({ds.labels[v] for v in e}) == 1 else "0"
            rows.append((m, idx, " ".join(str(ds.id_map[v]) for v in e), within))
    return rows
