"""Command-line interface: generate, count, test, estimate, simulate,
classify, ingest.

Every invocation that writes files also writes a manifest sidecar
(JSON: resolved arguments, seed, version, input digests, outputs).
All randomness flows from --seed; when the flag is absent a seed is drawn
from system entropy and printed so the run can be reproduced.

Exit codes: 0 success, 1 runtime/model error, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import secrets
import sys

import numpy as np

from . import __version__
from . import ingest, motifs, simlab, stats
from .genmodel import (
    CommunityDistribution,
    LayerSpec,
    WeightLaw,
    sample_nonuniform,
)
from .hypercore import HypergraphError, NonuniformHypergraph
from .stats import StatsError

USAGE_ERROR = 2
RUNTIME_ERROR = 1


class UsageError(ValueError):
    pass


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    seed = secrets.randbits(63)
    print(f"seed: {seed} (drawn from system entropy; pass --seed to reproduce)")
    return seed


def _digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _write_manifest(base_path, subcommand, args_dict, seed, inputs, outputs):
    manifest = {
        "subcommand": subcommand,
        "config": {k: v for k, v in sorted(args_dict.items()) if k != "func"},
        "seed": seed,
        "version": __version__,
        "input_digests": {str(p): _digest(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
    }
    path = f"{base_path}.manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return path


def _emit_report(report_dict, args, default_base):
    fmt = getattr(args, "format", "text")
    if fmt == "json":
        text = json.dumps(report_dict, indent=2, sort_keys=True, default=str) + "\n"
    elif fmt == "csv":
        lines = ["field,value"]
        lines += [f"{k},{v}" for k, v in report_dict.items()]
        text = "\n".join(lines) + "\n"
    else:
        text = "".join(f"{k}: {v}\n" for k, v in report_dict.items())
    print(text, end="")
    out = getattr(args, "output", None)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _load_dataset(args) -> ingest.LabeledDataset:
    ds = ingest.read_hyperedge_file(args.input)
    if getattr(args, "labels", None):
        ds = ingest.read_label_file(args.labels, ds)
    return ds


def _pick_layer(ds: ingest.LabeledDataset, m: int | None):
    layers = ds.hypergraph.layers
    if m is None:
        if len(layers) != 1:
            raise UsageError(
                f"input has layers m={sorted(layers)}; pick one with --m"
            )
        return next(iter(layers.values()))
    if m not in layers:
        raise UsageError(f"input has no {m}-uniform layer (found {sorted(layers)})")
    return layers[m]


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    if args.q > args.p:
        raise UsageError(f"--q ({args.q}) must not exceed --p ({args.p})")
    seed = _resolve_seed(args)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    weights = WeightLaw.dirac()
    if args.weight_two_point:
        w1, pi = (float(x) for x in args.weight_two_point.split(","))
        weights = WeightLaw.two_point(w1, pi)
    communities = (
        CommunityDistribution.imbalanced(args.varsigma)
        if args.varsigma is not None
        else CommunityDistribution.uniform(args.k)
    )
    layer_defs = [(args.m, args.p, args.q)]
    for spec_txt in args.layer or []:
        m_txt, p_txt, q_txt = spec_txt.split(",")
        layer_defs.append((int(m_txt), float(p_txt), float(q_txt)))
    specs = [
        LayerSpec(n=args.n, m=m, k=args.k, p_within=p, p_between=q,
                  communities=communities, weights=weights)
        for m, p, q in layer_defs
    ]
    hg, labels, _ = sample_nonuniform(specs, rng, shared_labels=True)
    lab = labels[specs[0].m]
    ds = ingest.LabeledDataset(
        hypergraph=hg,
        id_map=tuple(range(args.n)),
        labels=tuple(str(int(c)) for c in lab),
    )
    base = args.output or "sample"
    edge_path, label_path = f"{base}.edges", f"{base}.labels"
    header = f"hypertest generate n={args.n} seed={seed}"
    ingest.write_hyperedge_file(ds, edge_path, header=header)
    ingest.write_label_file(ds, label_path, header=header)
    manifest = _write_manifest(base, "generate", vars(args), seed, [],
                               [edge_path, label_path])
    print(f"wrote {edge_path} ({hg.num_edges} hyperedges), {label_path}, {manifest}")
    return 0


def cmd_count(args) -> int:
    ds = _load_dataset(args)
    g = _pick_layer(ds, args.m)
    cycles = tuple(int(h) for h in args.cycles.split(",")) if args.cycles else ()
    c = motifs.census(g, args.l, cycle_lengths=cycles)
    report = {
        "n": g.n, "m": g.uniform_size, "l": c.l,
        "hyperedges": c.hyperedges,
        "hypervees": c.hypervees,
        "hypertriangles": c.hypertriangles,
        "loose_cycles": c.loose_cycles,
    }
    _emit_report(report, args, args.input)
    return 0


def cmd_test(args) -> int:
    ds = _load_dataset(args)
    if args.regime == "sparse":
        if args.a is None or args.b is None:
            raise UsageError("sparse regime requires --a and --b")
        g = _pick_layer(ds, args.m)
        params = stats.SparseRegimeParams(a=args.a, b=args.b,
                                          m=g.uniform_size, k=args.k)
        rep = stats.cycle_test(g, params, k_n=args.kn, alpha=args.alpha)
        out = rep.to_dict()
        out["decision"] = "reject" if rep.reject else "fail to reject"
    elif args.regime == "dense":
        g = _pick_layer(ds, args.m)
        if args.l is None:
            ev = motifs.empirical_evt(g, 1)
            hint = stats.suggest_overlap(ev.e_hat, g.n, g.uniform_size)
            raise UsageError(
                "dense regime requires --l; the hyperedge proportion suggests "
                f"l={hint}" if hint else
                "dense regime requires --l; the hyperedge proportion matches "
                "no admissible band, supply --l explicitly"
            )
        known = None
        if args.a is not None and args.b is not None:
            known = stats.DenseRegimeParams.from_probabilities(
                args.a, args.b, g.n, g.uniform_size, args.k, args.l
            )
        rep = stats.dense_test(g, args.l, alpha=args.alpha, known_params=known)
        out = rep.to_dict()
        out["decision"] = "reject" if rep.reject_prime else "fail to reject"
    else:  # combined
        layers = ds.hypergraph.layers
        if len(layers) < 2:
            raise UsageError("combined regime needs at least two layers")
        weights = None
        if args.weights:
            weights = [float(x) for x in args.weights.split(",")]
            norm = sum(c * c for c in weights)
            if abs(norm - 1.0) > 1e-3:
                raise UsageError(
                    f"--weights squared norm is {norm:.6f}; must be 1"
                )
            weights = [c / norm ** 0.5 for c in weights]
        l = args.l if args.l is not None else 1
        reports = [
            stats.dense_test(layers[m], l, alpha=args.alpha)
            for m in sorted(layers)
        ]
        rep = stats.combined_test(reports, weights=weights, alpha=args.alpha)
        out = rep.to_dict()
        out["decision"] = "reject" if rep.reject else "fail to reject"
    _emit_report(out, args, args.input)
    return 0


def cmd_estimate(args) -> int:
    ds = _load_dataset(args)
    g = _pick_layer(ds, args.m)
    m = g.uniform_size
    k_n = args.kn
    if k_n is None:
        raise UsageError("--kn is required (cycle length for the count)")
    x = motifs.count_loose_cycles(g, k_n)
    rep = stats.estimate_ab(g.num_edges, x, g.n, m, args.k, k_n)
    out = rep.to_dict()
    out["ok"] = rep.ok
    _emit_report(out, args, args.input)
    return 0


def cmd_simulate(args) -> int:
    try:
        cfgs = simlab.load_config(args.config)
    except (OSError, simlab.ConfigError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    if args.reps is not None:
        cfgs = [simlab.SimConfig(**{**vars_of(c), "reps": args.reps}) for c in cfgs]
    if args.seed is not None:
        cfgs = [simlab.SimConfig(**{**vars_of(c), "seed": args.seed}) for c in cfgs]
    seed = cfgs[0].seed
    results = simlab.run_grid(cfgs, workers=args.workers)
    out = args.output or "simulation.csv"
    simlab.emit_csv(results, out, include_timing=args.timing)
    manifest = _write_manifest(out, "simulate", vars(args), seed,
                               [args.config], [out])
    print(f"wrote {out} ({len(results)} cells), {manifest}")
    return 0


def vars_of(cfg: simlab.SimConfig) -> dict:
    return {
        "cell_id": cfg.cell_id, "n": cfg.n, "layers": cfg.layers,
        "varsigma": cfg.varsigma, "reps": cfg.reps, "alpha": cfg.alpha,
        "seed": cfg.seed, "k": cfg.k, "statistics": cfg.statistics,
        "weights": cfg.weights, "delta_target": cfg.delta_target,
    }


def cmd_classify(args) -> int:
    verdict = stats.regime_classify(
        m=args.m, k=args.k, alpha_exp=args.alpha_exp, kappa=args.kappa
    )
    if getattr(args, "format", "text") == "json":
        print(json.dumps(verdict.to_dict(), indent=2, sort_keys=True))
    else:
        print(verdict.describe())
    return 0


def cmd_ingest(args) -> int:
    ds = _load_dataset(args)
    if args.min_deg is not None or args.max_deg is not None:
        lo = args.min_deg if args.min_deg is not None else 0
        hi = args.max_deg if args.max_deg is not None else 10 ** 9
        ds = ingest.degree_filter(ds, lo, hi, iterate=args.iterate)
    if args.community is not None:
        ds = ingest.induce_subnetwork(ds, args.community)
    base = args.output or "ingested"
    outputs = []
    edge_path = f"{base}.edges"
    ingest.write_hyperedge_file(ds, edge_path)
    outputs.append(edge_path)
    if ds.labels is not None:
        label_path = f"{base}.labels"
        ingest.write_label_file(ds, label_path)
        outputs.append(label_path)
    if args.emit_incidence:
        inc_path = f"{base}.incidence.csv"
        with open(inc_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("layer_m,edge_index,vertices,within_community\n")
            for row in ingest.incidence_pattern_rows(ds):
                fh.write(",".join(str(x) for x in row) + "\n")
        outputs.append(inc_path)
    inputs = [args.input] + ([args.labels] if args.labels else [])
    manifest = _write_manifest(base, "ingest", vars(args), 0, inputs, outputs)
    sizes = {m: g.num_edges for m, g in ds.hypergraph.layers.items()}
    print(f"kept n={ds.n} vertices, edges by layer {sizes}; wrote "
          f"{', '.join(outputs)}, {manifest}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hypertest",
        description="Community-structure tests for uniform and nonuniform hypergraphs",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common_io(p, need_input=True):
        if need_input:
            p.add_argument("--input", required=True, help="hyperedge file")
            p.add_argument("--labels", help="optional label file")
        p.add_argument("--output", help="output path")
        p.add_argument("--format", choices=("text", "json", "csv"), default="text")

    g = sub.add_parser("generate", help="sample a model and write edge/label files")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--p", type=float, required=True, help="within-community probability")
    g.add_argument("--q", type=float, required=True, help="between-community probability")
    g.add_argument("--varsigma", type=float, help="smaller-community probability (k=2)")
    g.add_argument("--weight-two-point", help="w1,pi for a two-point degree-weight law")
    g.add_argument("--layer", action="append",
                   help="extra layer 'm,p,q' (repeatable, shares labels)")
    g.add_argument("--seed", type=int)
    g.add_argument("--output", help="output basename (default: sample)")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("count", help="exact motif census of one layer")
    common_io(c)
    c.add_argument("--m", type=int, help="layer to count (for mixed files)")
    c.add_argument("--l", type=int, default=1, help="overlap index")
    c.add_argument("--cycles", help="comma list of loose-cycle lengths")
    c.set_defaults(func=cmd_count)

    t = sub.add_parser("test", help="run a community-structure test")
    common_io(t)
    t.add_argument("--regime", choices=("sparse", "dense", "combined"), required=True)
    t.add_argument("--m", type=int, help="layer to test (for mixed files)")
    t.add_argument("--l", type=int, help="overlap index (dense/combined)")
    t.add_argument("--kn", type=int, help="cycle length (sparse; default from rates)")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--a", type=float, help="within rate/probability if known")
    t.add_argument("--b", type=float, help="between rate/probability if known")
    t.add_argument("--k", type=int, default=2)
    t.add_argument("--weights", help="comma weights for the combined statistic")
    t.set_defaults(func=cmd_test)

    e = sub.add_parser("estimate", help="estimate within/between rates")
    common_io(e)
    e.add_argument("--m", type=int)
    e.add_argument("--k", type=int, default=2)
    e.add_argument("--kn", type=int, help="cycle length for the count")
    e.set_defaults(func=cmd_estimate)

    s = sub.add_parser("simulate", help="run a rejection-proportion grid")
    s.add_argument("--config", required=True, help="flat key=value config file")
    s.add_argument("--workers", type=int, default=0, help="0 = all cores")
    s.add_argument("--reps", type=int, help="override replication count")
    s.add_argument("--seed", type=int, help="override master seed")
    s.add_argument("--output", help="CSV path (default simulation.csv)")
    s.add_argument("--timing", action="store_true",
                   help="record real wall time per cell (breaks byte-identical reruns)")
    s.set_defaults(func=cmd_simulate)

    cl = sub.add_parser("classify", help="detectability regime for a density exponent")
    cl.add_argument("--m", type=int, required=True)
    cl.add_argument("--k", type=int, default=2)
    cl.add_argument("--alpha-exp", type=float, required=True,
                    help="hyperedge probability decays like n^-alpha_exp")
    cl.add_argument("--kappa", type=float, help="signal-to-noise ratio")
    cl.add_argument("--format", choices=("text", "json"), default="text")
    cl.set_defaults(func=cmd_classify)

    i = sub.add_parser("ingest", help="parse, filter, and rewrite a dataset")
    i.add_argument("--input", required=True)
    i.add_argument("--labels")
    i.add_argument("--min-deg", type=int)
    i.add_argument("--max-deg", type=int)
    i.add_argument("--iterate", action="store_true",
                   help="repeat the degree filter to a fixed point")
    i.add_argument("--community", help="induce the subnetwork with this label")
    i.add_argument("--emit-incidence", action="store_true")
    i.add_argument("--output", help="output basename (default: ingested)")
    i.set_defaults(func=cmd_ingest)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (StatsError, HypergraphError, simlab.ConfigError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return RUNTIME_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
