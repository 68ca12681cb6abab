"""Monte Carlo experiment runner: rejection-proportion grids.

Each cell samples a nonuniform layered model with shared labels, computes
the per-layer square-root-form statistics plus their equal-weight (or
user-weighted) combination, and tallies rejections at the two-sided
critical value.

Reproducibility contract: replicate i of cell c uses the RNG stream
seeded by SeedSequence(master_seed, spawn_key=(c, i)). Replicates are
dispatched in fixed-size chunks and reduced in chunk order, so results
are bit-identical for any worker count.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field, asdict
from multiprocessing import get_context

import numpy as np

from . import stats
from .genmodel import CommunityDistribution, LayerSpec, sample_nonuniform
from .hypercore import HypergraphError
from .stats import DenseRegimeParams, StatsError

__all__ = [
    "LayerConfig",
    "SimConfig",
    "StatResult",
    "SimResult",
    "NoBracket",
    "ConfigError",
    "replicate_rng",
    "run_experiment",
    "run_grid",
    "solve_rate_ratio",
    "emit_csv",
    "read_csv",
    "load_config",
    "COLUMNS",
]


class NoBracket(StatsError):
    """The target noncentrality is unreachable below the ratio cap."""


class ConfigError(ValueError):
    """Malformed simulation config file."""


_CHUNK = 32  # fixed chunk size keeps float reductions schedule-independent


@dataclass(frozen=True)
class LayerConfig:
    """One uniform layer of a simulation cell: a = r * b."""

    m: int
    b: float
    r: float = 1.0
    l: int = 1

    @property
    def a(self) -> float:
        return self.r * self.b


@dataclass(frozen=True)
class SimConfig:
    """One grid cell: model, replication count, and statistics to tally."""

    cell_id: int
    n: int
    layers: tuple[LayerConfig, ...]
    varsigma: float = 0.5
    reps: int = 500
    alpha: float = 0.05
    seed: int = 0
    k: int = 2
    statistics: tuple[str, ...] = ()
    weights: tuple[float, ...] | None = None
    delta_target: float | None = None

    def __post_init__(self):
        if self.reps < 1:
            raise ConfigError(f"reps must be >= 1, got {self.reps}")
        if not 0.0 < self.varsigma <= 0.5:
            raise ConfigError(f"varsigma must be in (0, 0.5], got {self.varsigma}")
        if any(c.r < 1.0 for c in self.layers):
            raise ConfigError("rate ratios r must be >= 1")
        if not self.statistics:
            names = tuple(f"Z{c.m}" for c in self.layers)
            if len(self.layers) > 1:
                names = names + ("Z",)
            object.__setattr__(self, "statistics", names)


@dataclass(frozen=True)
class StatResult:
    statistic_name: str
    rejection_proportion: float
    std_error: float
    mean_statistic: float
    reps_completed: int
    reps_failed: int


@dataclass(frozen=True)
class SimResult:
    config: SimConfig
    stats: tuple[StatResult, ...]
    wall_ms: int

    def by_name(self) -> dict[str, StatResult]:
        return {s.statistic_name: s for s in self.stats}


def replicate_rng(seed: int, cell_id: int, rep: int) -> np.random.Generator:
    """Counter-style per-replicate stream; distinct (cell, rep) pairs never
    share a stream regardless of scheduling."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(cell_id, rep)))


def _layer_specs(cfg: SimConfig) -> list[LayerSpec]:
    communities = (
        CommunityDistribution.imbalanced(cfg.varsigma)
        if cfg.k == 2
        else CommunityDistribution.uniform(cfg.k)
    )
    return [
        LayerSpec(
            n=cfg.n, m=c.m, k=cfg.k, p_within=c.a, p_between=c.b,
            communities=communities,
        )
        for c in cfg.layers
    ]


def _run_replicate(cfg: SimConfig, rep: int) -> dict[str, tuple[float, bool, bool]]:
    """One replicate: name -> (statistic value, reject flag, failed flag)."""
    rng = replicate_rng(cfg.seed, cfg.cell_id, rep)
    specs = _layer_specs(cfg)
    hg, _, _ = sample_nonuniform(specs, rng, shared_labels=True)
    out: dict[str, tuple[float, bool, bool]] = {}
    layer_stats: list[float] = []
    all_ok = True
    for c in cfg.layers:
        name = f"Z{c.m}"
        try:
            rep_t = stats.dense_test(hg.layers[c.m], c.l, alpha=cfg.alpha)
            val = rep_t.statistic_prime
            out[name] = (val, rep_t.reject_prime, False)
            layer_stats.append(val)
        except (StatsError, HypergraphError):
            out[name] = (math.nan, False, True)
            all_ok = False
    if len(cfg.layers) > 1:
        if all_ok:
            if cfg.weights is not None:
                w = cfg.weights
            else:
                w = tuple(1.0 / math.sqrt(len(layer_stats)) for _ in layer_stats)
            z = stats.normal_quantile(cfg.alpha)
            val = float(sum(c_ * v for c_, v in zip(w, layer_stats)))
            out["Z"] = (val, abs(val) > z, False)
        else:
            out["Z"] = (math.nan, False, True)
    return {name: out[name] for name in cfg.statistics if name in out}


def _run_chunk(args) -> dict[str, list[float]]:
    cfg, rep_indices = args
    agg: dict[str, list[float]] = {}
    for rep in rep_indices:
        res = _run_replicate(cfg, rep)
        for name, (val, reject, failed) in res.items():
            a = agg.setdefault(name, [0.0, 0.0, 0.0, 0.0])  # sum, rejects, done, failed
            if failed:
                a[3] += 1
            else:
                a[0] += val
                a[2] += 1
                if reject:
                    a[1] += 1
    return agg


def run_experiment(cfg: SimConfig, workers: int | None = None) -> SimResult:
    """Run one cell; deterministic in (seed, cell_id) for any worker count."""
    t0 = time.perf_counter()
    chunks = [
        (cfg, list(range(lo, min(lo + _CHUNK, cfg.reps))))
        for lo in range(0, cfg.reps, _CHUNK)
    ]
    if workers is None:
        workers = 1
    if workers <= 0:
        workers = os.cpu_count() or 1
    if workers > 1 and len(chunks) > 1:
        with get_context("fork").Pool(min(workers, len(chunks))) as pool:
            partials = pool.map(_run_chunk, chunks)
    else:
        partials = [_run_chunk(c) for c in chunks]
    totals: dict[str, list[float]] = {}
    for part in partials:  # fixed chunk order -> deterministic float sums
        for name, a in part.items():
            t = totals.setdefault(name, [0.0, 0.0, 0.0, 0.0])
            for i in range(4):
                t[i] += a[i]
    out = []
    for name in cfg.statistics:
        sum_v, rejects, done, failed = totals.get(name, [0.0, 0.0, 0.0, 0.0])
        prop = rejects / cfg.reps
        out.append(
            StatResult(
                statistic_name=name,
                rejection_proportion=prop,
                std_error=math.sqrt(prop * (1.0 - prop) / cfg.reps),
                mean_statistic=sum_v / done if done else math.nan,
                reps_completed=int(done),
                reps_failed=int(failed),
            )
        )
    wall = int(round((time.perf_counter() - t0) * 1000))
    return SimResult(config=cfg, stats=tuple(out), wall_ms=wall)


def run_grid(cfgs: list[SimConfig], workers: int | None = None) -> list[SimResult]:
    return [run_experiment(cfg, workers=workers) for cfg in cfgs]


# ---------------------------------------------------------------------------
# noncentrality inversion


def solve_rate_ratio(
    b: float,
    target_delta: float,
    n: int,
    m: int,
    k: int = 2,
    l: int = 1,
    tol: float = 1e-6,
    r_cap: float = 1e6,
) -> float:
    """Rate ratio r with noncentrality delta(a = r b) equal to the target.

    delta is zero at r = 1 and strictly increasing, so bisection applies;
    raises NoBracket when the target is unreachable below the cap.
    """
    if target_delta < 0:
        raise StatsError(f"target delta must be >= 0, got {target_delta}")
    if target_delta == 0:
        return 1.0

    def delta_at(r: float) -> float:
        p = DenseRegimeParams.from_probabilities(r * b, b, n, m, k, l)
        return stats.theoretical_evt(p, n).delta

    lo, hi = 1.0, 2.0
    while delta_at(hi) < target_delta:
        lo = hi
        hi *= 2.0
        if hi > r_cap:
            raise NoBracket(f"delta={target_delta} unreachable below r={r_cap}")
    while True:
        mid = 0.5 * (lo + hi)
        d = delta_at(mid)
        if abs(d - target_delta) < tol:
            return mid
        if d < target_delta:
            lo = mid
        else:
            hi = mid


# ---------------------------------------------------------------------------
# CSV interface


COLUMNS = (
    "cell_id", "n", "m_list", "b_list", "r_list", "varsigma", "delta_target",
    "statistic_name", "rejection_proportion", "std_error", "mean_statistic",
    "reps_completed", "reps_failed", "wall_ms",
)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def emit_csv(results: list[SimResult], path, include_timing: bool = True) -> None:
    """Write one row per (cell, statistic); shortest round-trip floats,
    UTF-8, LF line endings. With ``include_timing`` off the wall_ms column
    is zeroed so repeated runs are byte-identical."""
    lines = [",".join(COLUMNS)]
    for res in results:
        cfg = res.config
        m_list = ";".join(str(c.m) for c in cfg.layers)
        b_list = ";".join(repr(float(c.b)) for c in cfg.layers)
        r_list = ";".join(repr(float(c.r)) for c in cfg.layers)
        wall = res.wall_ms if include_timing else 0
        for s in res.stats:
            row = (
                cfg.cell_id, cfg.n, m_list, b_list, r_list,
                float(cfg.varsigma), cfg.delta_target,
                s.statistic_name, float(s.rejection_proportion),
                float(s.std_error), float(s.mean_statistic),
                s.reps_completed, s.reps_failed, wall,
            )
            lines.append(",".join(_fmt(v) for v in row))
    data = "\n".join(lines) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(data)


def read_csv(path) -> list[dict]:
    """Parse an emit_csv file back into row dicts (numeric fields typed)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise ConfigError("empty results file")
    header = lines[0].split(",")
    if tuple(header) != COLUMNS:
        raise ConfigError(f"unexpected header: {header}")
    out = []
    int_cols = {"cell_id", "n", "reps_completed", "reps_failed", "wall_ms"}
    float_cols = {
        "varsigma", "delta_target", "rejection_proportion", "std_error",
        "mean_statistic",
    }
    for ln in lines[1:]:
        vals = ln.split(",")
        row: dict = {}
        for key, v in zip(header, vals):
            if key in int_cols:
                row[key] = int(v)
            elif key in float_cols:
                row[key] = float(v) if v != "" else None
            else:
                row[key] = v
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# config files


def _parse_scalar(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def load_config(path) -> list[SimConfig]:
    """Parse a flat key = value config into one SimConfig per delta target.

    Required keys: schema (= 1), n, layers ("m:b" pairs, comma separated).
    Optional: deltas (targets; rate ratios are solved per layer), r_values
    ("m:r1;r2;..." aligned with deltas), l (per layer), varsigma, reps,
    alpha, seed, k, statistics, weights ("equal" or floats).
    """
    raw: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for ln_no, ln in enumerate(fh, start=1):
            body = ln.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ConfigError(f"{path}:{ln_no}: expected 'key = value'")
            key, val = body.split("=", 1)
            raw[key.strip()] = val.strip()
    if _parse_scalar(raw.get("schema", "")) != 1:
        raise ConfigError(f"{path}: schema = 1 required")
    try:
        n = int(raw["n"])
        layer_txt = raw["layers"]
    except KeyError as exc:
        raise ConfigError(f"{path}: missing required key {exc}") from exc

    layer_pairs = []
    for part in layer_txt.split(","):
        m_txt, b_txt = part.split(":")
        layer_pairs.append((int(m_txt), float(b_txt)))
    ls = [int(x) for x in raw.get("l", "").split(",") if x] or [1] * len(layer_pairs)
    if len(ls) != len(layer_pairs):
        raise ConfigError(f"{path}: l must list one overlap per layer")

    k = int(raw.get("k", 2))
    varsigma = float(raw.get("varsigma", 0.5))
    reps = int(raw.get("reps", 500))
    alpha = float(raw.get("alpha", 0.05))
    seed = int(raw.get("seed", 0))
    stats_names = tuple(
        s.strip() for s in raw.get("statistics", "").split(",") if s.strip()
    )
    weights = None
    wtxt = raw.get("weights", "equal")
    if wtxt and wtxt != "equal":
        weights = tuple(float(x) for x in wtxt.split(","))

    deltas = [float(x) for x in raw.get("deltas", "0").split(",") if x != ""]
    r_values: dict[int, list[float]] = {}
    if "r_values" in raw:
        for part in raw["r_values"].split(";;"):
            m_txt, rs = part.split(":")
            r_values[int(m_txt)] = [float(x) for x in rs.split(";")]
        for m, rs in r_values.items():
            if len(rs) != len(deltas):
                raise ConfigError(f"{path}: r_values for m={m} must match deltas")

    cfgs = []
    for idx, d in enumerate(deltas):
        layers = []
        for (m, b), l in zip(layer_pairs, ls):
            if m in r_values:
                r = r_values[m][idx]
            else:
                r = solve_rate_ratio(b, d, n, m, k, l)
            layers.append(LayerConfig(m=m, b=b, r=r, l=l))
        cfgs.append(
            SimConfig(
                cell_id=idx, n=n, layers=tuple(layers), varsigma=varsigma,
                reps=reps, alpha=alpha, seed=seed, k=k,
                statistics=stats_names, weights=weights, delta_target=d,
            )
        )
    return cfgs
