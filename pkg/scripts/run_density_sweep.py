#!/usr/bin/env python3
"""Power against layer density at fixed noncentrality.

Sweeps log(b3) over -8..-6 (natural log) with b2 = 10*b3, holding the
noncentrality target at 1 or 3, for balanced and imbalanced communities;
writes one CSV per (target, balance) cell group. Mirrors the second half
of the bundled grid study.
"""

import argparse
import math
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hypertest import simlab  # noqa: E402
from hypertest.simlab import LayerConfig, SimConfig  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--workers", type=int, default=0)
    ap.add_argument("--seed", type=int, default=20240801)
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = 100
    for delta in (1.0, 3.0):
        for vs in (0.5, 0.3):
            cells = []
            for idx, log_b3 in enumerate((-8.0, -7.0, -6.0)):
                b3 = math.exp(log_b3)
                b2 = 10.0 * b3
                r2 = simlab.solve_rate_ratio(b2, delta, n, 2, 2, 1)
                r3 = simlab.solve_rate_ratio(b3, delta, n, 3, 2, 1)
                cells.append(
                    SimConfig(
                        cell_id=idx, n=n,
                        layers=(LayerConfig(2, b2, r2), LayerConfig(3, b3, r3)),
                        varsigma=vs, reps=args.reps, alpha=0.05,
                        seed=args.seed, delta_target=delta,
                    )
                )
            t0 = time.time()
            results = simlab.run_grid(cells, workers=args.workers)
            tag = f"density_sweep_delta{int(delta)}_vs{int(vs * 10):02d}"
            out = out_dir / f"{tag}.csv"
            simlab.emit_csv(results, out, include_timing=False)
            print(f"{tag}: -> {out} ({time.time() - t0:.0f}s)")
            for res, log_b3 in zip(results, (-8, -7, -6)):
                row = " ".join(
                    f"{s.statistic_name}={s.rejection_proportion:.3f}"
                    for s in res.stats
                )
                print(f"  log_b3={log_b3}: {row}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
