#!/usr/bin/env python3
"""Print the detectability-threshold tables: SNR/contiguity constants for
small (m, k), the cycle-length schedule, and solved rate ratios for the
bundled grid designs."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hypertest import simlab, stats  # noqa: E402


def main() -> int:
    print("contiguity constants and thresholds (kappa below which the")
    print("bounded-degree models are indistinguishable):")
    print(f"{'m':>3} {'k':>3} {'tau1':>10} {'tau2':>10} {'threshold':>10}")
    for m in range(3, 7):
        for k in (2, 3, 4):
            t1, t2 = stats.contiguity_constants(m, k)
            thr = 1.0 / (t2 * (k * k - 1))
            print(f"{m:>3} {k:>3} {t1:>10.5f} {t2:>10.5f} {thr:>10.5f}")

    print("\ncycle-length schedule (rate 10, default tuning):")
    print(f"{'n':>8} {'k_n':>4}")
    for n in (3, 10, 26, 100, 1000, 29843, 10 ** 6):
        print(f"{n:>8} {stats.select_kn(n, 10.0):>4}")

    print("\nsolved rate ratios at n=100 (dense design, b3 = 0.1*b2 = 0.01):")
    print(f"{'target':>7} {'r2':>7} {'r3':>7}")
    for d in range(11):
        r2 = simlab.solve_rate_ratio(0.1, float(d), 100, 2, 2, 1)
        r3 = simlab.solve_rate_ratio(0.01, float(d), 100, 3, 2, 1)
        print(f"{d:>7} {r2:>7.3f} {r3:>7.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
