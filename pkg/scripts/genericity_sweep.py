"""Genericity verdicts for many seeded random alphas and a few integers.

Writes one CSV row per alpha: source, max |z|, star discrepancy, verdict.
"""

import argparse
import csv
import sys
import time
from dataclasses import dataclass

from fwergodic.equidist import genericity_test
from fwergodic.padic import from_integer, random_padic


@dataclass
class SweepConfig:
    prime: int = 3
    length: int = 100_000
    depth: int = 3
    seeds: int = 20
    integers: tuple = (1, 2, 17)
    z: float = 5.0
    dstar: float = 0.02


def run(cfg, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["alpha", "max_abs_z", "star_discrepancy", "verdict"])
    N = cfg.length + cfg.depth
    sources = [(f"seed:{s}", random_padic(s, cfg.prime, N)) for s in range(cfg.seeds)]
    sources += [(f"int:{v}", from_integer(v, cfg.prime, N)) for v in cfg.integers]
    passed = 0
    for label, alpha in sources:
        rep = genericity_test(alpha, cfg.length, cfg.depth, cfg.z, cfg.dstar)
        passed += label.startswith("seed") and rep.verdict
        w.writerow([label, f"{rep.max_abs_z:.4f}", f"{rep.star_discrepancy:.6f}", int(rep.verdict)])
    return passed


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--prime", type=int, default=3)
    ap.add_argument("--length", type=int, default=100_000)
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()
    cfg = SweepConfig(prime=args.prime, length=args.length, seeds=args.seeds)
    t0 = time.perf_counter()
    passed = run(cfg, sys.stdout)
    print(f"{passed}/{cfg.seeds} seeded alphas pass ({time.perf_counter() - t0:.1f}s)", file=sys.stderr)


if __name__ == "__main__":
    main()
