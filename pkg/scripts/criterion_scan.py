"""First non-vanishing criterion witness for every odd d over a range of primes."""

import argparse
import csv
import sys
from dataclasses import dataclass, field

from fwergodic.fwcriterion import integer_alphas, odd_exponents, scan_criterion


@dataclass
class ScanConfig:
    primes: list = field(default_factory=lambda: [5, 7, 11, 13, 17, 19, 23])
    alpha_max: int = 20
    n_max: int = 20
    workers: int = 1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", default="5,7,11,13,17,19,23")
    ap.add_argument("--alpha-max", type=int, default=20)
    ap.add_argument("--n-max", type=int, default=20)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    cfg = ScanConfig([int(v) for v in args.primes.split(",")], args.alpha_max, args.n_max, args.workers)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["p", "d", "alpha", "n", "pairs_scanned"])
    for p in cfg.primes:
        alphas = integer_alphas(p, 1, cfg.alpha_max, cfg.n_max)
        for d in odd_exponents(p):
            res = scan_criterion(p, d, alphas, cfg.n_max, workers=cfg.workers)
            if res.witness is None:
                w.writerow([p, d, "", "", res.scanned])
            else:
                w.writerow([p, d, res.witness[0].value, res.witness[1], res.scanned])


if __name__ == "__main__":
    main()
