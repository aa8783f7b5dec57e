"""Joint test versus the one-dimensional tests over V, for random and integer alphas."""

import argparse
import json
import sys
from dataclasses import dataclass

from fwergodic.equidist import reduction_check
from fwergodic.padic import from_integer, random_padic, teichmuller


@dataclass
class ReductionConfig:
    prime: int = 5
    r: int = 2
    bound: int = 2
    length: int = 100_000
    seed: int = 11
    workers: int = 2


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--prime", type=int, default=5)
    ap.add_argument("--r", type=int, default=2)
    ap.add_argument("--bound", type=int, default=2)
    ap.add_argument("--length", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--workers", type=int, default=2)
    cfg = ReductionConfig(**vars(ap.parse_args()))

    N = cfg.length + 3
    betas = [teichmuller(1 if j == 0 else j + 1, cfg.prime, N) for j in range(cfg.r)]
    summary = {}
    for label, alpha in [("random", random_padic(cfg.seed, cfg.prime, N)), ("integer 17", from_integer(17, cfg.prime, N))]:
        rep = reduction_check(alpha, betas, cfg.bound, cfg.length, workers=cfg.workers)
        summary[label] = {"joint": rep.joint_pass, "all_sigma": rep.all_sigma_pass, "agree": rep.agree,
                          "sigmas": len(rep.sigmas)}
    json.dump(summary, sys.stdout, indent=2)
    print()


if __name__ == "__main__":
    main()
