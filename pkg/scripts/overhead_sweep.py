#!/usr/bin/env python3
"""Reproduce the overhead contrast: sweep the target error for both
algorithms and print mean labeling/comparison overheads per cell.

    python scripts/overhead_sweep.py --seeds 30 --epsilons 0.1,0.05,0.025
"""

import argparse

from crowdpac.geometry import ProblemConfig
from crowdpac.harness import ExperimentConfig, sweep, write_report
from crowdpac.oracles import CrowdConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=30)
    parser.add_argument("--epsilons", default="0.1,0.05,0.025")
    parser.add_argument("--alpha", type=float, default=0.35)
    parser.add_argument("--beta", type=float, default=0.35)
    parser.add_argument("--d", type=int, default=2)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--out", default=None, help="optional report directory")
    args = parser.parse_args()

    epsilons = [float(part) for part in args.epsilons.split(",")]
    cfg = ExperimentConfig(
        problem=ProblemConfig(dimension=args.d, target_error=epsilons[0]),
        crowd=CrowdConfig(alpha=args.alpha, beta=args.beta),
        seeds=tuple(range(args.seeds)),
        algorithm="both",
    )
    rows = sweep(cfg, epsilons, jobs=args.jobs)

    print(f"{'algorithm':<10} {'eps':>6} {'m_eps':>6} {'mean lam_L':>11} "
          f"{'mean lam_C':>11} {'mean err':>9}")
    for row in rows:
        if "summary" in row.flags:
            print(f"{row.algorithm:<10} {row.epsilon:>6} {row.m_eps:>6} "
                  f"{row.lambda_L:>11.3f} {row.lambda_C:>11.1f} {row.holdout_error:>9.4f}")
    if args.out:
        path = write_report(rows, args.out, cfg)
        print(f"\nwrote {len(rows)} rows to {path}")


if __name__ == "__main__":
    main()
