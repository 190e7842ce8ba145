"""Mean of LIS / sqrt(n) for uniform permutations along a grid of sizes.

The mean approaches 2 from below; the finite-n deficit is of order n^{-1/3}.
"""

import argparse
import math
import os

from conjperm.montecarlo import mean_statistic


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, nargs="+", default=[100, 1000, 10_000])
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--law", default="uniform")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    args = p.parse_args()
    print("n,mean_lis_over_sqrt_n")
    for n in args.n:
        m = mean_statistic(args.law, "lis", n, args.samples, args.seed, args.threads) / math.sqrt(n)
        print(f"{n},{m:.5f}")


if __name__ == "__main__":
    main()
