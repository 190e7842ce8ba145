"""Empirical rate curves next to the theoretical rates.

Writes one CSV per experiment into --out.  The gaps are logged, not judged:
at desk-scale n the finite-size corrections dominate.
"""

import argparse
import logging
import os
from dataclasses import dataclass
from pathlib import Path

from conjperm.montecarlo import ExperimentConfig, Threshold, rate_curve, write_csv

log = logging.getLogger("rate_curves")


@dataclass(frozen=True)
class CurveJob:
    name: str
    law: str
    stat: str
    rate_fn: str
    x: float
    alpha: float
    beta: float
    n_grid: tuple[int, ...]
    form: str = "scaled"
    direction: str = ">="


JOBS = (
    CurveJob("lis-upper", "uniform", "lis", "lis-half", 2.6, 0.5, 0.5, (100, 400, 1600)),
    CurveJob("lis-upper-near", "uniform", "lis", "lis-half", 2.2, 0.5, 0.5, (100, 400, 1600)),
    CurveJob("lis-upper-ewens", "ewens:2", "lis", "lis-half", 2.6, 0.5, 0.5, (100, 400, 1600)),
    CurveJob("descents", "uniform", "descents", "euler", 0.6, 1.0, 1.0, (50, 100, 200)),
    CurveJob("lis-moderate", "uniform", "lis", "moderate", 0.5, 1 / 3, 0.25, (100, 400, 1600), form="moderate"),
)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--only", nargs="*", help="job names to run")
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args.out.mkdir(parents=True, exist_ok=True)

    for job in JOBS:
        if args.only and job.name not in args.only:
            continue
        cfg = ExperimentConfig(
            law=job.law,
            statistic=job.stat,
            n_grid=job.n_grid,
            samples=args.samples,
            threshold=Threshold(job.x, job.alpha, job.form),
            beta=job.beta,
            seed=args.seed,
            direction=job.direction,
        )
        curve = rate_curve(cfg, job.rate_fn, threads=args.threads)
        write_csv(curve.estimates, args.out / f"{job.name}.csv")
        log.info("%s: theory %.4f", job.name, curve.theory)
        for est, gap in zip(curve.estimates, curve.gaps):
            rate = est.empirical_rate
            log.info(
                "  n=%-6d hits=%-8d rate=%s gap=%s",
                est.n, est.hits,
                "undefined" if rate is None else f"{rate:.4f}",
                "n/a" if gap is None else f"{gap:+.4f}",
            )


if __name__ == "__main__":
    main()
