"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Set CONJPERM_ACCEPTANCE_RUNS=100 to run the full 100 seeded repetitions of
the Monte Carlo cross-check (default: a 10-run spot check).
"""

import math
import os
import time

import numpy as np

from conjperm.montecarlo import batch_statistic, count_hits, map_shards, mean_statistic
from conjperm.oracle import (
    COUPLING_CLASSES,
    COUPLING_LAWS,
    all_words,
    exact_tail,
    negative_control_law,
    padded,
    verify_bernoulli_cycles,
    verify_coupling,
    verify_eulerian,
    verify_greene,
    verify_h1_from_h1prime,
    verify_las,
    verify_merge_lis,
    verify_rsk_edges,
)
from conjperm.rates import i_euler, i_lis_half, i_lis_one
from conjperm.samplers import EwensParams
from conjperm.statistics import CATALOGUE, lipschitz_sup, proof_bound

MC_RUNS = int(os.environ.get("CONJPERM_ACCEPTANCE_RUNS", "10"))
MC_SAMPLES = 1_000_000
MC_CELLS = [
    # (law, statistic, n, threshold, direction, exact law)
    ("uniform", "lis", 9, 3, "<=", EwensParams(1.0, 9)),
    ("ewens:2", "descents", 8, 5, ">=", EwensParams(2.0, 8)),
]
LLN_N, LLN_SAMPLES, LLN_SEED = 10_000, 1_000, 2024


def test_criterion_01_coupling_exact(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for n in (4, 5, 6):
        sources = list(COUPLING_LAWS) + ["class:" + ",".join(map(str, padded(p, n))) for p in COUPLING_CLASSES]
        for src in sources:
            worst = max(worst, verify_coupling(src, n).max_discrepancy)
    control = min(verify_coupling(negative_control_law(n), n).max_discrepancy for n in (4, 5, 6))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and control > 1e-3 and elapsed <= 60
    criterion(1, "coupling exactness", ok, f"max TV={worst:.2e} control TV={control:.3f} time={elapsed:.1f}s")


def test_criterion_02_bernoulli_cycles(criterion):
    t0 = time.perf_counter()
    worst = max(
        verify_bernoulli_cycles(theta, n).max_discrepancy
        for theta in (0.5, 1.0, 2.0, 5.0)
        for n in range(1, 9)
    )
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed <= 60
    criterion(2, "Bernoulli cycle representation", ok, f"sup-norm={worst:.2e} time={elapsed:.1f}s")


def test_criterion_03_lipschitz(criterion):
    problems = []
    sups = {}
    for n in (6, 7):
        for stat in CATALOGUE:
            cert = lipschitz_sup(stat, n)
            sups[(str(stat), n)] = cert.sup_delta
            if not math.isfinite(cert.sup_delta):
                problems.append(f"{stat}@{n} infinite")
            bound = proof_bound(stat, n)
            if str(stat) in ("inv", "descents", "ascents", "maj") and cert.sup_delta > bound:
                problems.append(f"{stat}@{n} sup {cert.sup_delta} > {bound}")
    for stat in ("lis", "lds", "descents"):
        for n in range(2, 7):
            rep = verify_h1_from_h1prime(stat, n)
            if not rep.passed:
                problems.append(f"H1 {stat}@{n}")
    detail = "inv={} descents={} ascents={} maj={} at n=7".format(
        *(sups[(s, 7)] for s in ("inv", "descents", "ascents", "maj"))
    )
    criterion(3, "Lipschitz certificates and H1", not problems, "; ".join(problems) or detail)


def _grid_oracle(x, t):
    a = np.abs(t)
    k = np.maximum(t, 0) + np.log(-np.expm1(-a)) - np.log(a)
    return max(float(np.max(x * t - k)), 0.0)


def test_criterion_04_rate_anchors(criterion):
    problems = []
    if i_lis_half(2) != 0 or i_lis_one(2) != 0:
        problems.append("anchors at 2")
    half = [i_lis_half(x) for x in np.linspace(2, 6, 10_000)]
    if not all(b > a for a, b in zip(half, half[1:])):
        problems.append("iLisHalf not increasing")
    one = [i_lis_one(x) for x in np.linspace(0.1, 2, 10_000)]
    # the final grid point is x = 2, where the rate is 0
    if not all(b < a for a, b in zip(one, one[1:])):
        problems.append("iLisOne not decreasing")
    if abs(i_euler(0.5)) > 1e-10:
        problems.append("iEuler(1/2)")
    t = np.linspace(-50, 50, 1_000_001)
    t = t[t != 0]
    gap = max(abs(i_euler(x) - _grid_oracle(x, t)) for x in np.linspace(0.05, 0.95, 50))
    if gap > 1e-8:
        problems.append(f"iEuler grid gap {gap:.2e}")
    criterion(4, "rate-function anchors", not problems, "; ".join(problems) or f"iEuler grid gap={gap:.1e}")


def test_criterion_05_merge_lis_inequality(criterion):
    t0 = time.perf_counter()
    failures = [w for w in all_words(5) if not verify_merge_lis(w, 5).passed]
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed <= 300
    criterion(5, "LIS after one merge step, all of S_5", ok, f"violations={len(failures)} time={elapsed:.1f}s")


def test_criterion_06_greene_rsk(criterion):
    mismatches = sum(verify_greene(n, 3).max_discrepancy for n in range(1, 8))
    edges = sum(verify_rsk_edges(n).max_discrepancy for n in range(1, 8))
    criterion(6, "Greene / RSK", mismatches == 0 and edges == 0, f"greene mismatches={mismatches:g} lis/lds mismatches={edges:g}")


def test_criterion_07_eulerian_and_las(criterion):
    euler = max(verify_eulerian(n).max_discrepancy for n in range(1, 9))
    las_bad = sum(verify_las(n).max_discrepancy for n in range(1, 9))
    criterion(7, "Eulerian equidistribution and LAS", euler == 0 and las_bad == 0, f"eulerian gap={euler:g} las mismatches={las_bad:g}")


def test_criterion_08_monte_carlo_vs_exact(criterion):
    allowed = MC_RUNS // 100
    details, ok = [], True
    for law, stat, n, thr, direction, exact_law in MC_CELLS:
        p = exact_tail(stat, exact_law, thr, direction)
        sd = math.sqrt(p * (1 - p) / MC_SAMPLES)
        misses, slowest = 0, 0.0
        for seed in range(MC_RUNS):
            t0 = time.perf_counter()
            (hits,) = count_hits(law, stat, n, MC_SAMPLES, seed, [thr], direction, threads=os.cpu_count() or 1)
            slowest = max(slowest, time.perf_counter() - t0)
            misses += abs(hits / MC_SAMPLES - p) > 4 * sd
        ok &= misses <= allowed and slowest <= 120
        details.append(f"{law}/{stat}: {MC_RUNS - misses}/{MC_RUNS} within 4sd, slowest run {slowest:.1f}s")
    criterion(8, "Monte Carlo vs exact oracle", ok, "; ".join(details))


def test_criterion_09_lln(criterion):
    m = mean_statistic("uniform", "lis", LLN_N, LLN_SAMPLES, LLN_SEED) / math.sqrt(LLN_N)
    criterion(9, "LIS / sqrt(n) law of large numbers", 1.85 <= m <= 2.00, f"mean={m:.4f}")


def test_criterion_10_determinism(criterion):
    mismatched = []
    for law, stat, n, thr, direction, _ in MC_CELLS:
        counts = {t: count_hits(law, stat, n, MC_SAMPLES, 0, [thr], direction, threads=t) for t in (1, 4, 8)}
        if len(set(map(tuple, counts.values()))) != 1:
            mismatched.append(f"{law}/{stat} {counts}")
    lln = {
        t: tuple(map_shards("uniform", LLN_N, LLN_SAMPLES, LLN_SEED, lambda w: tuple(batch_statistic("lis", w).tolist()), t))
        for t in (1, 4, 8)
    }
    if len(set(lln.values())) != 1:
        mismatched.append("lln sample")
    criterion(10, "determinism across thread counts", not mismatched, "; ".join(mismatched) or "threads 1/4/8 identical")
