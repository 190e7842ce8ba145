"""Monte Carlo tail estimates, empirical rate curves and cycle diagnostics.

Samples are split into fixed-size shards; shard k for size n draws from its
own substream ``SeedSequence(seed, spawn_key=(n, k))``.  Shard layout does not
depend on the thread count, so hit counts are bit-identical for any
``threads`` value.

Naive sampling only resolves probabilities down to roughly 1/samples.  The
speed-n lower tails are far below that at any interesting n; use the exact
oracle for those regimes.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import beta as beta_dist

from conjperm.errors import DomainError, IncompatibleExponents
from conjperm.rates import RATE_EXPONENTS, RATE_FUNCTIONS, ci_bound_ewens, moderate_exponents
from conjperm.samplers import Law, parse_law
from conjperm.statistics import StatisticId, as_statistic, evaluate, rsk_prefix_sums

SHARD_SIZE = 1 << 16
# caps shard memory at roughly this many matrix entries
SHARD_ENTRIES = 1 << 22
# integer thresholds computed as floats must not flip on rounding
SLACK = 1e-9
# above this size the O(n^2) vectorized kernels lose to per-row loops
VECTOR_MAX_N = 128


def shard_rng(seed: int, n: int, shard: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed & 0xFFFFFFFFFFFFFFFF, spawn_key=(n, shard))
    return np.random.Generator(np.random.PCG64(ss))


def shard_sizes(samples: int, n: int, shard_size: int = SHARD_SIZE) -> list[int]:
    size = max(1, min(shard_size, SHARD_ENTRIES // max(n, 1)))
    full, rest = divmod(samples, size)
    return [size] * full + ([rest] if rest else [])


def map_shards(
    law: Law | str,
    n: int,
    samples: int,
    seed: int,
    fn: Callable[[np.ndarray], object],
    threads: int = 1,
    shard_size: int = SHARD_SIZE,
) -> list:
    """Apply fn to every shard's sample matrix; results come back in shard order."""
    law = parse_law(law) if isinstance(law, str) else law
    sizes = shard_sizes(samples, n, shard_size)

    def run(k: int):
        words = law.sample_batch(n, sizes[k], shard_rng(seed, n, k))
        return fn(words)

    if threads <= 1 or len(sizes) <= 1:
        return [run(k) for k in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, range(len(sizes))))


# --- vectorized statistics ---------------------------------------------------


def _lis_rows(w: np.ndarray) -> np.ndarray:
    size, n = w.shape
    piles = np.full((size, n), n + 1, dtype=w.dtype)
    rows = np.arange(size)
    for j in range(n):
        v = w[:, j]
        k = np.count_nonzero(piles < v[:, None], axis=1)
        piles[rows, k] = v
    return np.count_nonzero(piles <= n, axis=1)


def _cycles_rows(w: np.ndarray) -> np.ndarray:
    size, n = w.shape
    succ = w - 1
    idx = np.broadcast_to(np.arange(n), (size, n))
    low = idx.copy()
    cur = succ.copy()
    for _ in range(n - 1):
        np.minimum(low, cur, out=low)
        cur = np.take_along_axis(succ, cur, axis=1)
    return np.count_nonzero(low == idx, axis=1)


def _inversions_rows(w: np.ndarray) -> np.ndarray:
    n = w.shape[1]
    total = np.zeros(w.shape[0], dtype=np.int64)
    for i in range(n - 1):
        total += np.count_nonzero(w[:, i:i + 1] > w[:, i + 1:], axis=1)
    return total


def batch_statistic(stat: StatisticId | str, w: np.ndarray) -> np.ndarray:
    """Statistic of every row of a (size, n) word matrix (scalar statistics only)."""
    stat = as_statistic(stat)
    if stat.is_vector:
        raise ValueError("batch_statistic handles scalar statistics; use rsk_prefix_sums per row")
    size, n = w.shape
    tag = stat.tag
    down = w[:, :-1] > w[:, 1:]
    up = ~down
    if tag == "descents":
        return np.count_nonzero(down, axis=1)
    if tag == "ascents":
        return np.count_nonzero(up, axis=1)
    if tag in ("peaks", "valleys", "las"):
        pk = np.count_nonzero(up[:, :-1] & down[:, 1:], axis=1)
        vl = np.count_nonzero(down[:, :-1] & up[:, 1:], axis=1)
        if tag == "peaks":
            return pk
        if tag == "valleys":
            return vl
        first = down[:, 0] if n > 1 else np.zeros(size, dtype=bool)
        return 1 + first.astype(np.int64) + pk + vl
    if tag == "exceedances":
        return np.count_nonzero(w > np.arange(1, n + 1), axis=1)
    if tag in ("maj", "maj-norm", "maj-paper", "maj-paper-norm"):
        mask = up if tag.startswith("maj-paper") else down
        m = (mask * np.arange(1, n)).sum(axis=1)
        return m / n if tag.endswith("norm") else m
    if n <= VECTOR_MAX_N:
        if tag == "lis":
            return _lis_rows(w)
        if tag == "lds":
            return _lis_rows(n + 1 - w)
        if tag in ("inv", "inv-norm"):
            inv = _inversions_rows(w)
            return inv / n if tag == "inv-norm" else inv
        if tag == "cycles":
            return _cycles_rows(w)
    return np.array([evaluate(stat, row.tolist()) for row in w])


# --- thresholds and estimates ----------------------------------------------


@dataclass(frozen=True)
class Threshold:
    """Event boundary ``x n^alpha`` (form "scaled") or ``2 sqrt(n) + x n^alpha``
    (form "moderate", alpha playing the role of nu)."""

    x: float
    alpha: float = 0.5
    form: str = "scaled"

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.form not in ("scaled", "moderate"):
            raise ValueError(f"unknown threshold form {self.form!r}")

    def value(self, n: int) -> float:
        if self.form == "moderate":
            return 2 * math.sqrt(n) + self.x * n ** self.alpha
        return self.x * n ** self.alpha


def hit_mask(values: np.ndarray, thr: float, direction: str) -> np.ndarray:
    slack = SLACK * max(1.0, abs(thr))
    if direction in (">=", "ge"):
        return values >= thr - slack
    if direction in ("<=", "le"):
        return values <= thr + slack
    if direction in (">", "gt"):
        return values > thr + slack
    if direction in ("<", "lt"):
        return values < thr - slack
    raise ValueError(f"bad direction {direction!r}")


def clopper_pearson(hits: int, total: int, level: float = 0.95) -> tuple[float, float]:
    a = (1 - level) / 2
    lo = 0.0 if hits == 0 else float(beta_dist.ppf(a, hits, total - hits + 1))
    hi = 1.0 if hits == total else float(beta_dist.ppf(1 - a, hits + 1, total - hits))
    return lo, hi


@dataclass(frozen=True)
class TailEstimate:
    n: int
    hits: int
    total: int
    threshold: float
    speed: float = 1.0
    theory_rate: float | None = None

    @property
    def p_hat(self) -> float:
        return self.hits / self.total

    @property
    def ci(self) -> tuple[float, float]:
        return clopper_pearson(self.hits, self.total)

    @property
    def empirical_rate(self) -> float | None:
        """-ln(p_hat) / n^speed; None when no hit was observed."""
        if self.hits == 0:
            return None
        return -math.log(self.p_hat) / self.n ** self.speed

    def to_dict(self) -> dict:
        lo, hi = self.ci
        rate = self.empirical_rate
        out = {
            "n": self.n,
            "hits": self.hits,
            "total": self.total,
            "threshold": self.threshold,
            "pHat": self.p_hat,
            "ciLow": lo,
            "ciHigh": hi,
            "empiricalRate": "undefined" if rate is None else rate,
        }
        if self.theory_rate is not None:
            out["theoryRate"] = "inf" if math.isinf(self.theory_rate) else self.theory_rate
        return out


CSV_COLUMNS = ("n", "hits", "total", "pHat", "ciLow", "ciHigh", "empiricalRate", "theoryRate")


def write_csv(estimates: Sequence[TailEstimate], target) -> None:
    """Summary table to a path or an open text stream."""
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", newline="") as fh:
            write_csv(estimates, fh)
        return
    writer = csv.DictWriter(target, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for est in estimates:
        row = est.to_dict()
        row.setdefault("theoryRate", "")
        writer.writerow(row)


@dataclass(frozen=True)
class ExperimentConfig:
    law: str
    statistic: str
    n_grid: tuple[int, ...]
    samples: int
    threshold: Threshold
    beta: float = 0.5
    seed: int = 0
    direction: str = ">="

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        if not self.n_grid or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError("n_grid must be non-empty and strictly increasing")
        if self.n_grid[0] < 1:
            raise ValueError("sizes must be positive")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not 0 < self.beta <= 1:
            raise ValueError("beta must lie in (0, 1]")
        if self.direction not in (">=", "<=", ">", "<", "ge", "le", "gt", "lt"):
            raise ValueError(f"bad direction {self.direction!r}")
        parse_law(self.law)
        if as_statistic(self.statistic).is_vector:
            raise ValueError("tail estimates need a scalar statistic")


def count_hits(
    law: Law | str,
    stat: StatisticId | str,
    n: int,
    samples: int,
    seed: int,
    thresholds: Sequence[float],
    direction: str = ">=",
    threads: int = 1,
) -> list[int]:
    """Hit counts for several thresholds evaluated on one shared sample."""

    def fn(words: np.ndarray) -> np.ndarray:
        vals = batch_statistic(stat, words)
        return np.array([np.count_nonzero(hit_mask(vals, t, direction)) for t in thresholds])

    parts = map_shards(law, n, samples, seed, fn, threads)
    return [int(v) for v in np.sum(parts, axis=0)]


def estimate_tail(cfg: ExperimentConfig, threads: int = 1, theory_rate: float | None = None) -> list[TailEstimate]:
    out = []
    for n in cfg.n_grid:
        thr = cfg.threshold.value(n)
        (hits,) = count_hits(cfg.law, cfg.statistic, n, cfg.samples, cfg.seed, [thr], cfg.direction, threads)
        out.append(TailEstimate(n, hits, cfg.samples, thr, cfg.beta, theory_rate))
    return out


def mean_statistic(law: Law | str, stat: StatisticId | str, n: int, samples: int, seed: int, threads: int = 1) -> float:
    parts = map_shards(law, n, samples, seed, lambda w: float(np.sum(batch_statistic(stat, w))), threads)
    return math.fsum(parts) / samples


# --- rate curves -------------------------------------------------------------


@dataclass
class RateCurve:
    rate_fn: str
    x: float
    theory: float
    estimates: list[TailEstimate]
    gaps: list[float | None] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "rateFn": self.rate_fn,
            "x": self.x,
            "theory": "inf" if math.isinf(self.theory) else self.theory,
            "estimates": [e.to_dict() for e in self.estimates],
            "gaps": self.gaps,
        }


def expected_exponents(rate_fn: str, cfg: ExperimentConfig) -> tuple[float, float, str]:
    if rate_fn == "moderate":
        speed, scale = moderate_exponents(cfg.threshold.alpha)
        return speed, scale, "moderate"
    if rate_fn not in RATE_EXPONENTS:
        raise ValueError(f"unknown rate function {rate_fn!r}")
    speed, scale = RATE_EXPONENTS[rate_fn]
    return speed, scale, "scaled"


def check_exponents(rate_fn: str, cfg: ExperimentConfig) -> None:
    speed, scale, form = expected_exponents(rate_fn, cfg)
    if (
        cfg.threshold.form != form
        or not math.isclose(cfg.threshold.alpha, scale, abs_tol=1e-12)
        or not math.isclose(cfg.beta, speed, abs_tol=1e-12)
    ):
        raise IncompatibleExponents(
            f"{rate_fn} needs form={form}, alpha={scale:g}, beta={speed:g}; got "
            f"form={cfg.threshold.form}, alpha={cfg.threshold.alpha:g}, beta={cfg.beta:g}"
        )


def rate_curve(cfg: ExperimentConfig, rate_fn: str, threads: int = 1) -> RateCurve:
    """Empirical -ln p_hat / n^beta next to the theoretical rate.

    Convergence is only logged by callers; finite-n gaps are large.
    """
    check_exponents(rate_fn, cfg)
    theory = RATE_FUNCTIONS[rate_fn](cfg.threshold.x)
    estimates = estimate_tail(cfg, threads, theory_rate=theory)
    gaps = [
        None if e.empirical_rate is None or math.isinf(theory) else e.empirical_rate - theory
        for e in estimates
    ]
    return RateCurve(rate_fn, cfg.threshold.x, theory, estimates, gaps)


# --- cycle-count diagnostic and joint rows -------------------------------------


@dataclass
class CiDiagnostic:
    alpha: float
    beta: float
    epsilon: float
    per_n: list[TailEstimate]
    bounds: list[float | None]

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "epsilon": self.epsilon,
            "perN": [e.to_dict() for e in self.per_n],
            "bennettLogBound": [
                None if b is None else ("-inf" if math.isinf(b) else b) for b in self.bounds
            ],
        }


def ci_diagnostic(
    law: Law | str,
    alpha: float,
    beta: float,
    epsilon: float,
    n_grid: Sequence[int],
    samples: int,
    seed: int,
    threads: int = 1,
) -> CiDiagnostic:
    """Estimate P(#cycles / n^alpha > epsilon) along n_grid."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not (0 < alpha <= 1 and 0 < beta <= 1):
        raise ValueError("alpha and beta must lie in (0, 1]")
    law = parse_law(law) if isinstance(law, str) else law
    per_n, bounds = [], []
    for n in n_grid:
        thr = epsilon * n ** alpha
        (hits,) = count_hits(law, "cycles", n, samples, seed, [thr], ">", threads)
        per_n.append(TailEstimate(n, hits, samples, thr, beta))
        bound = None
        if law.kind in ("ewens", "uniform", "cyclic"):
            theta = {"uniform": 1.0, "cyclic": 0.0}.get(law.kind, law.theta)
            try:
                bound = ci_bound_ewens(theta, n, alpha, epsilon)
            except DomainError:
                bound = None
        bounds.append(bound)
    return CiDiagnostic(alpha, beta, epsilon, per_n, bounds)


def joint_rows_tail(
    law: Law | str,
    xs: Sequence[float],
    n: int,
    samples: int,
    seed: int,
    threads: int = 1,
) -> TailEstimate:
    """Estimate P(for all j: lambda_1 + ... + lambda_j <= (x_1 + ... + x_j) sqrt n)."""
    xs = [float(x) for x in xs]
    if not xs or any(not 0 < x < 2 for x in xs):
        raise ValueError("row levels must lie in (0, 2)")
    if any(b >= a for a, b in zip(xs, xs[1:])):
        raise ValueError("row levels must be strictly decreasing")
    d = len(xs)
    caps = np.cumsum(xs) * math.sqrt(n) + SLACK * n

    def fn(words: np.ndarray) -> int:
        return sum(
            bool(np.all(np.asarray(rsk_prefix_sums(row.tolist(), d)) <= caps)) for row in words
        )

    hits = sum(map_shards(law, n, samples, seed, fn, threads))
    return TailEstimate(n, hits, samples, float(caps[-1]), 1.0)
