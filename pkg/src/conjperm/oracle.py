"""Exhaustive small-n enumeration: exact laws, pushforwards and checks.

All probabilities are doubles; sums go through ``math.fsum``.  Each
``verify_*`` function returns a :class:`VerificationReport` whose ``passed``
flag is ``max_discrepancy <= tolerance``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from conjperm.errors import LimitExceeded, check_limit
from conjperm.perm import (
    _compose,
    cycle_decomposition,
    cycle_type,
    merge_targets,
    num_cycles,
)
from conjperm.samplers import (
    EwensParams,
    Law,
    MixtureParams,
    bernoulli_probs,
    check_cycle_type,
    parse_law,
    star_cycle_product,
)
from conjperm.statistics import (
    CATALOGUE,
    StatisticId,
    as_statistic,
    distance,
    evaluate,
    las,
    lds,
    lipschitz_sup,
    lis,
    proof_bound,
    rsk_prefix_sums,
    rsk_shape,
)

Word = tuple[int, ...]
Weights = dict[Word, float]

TOL = 1e-12


@dataclass
class VerificationReport:
    check_name: str
    n: int
    max_discrepancy: float
    tolerance: float = TOL
    details: str = ""
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.max_discrepancy <= self.tolerance)

    def to_dict(self) -> dict:
        return asdict(self)


def all_words(n: int, limit: int | None = None) -> list[Word]:
    check_limit(n, limit)
    return list(itertools.permutations(range(1, n + 1)))


# --- exact laws ------------------------------------------------------------


def ewens_weights(n: int, theta: float, limit: int | None = None) -> Weights:
    """P(s) = theta^(#s - 1) / prod_{i<n}(theta + i), computed in log space."""
    words = all_words(n, limit)
    if theta == 0:
        p = 1.0 / math.factorial(n - 1)
        return {w: p for w in words if num_cycles(w) == 1}
    log_norm = math.fsum(math.log(theta + i) for i in range(1, n))
    log_theta = math.log(theta)
    by_count = {c: math.exp((c - 1) * log_theta - log_norm) for c in range(1, n + 1)}
    return {w: by_count[num_cycles(w)] for w in words}


def class_weights(parts: Sequence[int], limit: int | None = None) -> Weights:
    parts = check_cycle_type(parts)
    members = [w for w in all_words(sum(parts), limit) if cycle_type(w) == parts]
    p = 1.0 / len(members)
    return {w: p for w in members}


def t_kernel(s: Sequence[int]) -> Weights:
    """Exact law of T(s): every representative choice and every cyclic pi."""
    cycles = cycle_decomposition(s).cycles
    c = len(cycles)
    if c == 1:
        return {tuple(s): 1.0}
    pis = [p for p in itertools.permutations(range(1, c + 1)) if num_cycles(p) == 1]
    weight = 1.0 / (math.prod(len(cyc) for cyc in cycles) * len(pis))
    out: dict[Word, list[float]] = defaultdict(list)
    for reps in itertools.product(*cycles):
        for pi in pis:
            out[tuple(star_cycle_product(s, reps, pi))].append(weight)
    return {w: math.fsum(ps) for w, ps in out.items()}


def pushforward_t(weights: Mapping[Word, float]) -> Weights:
    acc: dict[Word, list[float]] = defaultdict(list)
    for s, p in weights.items():
        if p == 0:
            continue
        for rho, q in t_kernel(s).items():
            acc[rho].append(p * q)
    return {w: math.fsum(ps) for w, ps in acc.items()}


def law_weights(law: Law | str | Mapping[Word, float], n: int, limit: int | None = None) -> Weights:
    """Exact probability of every permutation of size n under an enumerable law."""
    if isinstance(law, Mapping):
        return {tuple(w): float(p) for w, p in law.items()}
    if isinstance(law, str):
        law = parse_law(law)
    check_limit(n, limit)
    if law.kind == "uniform":
        return ewens_weights(n, 1.0, limit)
    if law.kind == "cyclic":
        return ewens_weights(n, 0.0, limit)
    if law.kind == "ewens":
        return ewens_weights(n, law.theta, limit)
    if law.kind == "class":
        return class_weights(check_cycle_type(law.cycle_type, n), limit)
    if law.kind == "mixture":
        mp = MixtureParams(law.x, law.c, n)
        rare = class_weights(mp.rare_cycle_type, limit)
        common = ewens_weights(n, 0.0, limit)
        q = mp.rare_prob
        out: dict[Word, list[float]] = defaultdict(list)
        for w, p in rare.items():
            out[w].append(q * p)
        for w, p in common.items():
            out[w].append((1 - q) * p)
        return {w: math.fsum(ps) for w, ps in out.items()}
    if law.kind == "T":
        return pushforward_t(law_weights(law.inner, n, limit))
    raise ValueError(f"law {law} is not enumerable")


def total_variation(p: Mapping[Word, float], q: Mapping[Word, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * math.fsum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


# --- exact distributions ---------------------------------------------------


@dataclass(frozen=True)
class ExactDistribution:
    support: tuple
    probs: tuple[float, ...]
    weighting: str

    def prob(self, value) -> float:
        try:
            return self.probs[self.support.index(value)]
        except ValueError:
            return 0.0

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.probs))

    def tail(self, threshold: float, direction: str = ">=") -> float:
        if direction in (">=", "ge"):
            sel = [p for v, p in zip(self.support, self.probs) if v >= threshold]
        elif direction in ("<=", "le"):
            sel = [p for v, p in zip(self.support, self.probs) if v <= threshold]
        else:
            raise ValueError(f"direction must be >= or <=, got {direction!r}")
        return math.fsum(sel)


def distribution_of(
    values: Callable[[Word], object], weights: Mapping[Word, float], label: str = ""
) -> ExactDistribution:
    acc: dict[object, list[float]] = defaultdict(list)
    for w, p in weights.items():
        if p > 0:
            acc[values(w)].append(p)
    support = tuple(sorted(acc))
    return ExactDistribution(support, tuple(math.fsum(acc[v]) for v in support), label)


def exact_distribution(
    stat: StatisticId | str,
    law: EwensParams | Law | str | Mapping[Word, float],
    n: int | None = None,
    limit: int | None = None,
) -> ExactDistribution:
    """Exact law of a statistic under Ewens(theta, n) or another enumerable law."""
    stat = as_statistic(stat)
    if isinstance(law, EwensParams) and law.theta == 1:
        # uniform: integer counts over n!, so probabilities are correctly rounded
        counts = Counter(evaluate(stat, w) for w in all_words(law.n, limit))
        total = math.factorial(law.n)
        support = tuple(sorted(counts))
        return ExactDistribution(support, tuple(counts[v] / total for v in support), "ewens:1")
    if isinstance(law, EwensParams):
        weights = ewens_weights(law.n, law.theta, limit)
        label = f"ewens:{law.theta:g}"
    else:
        if n is None:
            raise ValueError("n is required for a non-Ewens law")
        weights = law_weights(law, n, limit)
        label = str(law) if not isinstance(law, Mapping) else "custom"
    return distribution_of(lambda w: evaluate(stat, w), weights, label)


def exact_tail(
    stat: StatisticId | str,
    law: EwensParams | Law | str,
    threshold: float,
    direction: str = ">=",
    n: int | None = None,
    limit: int | None = None,
) -> float:
    return exact_distribution(stat, law, n, limit).tail(threshold, direction)


def bernoulli_convolution(theta: float, n: int) -> np.ndarray:
    """pmf over 0..n of a sum of independent Bernoulli(theta/(i+theta-1))."""
    pmf = np.zeros(n + 1)
    pmf[0] = 1.0
    for p in bernoulli_probs(theta, n):
        pmf[1:] = pmf[1:] * (1 - p) + pmf[:-1] * p
        pmf[0] *= 1 - p
    return pmf


def eulerian_numbers(n: int) -> list[int]:
    """A(n, k) for k = 0..n-1 by the triangle recurrence."""
    row = [1]
    for m in range(2, n + 1):
        new = [0] * m
        for k in range(m):
            left = row[k - 1] if 0 <= k - 1 < len(row) else 0
            same = row[k] if k < len(row) else 0
            new[k] = (k + 1) * same + (m - k) * left
        row = new
    return row


# --- reports ---------------------------------------------------------------


def verify_coupling(source: Law | str | Mapping[Word, float], n: int, limit: int = 6) -> VerificationReport:
    """TV distance between T(source) and the uniform law on n-cycles."""
    if n > limit:
        raise LimitExceeded(f"coupling check limited to n <= {limit}")
    pushed = pushforward_t(law_weights(source, n))
    target = ewens_weights(n, 0.0)
    tv = total_variation(pushed, target)
    name = str(source) if not isinstance(source, Mapping) else "point-mass"
    return VerificationReport("coupling", n, tv, TOL, f"source={name}")


def verify_kernel_support(n: int, limit: int = 6) -> VerificationReport:
    """T(s) is uniform on the enumerated set A_s for every s in S_n."""
    if n > limit:
        raise LimitExceeded(f"kernel check limited to n <= {limit}")
    worst = 0.0
    for w in all_words(n):
        kern = t_kernel(w)
        targets = merge_targets(w)
        if set(kern) != set(targets):
            worst = max(worst, 1.0)
            continue
        u = 1.0 / len(targets)
        worst = max(worst, max(abs(p - u) for p in kern.values()))
    return VerificationReport("kernel", n, worst, TOL, "T(s) uniform on A_s")


def verify_bernoulli_cycles(theta: float, n: int, limit: int = 8) -> VerificationReport:
    if n > limit:
        raise LimitExceeded(f"cycle-count check limited to n <= {limit}")
    dist = exact_distribution("cycles", EwensParams(theta, n)).as_dict()
    pmf = bernoulli_convolution(theta, n)
    gap = max(abs(dist.get(k, 0.0) - pmf[k]) for k in range(n + 1))
    return VerificationReport("bernoulli", n, gap, TOL, f"theta={theta:g}")


@lru_cache(maxsize=None)
def _cyclic_words(c: int) -> tuple[Word, ...]:
    return tuple(w for w in itertools.permutations(range(1, c + 1)) if num_cycles(w) == 1)


@lru_cache(maxsize=None)
def _twisted_lis_pmfs(c: int) -> dict[Word, tuple[float, ...]]:
    """For every tau in S_c, the pmf of lis(tau o C) with C uniform cyclic."""
    cyc = _cyclic_words(c)
    out = {}
    for tau in itertools.permutations(range(1, c + 1)):
        counts = [0] * (c + 1)
        for w in cyc:
            counts[lis(_compose(tau, w))] += 1
        out[tau] = tuple(x / len(cyc) for x in counts)
    return out


def merge_lis_sides(s: Sequence[int], k_max: int) -> list[tuple[int, float, float]]:
    """(k, P(lis(T s) <= lis(s) + k), min_tau P(lis(tau o C) < k)) for k = 0..k_max."""
    c = num_cycles(s)
    if c > 6:
        raise LimitExceeded("merge-lis check needs #cycles <= 6")
    base = lis(s)
    lis_law: dict[int, list[float]] = defaultdict(list)
    for rho, p in t_kernel(s).items():
        lis_law[lis(rho)].append(p)
    pmfs = _twisted_lis_pmfs(c)
    rows = []
    for k in range(k_max + 1):
        left = math.fsum(p for v, ps in lis_law.items() if v <= base + k for p in ps)
        right = min(math.fsum(pmf[:k]) if k > 0 else 0.0 for pmf in pmfs.values())
        rows.append((k, left, right))
    return rows


def verify_merge_lis(s: Sequence[int], k_max: int) -> VerificationReport:
    rows = merge_lis_sides(s, k_max)
    violation = max(max(right - left for _, left, right in rows), 0.0)
    return VerificationReport(
        "merge-lis", len(s), violation, TOL, f"s={list(s)} k<= {k_max}"
    )


def verify_twisted_lis(k: int, x_factor: float, limit: int = 6) -> VerificationReport:
    """Check P(lis(tau o C) >= x sqrt k) <= k P(lis(U) >= x sqrt k) for all tau."""
    if k > limit:
        raise LimitExceeded(f"twisted-lis check limited to k <= {limit}")
    thr = x_factor * math.sqrt(k)
    unif = [0] * (k + 1)
    for w in itertools.permutations(range(1, k + 1)):
        unif[lis(w)] += 1
    unif_ge = math.fsum(cnt for v, cnt in enumerate(unif) if v >= thr) / math.factorial(k)
    worst = 0.0
    min_below = 1.0
    for pmf in _twisted_lis_pmfs(k).values():
        ge = math.fsum(p for v, p in enumerate(pmf) if v >= thr)
        worst = max(worst, ge - k * unif_ge)
        min_below = min(min_below, 1.0 - ge)
    return VerificationReport(
        "twisted-lis", k, max(worst, 0.0), TOL, f"x={x_factor:g} min_tau P(lis<x sqrt k)={min_below:.12g}"
    )


def min_twisted_below(k: int, x_factor: float) -> float:
    """min over tau in S_k of P(lis(tau o C) < x sqrt k)."""
    thr = x_factor * math.sqrt(k)
    return min(
        math.fsum(p for v, p in enumerate(pmf) if v < thr) for pmf in _twisted_lis_pmfs(k).values()
    )


# k disjoint increasing subsequences ------------------------------------------


def max_k_chains(w: Sequence[int], k_max: int) -> list[int]:
    """Max total size of j disjoint increasing subsequences, j = 1..k_max.

    Successive longest augmenting paths in the unit-capacity flow network of
    the position poset (node-split, each position worth 1); the flow after j
    augmentations is optimal for j chains.
    """
    n = len(w)
    src, snk = 2 * n, 2 * n + 1
    to: list[int] = []
    cap: list[int] = []
    cost: list[int] = []
    adj: list[list[int]] = [[] for _ in range(2 * n + 2)]

    def add(u: int, v: int, c: int) -> None:
        adj[u].append(len(to)); to.append(v); cap.append(1); cost.append(c)
        adj[v].append(len(to)); to.append(u); cap.append(0); cost.append(-c)

    for u in range(n):
        add(src, 2 * u, 0)
        add(2 * u, 2 * u + 1, -1)
        add(2 * u + 1, snk, 0)
        for v in range(u + 1, n):
            if w[u] < w[v]:
                add(2 * u + 1, 2 * v, 0)

    total = 0
    out = []
    nodes = 2 * n + 2
    for _ in range(k_max):
        dist = [math.inf] * nodes
        prev = [-1] * nodes
        dist[src] = 0
        for _ in range(nodes - 1):
            changed = False
            for u in range(nodes):
                du = dist[u]
                if du == math.inf:
                    continue
                for e in adj[u]:
                    if cap[e] > 0 and du + cost[e] < dist[to[e]]:
                        dist[to[e]] = du + cost[e]
                        prev[to[e]] = e
                        changed = True
            if not changed:
                break
        if dist[snk] >= 0:
            out.append(total)
            continue
        v = snk
        while v != src:
            e = prev[v]
            cap[e] -= 1
            cap[e ^ 1] += 1
            v = to[e ^ 1]
        total -= dist[snk]
        out.append(total)
    return out


def max_k_chains_bruteforce(w: Sequence[int], k_max: int) -> list[int]:
    """Same quantity by labelling every position with a chain or 'unused'."""
    n = len(w)
    if n > 7:
        raise LimitExceeded("brute-force chain search limited to n <= 7")
    out = []
    for k in range(1, k_max + 1):
        best = 0
        for labels in itertools.product(range(k + 1), repeat=n):
            last = [0] * (k + 1)
            ok = True
            size = 0
            for pos, lab in enumerate(labels):
                if lab == 0:
                    continue
                if w[pos] < last[lab]:
                    ok = False
                    break
                last[lab] = w[pos]
                size += 1
            if ok and size > best:
                best = size
        out.append(best)
    return out


def verify_greene(n: int, d_max: int, limit: int = 8) -> VerificationReport:
    if n > limit:
        raise LimitExceeded(f"Greene check limited to n <= {limit}")
    mismatches = 0
    for w in all_words(n):
        if list(rsk_prefix_sums(w, d_max)) != max_k_chains(w, d_max):
            mismatches += 1
    return VerificationReport("greene", n, float(mismatches), 0.0, f"d<={d_max}")


def verify_rsk_edges(n: int) -> VerificationReport:
    """lis is the first row length and lds the number of rows."""
    bad = 0
    for w in all_words(n):
        shape = rsk_shape(w)
        bad += shape[0] != lis(w) or len(shape) != lds(w)
    return VerificationReport("rsk-edges", n, float(bad), 0.0)


def verify_eulerian(n: int, limit: int = 8) -> VerificationReport:
    """Descents, ascents and exceedances share one law under the uniform law."""
    if n > limit:
        raise LimitExceeded(f"Eulerian check limited to n <= {limit}")
    uni = EwensParams(1.0, n)
    dists = [exact_distribution(s, uni).as_dict() for s in ("descents", "ascents", "exceedances")]
    keys = set().union(*dists)
    gap = max(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys for a in dists for b in dists)
    return VerificationReport("eulerian", n, gap, 0.0)


def las_dp(w: Sequence[int]) -> int:
    """Longest subsequence w(i1) > w(i2) < w(i3) > ... by O(n^2) dynamic programming."""
    n = len(w)
    # odd[i] / even[i]: longest such subsequence ending at i with odd / even
    # length; even lengths end on a descent, odd lengths >= 3 on an ascent
    odd = [1] * n
    even = [0] * n
    for i in range(n):
        for j in range(i):
            if w[j] > w[i]:
                even[i] = max(even[i], odd[j] + 1)
            elif even[j]:
                odd[i] = max(odd[i], even[j] + 1)
    return max(odd + even)


def verify_las(n: int) -> VerificationReport:
    bad = sum(las(w) != las_dp(w) for w in all_words(n))
    return VerificationReport("las", n, float(bad), 0.0)


def verify_h1_from_h1prime(
    stat: StatisticId | str, n: int, constant: float | None = None, limit: int = 6
) -> VerificationReport:
    """|f(s) - f(rho)| <= C #(s) for every rho in A_s, C the transposition sup."""
    stat = as_statistic(stat)
    if n > limit:
        raise LimitExceeded(f"H1 check limited to n <= {limit}")
    if constant is None:
        constant = lipschitz_sup(stat, n).sup_delta
    values = {w: evaluate(stat, w) for w in all_words(n)}
    worst = 0.0
    for w, fw in values.items():
        c = num_cycles(w)
        for rho in merge_targets(w):
            worst = max(worst, distance(fw, values[tuple(rho)]) - constant * c)
    return VerificationReport(
        "h1", n, max(worst, 0.0), TOL, f"stat={stat} constant={constant:g}"
    )


def verify_lipschitz(n: int, stats: Iterable[StatisticId] = CATALOGUE) -> list[VerificationReport]:
    reports = []
    for stat in stats:
        cert = lipschitz_sup(stat, n)
        bound = proof_bound(stat, n)
        excess = 0.0 if bound is None else max(cert.sup_delta - bound, 0.0)
        if not math.isfinite(cert.sup_delta):
            excess = math.inf
        reports.append(
            VerificationReport(
                "lipschitz", n, excess, 0.0,
                f"stat={stat} sup={cert.sup_delta:g} bound={bound}",
            )
        )
    return reports


# --- named suites (used by the CLI) -----------------------------------------

COUPLING_LAWS = ("uniform", "ewens:0.5", "ewens:2")
COUPLING_CLASSES = ((2, 1, 1), (2, 2), (3, 1))


def negative_control_law(n: int) -> dict[Word, float]:
    """Point mass on the transposition (1 2): not conjugacy invariant."""
    w = list(range(1, n + 1))
    w[0], w[1] = 2, 1
    return {tuple(w): 1.0}


def padded(parts: Sequence[int], n: int) -> tuple[int, ...]:
    return tuple(parts) + (1,) * (n - sum(parts))


def suite_coupling(n_max: int) -> list[VerificationReport]:
    out = []
    for n in range(2, min(n_max, 6) + 1):
        for spec in COUPLING_LAWS:
            out.append(verify_coupling(spec, n))
        for parts in COUPLING_CLASSES:
            if sum(parts) <= n:
                out.append(verify_coupling("class:" + ",".join(map(str, padded(parts, n))), n))
    return out


def suite_negative_control(n_max: int) -> list[VerificationReport]:
    n = min(max(n_max, 3), 6)
    rep = verify_coupling(negative_control_law(n), n)
    rep.check_name = "coupling-negative-control"
    return [rep]


def suite_bernoulli(n_max: int) -> list[VerificationReport]:
    return [
        verify_bernoulli_cycles(theta, n)
        for theta in (0.0, 0.5, 1.0, 2.0, 5.0)
        for n in range(1, min(n_max, 8) + 1)
    ]


def suite_merge_lis(n_max: int) -> list[VerificationReport]:
    n = min(n_max, 6)
    return [verify_merge_lis(w, n) for w in all_words(n)]


def suite_twisted_lis(n_max: int) -> list[VerificationReport]:
    return [
        verify_twisted_lis(k, x)
        for k in range(2, min(n_max, 6) + 1)
        for x in (1.0, 1.5, 2.0)
    ]


def suite_greene(n_max: int) -> list[VerificationReport]:
    return [verify_greene(n, 3) for n in range(1, min(n_max, 8) + 1)] + [
        verify_rsk_edges(n) for n in range(1, min(n_max, 8) + 1)
    ]


def suite_eulerian(n_max: int) -> list[VerificationReport]:
    return [verify_eulerian(n) for n in range(1, min(n_max, 8) + 1)]


def suite_las(n_max: int) -> list[VerificationReport]:
    return [verify_las(n) for n in range(1, min(n_max, 8) + 1)]


def suite_h1(n_max: int) -> list[VerificationReport]:
    return [
        verify_h1_from_h1prime(stat, n)
        for stat in ("lis", "lds", "descents")
        for n in range(2, min(n_max, 6) + 1)
    ]


def suite_lipschitz(n_max: int) -> list[VerificationReport]:
    return verify_lipschitz(min(n_max, 7))


def suite_kernel(n_max: int) -> list[VerificationReport]:
    return [verify_kernel_support(n) for n in range(1, min(n_max, 5) + 1)]


SUITES: dict[str, Callable[[int], list[VerificationReport]]] = {
    "coupling": suite_coupling,
    "kernel": suite_kernel,
    "bernoulli": suite_bernoulli,
    "merge-lis": suite_merge_lis,
    "twisted-lis": suite_twisted_lis,
    "greene": suite_greene,
    "eulerian": suite_eulerian,
    "las": suite_las,
    "h1": suite_h1,
    "lipschitz": suite_lipschitz,
}

# reports from these suites are expected to fail
EXPECTED_FAILURES: dict[str, Callable[[int], list[VerificationReport]]] = {
    "coupling": suite_negative_control,
}
