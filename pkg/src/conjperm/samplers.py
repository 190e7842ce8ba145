"""Random permutation laws, the cycle-merging operator T and law specs.

Scalar samplers take a ``numpy.random.Generator`` and return a
:class:`~conjperm.perm.Permutation`.  Batch samplers return an int array of
shape ``(size, n)`` holding 1-based words; they are used by the Monte Carlo
engine.  Randomness comes from :func:`make_rng`, which maps a 64-bit seed and
a substream index to an independent PCG64 stream.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from conjperm.errors import InvalidCycleType
from conjperm.perm import Permutation, compose, cycle_decomposition, from_cycles

# below this the rare branch of the mixture law is dropped
MIN_BRANCH_PROB = 1e-300


@dataclass(frozen=True)
class RngSeed:
    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return make_rng(self.seed, self.stream)


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    if stream < 0:
        raise ValueError("stream index must be non-negative")
    ss = np.random.SeedSequence(entropy=seed & 0xFFFFFFFFFFFFFFFF, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(ss))


# --- shuffles driven by an explicit pick sequence -------------------------
# picks[k] is the index drawn at step k, so the exact pushforward of a
# shuffle can be computed by enumerating pick sequences.


def fisher_yates(n: int, picks: Sequence[int]) -> Permutation:
    """Shuffle of 1..n; step k (i = n-1..1) swaps i with picks[k] in [0, i]."""
    w = list(range(1, n + 1))
    for k, i in enumerate(range(n - 1, 0, -1)):
        j = picks[k]
        w[i], w[j] = w[j], w[i]
    return Permutation._trusted(w)


def sattolo(n: int, picks: Sequence[int]) -> Permutation:
    """Sattolo's variant: picks[k] lies in [0, i), producing one n-cycle."""
    w = list(range(1, n + 1))
    for k, i in enumerate(range(n - 1, 0, -1)):
        j = picks[k]
        w[i], w[j] = w[j], w[i]
    return Permutation._trusted(w)


def _picks(n: int, rng: np.random.Generator, cyclic: bool) -> np.ndarray:
    highs = np.arange(n - 1, 0, -1)
    if not cyclic:
        highs = highs + 1
    if len(highs) == 0:
        return np.empty(0, dtype=np.int64)
    return rng.integers(0, highs)


def sample_uniform(n: int, rng: np.random.Generator) -> Permutation:
    return fisher_yates(n, _picks(n, rng, cyclic=False).tolist())


def sample_cyclic(n: int, rng: np.random.Generator) -> Permutation:
    return sattolo(n, _picks(n, rng, cyclic=True).tolist())


@dataclass(frozen=True)
class EwensParams:
    theta: float
    n: int

    def __post_init__(self):
        if self.theta < 0:
            raise ValueError("theta must be non-negative")
        if self.n < 1:
            raise ValueError("n must be >= 1")


def sample_ewens(p: EwensParams, rng: np.random.Generator) -> Permutation:
    """Chinese-restaurant construction.

    Point i opens a new cycle with probability theta/(theta+i-1), otherwise it
    is inserted right after a uniformly chosen earlier point.
    """
    if p.theta == 0:
        return sample_cyclic(p.n, rng)
    n, theta = p.n, p.theta
    w = [0] * n
    w[0] = 1
    if n == 1:
        return Permutation._trusted(w)
    u = rng.random(n)
    for i in range(2, n + 1):
        if u[i - 1] < theta / (theta + i - 1):
            w[i - 1] = i
        else:
            j = int(rng.integers(1, i))
            w[i - 1] = w[j - 1]
            w[j - 1] = i
    return Permutation._trusted(w)


def check_cycle_type(cycle_type: Sequence[int], n: int | None = None) -> tuple[int, ...]:
    parts = tuple(sorted((int(c) for c in cycle_type), reverse=True))
    if not parts or any(c < 1 for c in parts):
        raise InvalidCycleType(f"bad cycle type {cycle_type}")
    if n is not None and sum(parts) != n:
        raise InvalidCycleType(f"cycle type {cycle_type} does not sum to {n}")
    return parts


def sample_conjugacy_class(cycle_type: Sequence[int], rng: np.random.Generator) -> Permutation:
    """Uniform element of the class: shuffle the points, then cut into cycles."""
    parts = check_cycle_type(cycle_type)
    n = sum(parts)
    order = sample_uniform(n, rng)
    cycles = []
    pos = 0
    for length in parts:
        cycles.append(order[pos:pos + length])
        pos += length
    return from_cycles(cycles, n)


def star_cycle_product(s: Sequence[int], reps: Sequence[int], pi: Sequence[int]) -> Permutation:
    """``s o (j_1, j_pi(1), j_pi^2(1), ...)`` with pi a cyclic permutation of [c]."""
    c = len(reps)
    order = [1]
    for _ in range(c - 1):
        order.append(pi[order[-1] - 1])
    cyc = [reps[k - 1] for k in order]
    return compose(s, from_cycles([cyc], len(s)))


def apply_t(s: Sequence[int], rng: np.random.Generator) -> Permutation:
    """One step of the merging kernel T: a uniform element of A_s.

    One representative is drawn uniformly from each cycle (canonical cycle
    order), a uniform cyclic pi orders them, and s is multiplied on the right
    by the resulting cycle through the representatives.
    """
    cycles = cycle_decomposition(s).cycles
    if len(cycles) == 1:
        return Permutation._trusted(s)
    reps = [cyc[int(rng.integers(len(cyc)))] for cyc in cycles]
    pi = sample_cyclic(len(cycles), rng)
    return star_cycle_product(s, reps, pi)


@dataclass(frozen=True)
class MixtureParams:
    x: float
    c: float
    n: int

    @property
    def fixed_points(self) -> int:
        return math.floor(self.x * math.sqrt(self.n))

    def __post_init__(self):
        if self.x <= 0 or self.c < 0:
            raise ValueError("mixture needs x > 0 and c >= 0")
        if self.fixed_points > self.n - 2:
            raise ValueError(f"floor(x sqrt(n)) = {self.fixed_points} exceeds n - 2")

    @property
    def rare_log_prob(self) -> float:
        return -self.c * math.sqrt(self.n)

    @property
    def rare_prob(self) -> float:
        lp = self.rare_log_prob
        return 0.0 if lp < math.log(MIN_BRANCH_PROB) else math.exp(lp)

    @property
    def rare_cycle_type(self) -> tuple[int, ...]:
        m = self.fixed_points
        return (self.n - m,) + (1,) * m


def sample_mixture(p: MixtureParams, rng: np.random.Generator) -> Permutation:
    """Rare branch (prob e^{-c sqrt n}): floor(x sqrt n) fixed points plus one
    cycle on the rest; otherwise uniform cyclic."""
    if rng.random() < p.rare_prob:
        return sample_conjugacy_class(p.rare_cycle_type, rng)
    return sample_cyclic(p.n, rng)


def bernoulli_probs(theta: float, n: int) -> np.ndarray:
    """P(a_i = 1) = theta / (i + theta - 1), with a_1 = 1."""
    i = np.arange(1, n + 1, dtype=float)
    if theta == 0:
        probs = np.zeros(n)
        probs[0] = 1.0
        return probs
    return theta / (i + theta - 1)


def sample_bernoulli_cycle_count(p: EwensParams, rng: np.random.Generator) -> int:
    return int(np.count_nonzero(rng.random(p.n) < bernoulli_probs(p.theta, p.n)))


# --- batch samplers --------------------------------------------------------


def batch_uniform(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    base = np.broadcast_to(np.arange(1, n + 1), (size, n))
    return rng.permuted(base, axis=1)


def batch_cyclic(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    w = np.tile(np.arange(1, n + 1), (size, 1))
    rows = np.arange(size)
    for i in range(n - 1, 0, -1):
        j = rng.integers(0, i, size)
        wi = w[:, i].copy()
        w[:, i] = w[rows, j]
        w[rows, j] = wi
    return w


def batch_ewens(theta: float, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    if theta == 0:
        return batch_cyclic(n, size, rng)
    w = np.zeros((size, n), dtype=np.int64)
    w[:, 0] = 1
    rows = np.arange(size)
    for i in range(2, n + 1):
        new = rng.random(size) < theta / (theta + i - 1)
        j = rng.integers(0, i - 1, size)
        w[:, i - 1] = np.where(new, i, w[rows, j])
        ins = ~new
        w[rows[ins], j[ins]] = i
    return w


# --- law specifications ----------------------------------------------------


@dataclass(frozen=True)
class Law:
    """A random permutation law parsed from a spec string."""

    kind: str
    theta: float | None = None
    cycle_type: tuple[int, ...] | None = None
    x: float | None = None
    c: float | None = None
    inner: Law | None = field(default=None)

    def sample(self, n: int, rng: np.random.Generator) -> Permutation:
        if self.kind == "uniform":
            return sample_uniform(n, rng)
        if self.kind == "cyclic":
            return sample_cyclic(n, rng)
        if self.kind == "ewens":
            return sample_ewens(EwensParams(self.theta, n), rng)
        if self.kind == "class":
            return sample_conjugacy_class(check_cycle_type(self.cycle_type, n), rng)
        if self.kind == "mixture":
            return sample_mixture(MixtureParams(self.x, self.c, n), rng)
        if self.kind == "T":
            return apply_t(self.inner.sample(n, rng), rng)
        raise ValueError(f"unknown law {self.kind}")

    def sample_batch(self, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "uniform":
            return batch_uniform(n, size, rng)
        if self.kind == "cyclic":
            return batch_cyclic(n, size, rng)
        if self.kind == "ewens":
            return batch_ewens(self.theta, n, size, rng)
        out = np.empty((size, n), dtype=np.int64)
        for k in range(size):
            out[k] = self.sample(n, rng)
        return out

    def __str__(self) -> str:
        if self.kind == "ewens":
            return f"ewens:{self.theta:g}"
        if self.kind == "class":
            return "class:" + ",".join(map(str, self.cycle_type))
        if self.kind == "mixture":
            return f"mixture:{self.x:g},{self.c:g}"
        if self.kind == "T":
            return f"T({self.inner})"
        return self.kind


_T_RE = re.compile(r"^T\((.*)\)$", re.IGNORECASE)


def parse_law(spec: str) -> Law:
    """Parse ``uniform``, ``cyclic``, ``ewens:<theta>``, ``class:<parts>``,
    ``mixture:<x>,<c>`` or ``T(<inner>)``."""
    spec = spec.strip()
    m = _T_RE.match(spec)
    if m:
        return Law("T", inner=parse_law(m.group(1)))
    name, _, arg = spec.partition(":")
    name = name.lower()
    try:
        if name in ("uniform", "cyclic") and not arg:
            return Law(name)
        if name == "ewens":
            theta = float(arg)
            if theta < 0:
                raise ValueError
            return Law("ewens", theta=theta)
        if name == "class":
            return Law("class", cycle_type=check_cycle_type([int(p) for p in arg.split(",")]))
        if name == "mixture":
            x, c = (float(v) for v in arg.split(","))
            return Law("mixture", x=x, c=c)
    except (ValueError, InvalidCycleType):
        pass
    raise ValueError(f"invalid law spec {spec!r}")

