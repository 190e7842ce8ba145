"""Permutation statistics and exhaustive Lipschitz certificates.

Every statistic takes a one-line word (any sequence of the distinct values
1..n, including :class:`~conjperm.perm.Permutation`) and returns an int,
a float for the normalized variants, or a tuple for RSK row prefix sums.
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Callable, Sequence, Union

from conjperm.errors import UnknownStatistic, check_limit
from conjperm.perm import num_cycles

StatValue = Union[int, float, tuple]


def lis(w: Sequence[int]) -> int:
    """Longest increasing subsequence by patience sorting, O(n log n)."""
    piles: list[int] = []
    for v in w:
        k = bisect_left(piles, v)
        if k == len(piles):
            piles.append(v)
        else:
            piles[k] = v
    return len(piles)


def lds(w: Sequence[int]) -> int:
    n = len(w)
    return lis([n + 1 - v for v in w])


def rsk_shape(w: Sequence[int]) -> list[int]:
    """Full shape of the RSK insertion tableau (row lengths, non-increasing)."""
    rows: list[list[int]] = []
    for v in w:
        x = v
        for row in rows:
            k = bisect_left(row, x)
            if k == len(row):
                row.append(x)
                break
            row[k], x = x, row[k]
        else:
            rows.append([x])
    return [len(r) for r in rows]


def rsk_rows(w: Sequence[int], d: int) -> list[int]:
    """First d row lengths of the RSK shape, zero-padded."""
    if d < 1:
        raise ValueError("d must be >= 1")
    shape = rsk_shape(w)
    return (shape + [0] * d)[:d]


def rsk_prefix_sums(w: Sequence[int], d: int) -> tuple[int, ...]:
    return tuple(itertools.accumulate(rsk_rows(w, d)))


def inversions(w: Sequence[int]) -> int:
    """Inversion count with a Fenwick tree over values."""
    n = len(w)
    tree = [0] * (n + 1)
    inv = 0
    for seen, v in enumerate(w):
        # number of earlier values <= v
        le = 0
        i = v
        while i > 0:
            le += tree[i]
            i -= i & -i
        inv += seen - le
        i = v
        while i <= n:
            tree[i] += 1
            i += i & -i
    return inv


def descents(w: Sequence[int]) -> int:
    return sum(1 for a, b in zip(w, w[1:]) if a > b)


def ascents(w: Sequence[int]) -> int:
    return sum(1 for a, b in zip(w, w[1:]) if a < b)


def peaks(w: Sequence[int]) -> int:
    return sum(1 for a, b, c in zip(w, w[1:], w[2:]) if a < b > c)


def valleys(w: Sequence[int]) -> int:
    return sum(1 for a, b, c in zip(w, w[1:], w[2:]) if a > b < c)


def exceedances(w: Sequence[int]) -> int:
    return sum(1 for i, v in enumerate(w, start=1) if v > i)


def major_index(w: Sequence[int], ascent_convention: bool = False) -> int:
    """Sum of descent positions i (w(i) > w(i+1)).

    With ``ascent_convention=True`` sums the ascent positions instead, which is
    the literal form of the normalized major index in the large-deviation
    literature this package follows.
    """
    if ascent_convention:
        return sum(i for i, (a, b) in enumerate(zip(w, w[1:]), start=1) if a < b)
    return sum(i for i, (a, b) in enumerate(zip(w, w[1:]), start=1) if a > b)


def las(w: Sequence[int]) -> int:
    """Longest alternating subsequence, 1 + M_1 + peaks + valleys.

    M_1 rewards an initial descent, so this equals the longest subsequence of
    the form w(i1) > w(i2) < w(i3) > ...
    """
    n = len(w)
    if n == 1:
        return 1
    return 1 + (w[0] > w[1]) + peaks(w) + valleys(w)


@dataclass(frozen=True)
class StatisticId:
    """A statistic name; ``rows`` is the row count d for ``rsk``."""

    tag: str
    rows: int | None = None

    def __post_init__(self):
        if self.tag not in _SCALAR and self.tag != "rsk":
            raise UnknownStatistic(self.tag)
        if self.tag == "rsk" and (self.rows is None or self.rows < 1):
            raise UnknownStatistic("rsk needs a row count d >= 1")

    @classmethod
    def parse(cls, text: str) -> StatisticId:
        text = text.strip().lower()
        if text == "rsk":
            return cls("rsk", 1)
        if text.startswith("rsk:"):
            try:
                return cls("rsk", int(text[4:]))
            except ValueError:
                raise UnknownStatistic(text) from None
        return cls(text)

    @property
    def is_vector(self) -> bool:
        return self.tag == "rsk"

    def __str__(self) -> str:
        return f"rsk:{self.rows}" if self.tag == "rsk" else self.tag


_SCALAR: dict[str, Callable[[Sequence[int]], StatValue]] = {
    "lis": lis,
    "lds": lds,
    "inv": inversions,
    "inv-norm": lambda w: inversions(w) / len(w),
    "descents": descents,
    "ascents": ascents,
    "peaks": peaks,
    "valleys": valleys,
    "exceedances": exceedances,
    "maj": major_index,
    "maj-norm": lambda w: major_index(w) / len(w),
    "maj-paper": lambda w: major_index(w, ascent_convention=True),
    "maj-paper-norm": lambda w: major_index(w, ascent_convention=True) / len(w),
    "las": las,
    # cycle count; not a word statistic but handy for oracle and diagnostics
    "cycles": num_cycles,
}

# The thirteen statistics with a bounded-transposition-effect claim.
CATALOGUE = tuple(
    StatisticId.parse(s)
    for s in (
        "lis", "lds", "rsk:3", "inv", "inv-norm", "descents", "ascents",
        "peaks", "valleys", "exceedances", "maj", "maj-norm", "las",
    )
)


def as_statistic(stat: StatisticId | str) -> StatisticId:
    return stat if isinstance(stat, StatisticId) else StatisticId.parse(stat)


def evaluate(stat: StatisticId | str, w: Sequence[int]) -> StatValue:
    stat = as_statistic(stat)
    if stat.tag == "rsk":
        return rsk_prefix_sums(w, stat.rows)
    return _SCALAR[stat.tag](w)


def distance(a: StatValue, b: StatValue) -> float:
    """Euclidean distance between two statistic values."""
    if isinstance(a, tuple):
        return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))
    return abs(a - b)


def proof_bound(stat: StatisticId | str, n: int) -> float | None:
    """Explicit transposition bound from the bounded-difference argument, if any."""
    stat = as_statistic(stat)
    return {
        "inv": 2 * n,
        "inv-norm": 2,
        "descents": 4,
        "ascents": 4,
        "maj": 4 * n,
        "maj-norm": 4,
    }.get(stat.tag)


@dataclass(frozen=True)
class LipschitzCertificate:
    statistic: StatisticId
    n: int
    sup_delta: float
    witness: tuple[tuple[int, ...], tuple[int, int]] | None = None

    @property
    def bound(self) -> float | None:
        return proof_bound(self.statistic, self.n)

    @property
    def within_bound(self) -> bool:
        b = self.bound
        return b is None or self.sup_delta <= b


def lipschitz_sup(stat: StatisticId | str, n: int, limit: int | None = None) -> LipschitzCertificate:
    """Exact max of |f(s) - f(s o (i,j))| over all s in S_n and all i < j."""
    stat = as_statistic(stat)
    check_limit(n, limit)
    words = list(itertools.permutations(range(1, n + 1)))
    values = {w: evaluate(stat, w) for w in words}
    best = 0.0
    witness = None
    pairs = list(itertools.combinations(range(n), 2))
    for w in words:
        fw = values[w]
        lst = list(w)
        for i, j in pairs:
            lst[i], lst[j] = lst[j], lst[i]
            delta = distance(fw, values[tuple(lst)])
            lst[i], lst[j] = lst[j], lst[i]
            if delta > best:
                best = delta
                witness = (w, (i + 1, j + 1))
    return LipschitzCertificate(stat, n, best, witness)
