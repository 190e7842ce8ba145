"""Permutations of [n] in one-line notation.

A :class:`Permutation` is a tuple subclass holding the word
``(s(1), ..., s(n))``.  Values are 1-based throughout.  Composition follows
``compose(s, t)(x) == s(t(x))``, so right-multiplying by a transposition
``(i, j)`` swaps the entries at positions ``i`` and ``j`` of the word.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from conjperm.errors import NotABijection, SizeMismatch, check_limit


class Permutation(tuple):
    """Validated one-line word of a permutation of {1..n}."""

    __slots__ = ()

    def __new__(cls, word: Iterable[int]):
        word = tuple(int(v) for v in word)
        n = len(word)
        if n == 0:
            raise NotABijection("empty word")
        seen = [False] * (n + 1)
        for v in word:
            if v < 1 or v > n or seen[v]:
                raise NotABijection(f"{list(word)} is not a permutation of 1..{n}")
            seen[v] = True
        return super().__new__(cls, word)

    @classmethod
    def _trusted(cls, word: Iterable[int]) -> Permutation:
        # skips validation; callers guarantee bijectivity
        return tuple.__new__(cls, word)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        if n < 1:
            raise NotABijection("n must be >= 1")
        return cls._trusted(range(1, n + 1))

    @classmethod
    def reverse(cls, n: int) -> Permutation:
        if n < 1:
            raise NotABijection("n must be >= 1")
        return cls._trusted(range(n, 0, -1))

    @property
    def n(self) -> int:
        return len(self)

    @property
    def word(self) -> tuple[int, ...]:
        return tuple(self)

    def __call__(self, x: int) -> int:
        return self[x - 1]

    def __repr__(self) -> str:
        return f"Permutation({list(self)})"

    def inverse(self) -> Permutation:
        return inverse(self)

    def cycles(self) -> CycleDecomposition:
        return cycle_decomposition(self)

    @property
    def num_cycles(self) -> int:
        return num_cycles(self)

    def is_cyclic(self) -> bool:
        return num_cycles(self) == 1


def from_one_line(word: Sequence[int]) -> Permutation:
    return Permutation(word)


@dataclass(frozen=True)
class Transposition:
    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("transposition needs two distinct points")
        if self.i > self.j:
            lo, hi = self.j, self.i
            object.__setattr__(self, "i", lo)
            object.__setattr__(self, "j", hi)

    def as_permutation(self, n: int) -> Permutation:
        return transposition(self.i, self.j, n)


def transposition(i: int, j: int, n: int) -> Permutation:
    if not (1 <= i <= n and 1 <= j <= n) or i == j:
        raise ValueError(f"invalid transposition ({i},{j}) in S_{n}")
    w = list(range(1, n + 1))
    w[i - 1], w[j - 1] = j, i
    return Permutation._trusted(w)


def _compose(s: Sequence[int], t: Sequence[int]) -> tuple[int, ...]:
    return tuple(s[x - 1] for x in t)


def compose(s: Sequence[int], t: Sequence[int]) -> Permutation:
    """Return the permutation ``x -> s(t(x))``."""
    if len(s) != len(t):
        raise SizeMismatch(f"sizes {len(s)} and {len(t)} differ")
    return Permutation._trusted(_compose(s, t))


def inverse(s: Sequence[int]) -> Permutation:
    inv = [0] * len(s)
    for i, v in enumerate(s, start=1):
        inv[v - 1] = i
    return Permutation._trusted(inv)


def conjugate(rho: Sequence[int], s: Sequence[int]) -> Permutation:
    """Return ``rho o s o rho^-1``."""
    return compose(compose(rho, s), inverse(rho))


def swap_positions(s: Sequence[int], i: int, j: int) -> Permutation:
    """``s o (i, j)``: exchange the entries at positions i and j."""
    w = list(s)
    w[i - 1], w[j - 1] = w[j - 1], w[i - 1]
    return Permutation._trusted(w)


@dataclass(frozen=True)
class CycleDecomposition:
    """Cycles rotated to start at their minimum, sorted by minimum."""

    cycles: tuple[tuple[int, ...], ...]
    n: int

    @property
    def num_cycles(self) -> int:
        return len(self.cycles)

    @property
    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles), reverse=True))

    def to_permutation(self) -> Permutation:
        return from_cycles(self.cycles, self.n)

    def __str__(self) -> str:
        return "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles)


def cycle_decomposition(s: Sequence[int]) -> CycleDecomposition:
    n = len(s)
    seen = [False] * (n + 1)
    cycles = []
    # scanning starts in increasing order, so each cycle starts at its minimum
    for start in range(1, n + 1):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = s[x - 1]
        cycles.append(tuple(cyc))
    return CycleDecomposition(tuple(cycles), n)


def num_cycles(s: Sequence[int]) -> int:
    n = len(s)
    seen = bytearray(n + 1)
    count = 0
    for start in range(1, n + 1):
        if seen[start]:
            continue
        count += 1
        x = start
        while not seen[x]:
            seen[x] = 1
            x = s[x - 1]
    return count


def cycle_type(s: Sequence[int]) -> tuple[int, ...]:
    return cycle_decomposition(s).cycle_type


def from_cycles(cycles: Iterable[Sequence[int]], n: int) -> Permutation:
    """Build a permutation of size n from disjoint cycles (missing points are fixed)."""
    w = list(range(1, n + 1))
    used = set()
    for cyc in cycles:
        for k, a in enumerate(cyc):
            if a in used or not 1 <= a <= n:
                raise NotABijection(f"bad cycle {tuple(cyc)} for n={n}")
            used.add(a)
            w[a - 1] = cyc[(k + 1) % len(cyc)]
    return Permutation._trusted(w)


def enumerate_all(n: int, limit: int | None = None) -> Iterator[Permutation]:
    """All n! permutations in lexicographic order of their words."""
    check_limit(n, limit)
    if n < 1:
        raise ValueError("n must be >= 1")
    for w in itertools.permutations(range(1, n + 1)):
        yield Permutation._trusted(w)


def rank(s: Sequence[int]) -> int:
    """Lexicographic rank of the word, in [0, n!)."""
    n = len(s)
    remaining = list(range(1, n + 1))
    r = 0
    for i, v in enumerate(s):
        k = remaining.index(v)
        r += k * math.factorial(n - 1 - i)
        remaining.pop(k)
    return r


def unrank(r: int, n: int) -> Permutation:
    if not 0 <= r < math.factorial(n):
        raise ValueError(f"rank {r} out of range for n={n}")
    remaining = list(range(1, n + 1))
    w = []
    for i in range(n):
        f = math.factorial(n - 1 - i)
        k, r = divmod(r, f)
        w.append(remaining.pop(k))
    return Permutation._trusted(w)


def star_product(s: Sequence[int], points: Sequence[int]) -> Permutation:
    """``s o (i1,i2) o (i1,i3) o ... o (i1,ik)`` for distinct points i1..ik."""
    w = list(s)
    i1 = points[0]
    # ((s o t1) o t2) o ...: each right factor swaps two word positions
    for ik in points[1:]:
        w[i1 - 1], w[ik - 1] = w[ik - 1], w[i1 - 1]
    return Permutation._trusted(w)


def merge_targets(s: Sequence[int], limit: int | None = None) -> frozenset[Permutation]:
    """The set A_s of single-cycle permutations reachable by a star product.

    ``{s}`` if s is already one cycle; otherwise every ``s o (i1,i2) o ... o
    (i1,i_c)`` with c = #cycles(s), distinct i's, whose result is one cycle.
    Found by direct enumeration of the ordered point tuples.
    """
    n = len(s)
    check_limit(n, limit)
    c = num_cycles(s)
    if c == 1:
        return frozenset([Permutation._trusted(s)])
    out = set()
    for pts in itertools.permutations(range(1, n + 1), c):
        rho = star_product(s, pts)
        if num_cycles(rho) == 1:
            out.add(rho)
    return frozenset(out)
