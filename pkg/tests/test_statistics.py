import itertools
import math

import pytest
from hypothesis import given

from conftest import permutations, words
from conjperm.errors import LimitExceeded, UnknownStatistic
from conjperm.perm import Permutation, compose, transposition
from conjperm.statistics import (
    CATALOGUE,
    StatisticId,
    ascents,
    descents,
    distance,
    evaluate,
    exceedances,
    inversions,
    las,
    lds,
    lipschitz_sup,
    lis,
    major_index,
    peaks,
    rsk_prefix_sums,
    rsk_rows,
    rsk_shape,
    valleys,
)


def brute_lis(w):
    best = 0
    for r in range(1, len(w) + 1):
        for idx in itertools.combinations(range(len(w)), r):
            if all(w[a] < w[b] for a, b in zip(idx, idx[1:])):
                best = r
    return best


def test_sample_word_values(sample_word):
    w = sample_word
    assert lis(w) == 2
    assert lds(w) == 4
    assert rsk_rows(w, 4) == [2, 1, 1, 1]
    assert inversions(w) == 8
    assert (descents(w), ascents(w), peaks(w), valleys(w), exceedances(w)) == (3, 1, 1, 1, 2)
    assert major_index(w) == 7
    assert major_index(w, ascent_convention=True) == 3
    assert las(w) == 4


def test_lis_small_example():
    assert lis([3, 1, 4, 2, 5]) == 3


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_identity_and_reverse(n):
    ident, rev = Permutation.identity(n), Permutation.reverse(n)
    assert lis(ident) == n and lds(ident) == 1
    assert lds(rev) == n
    assert rsk_rows(ident, 2) == [n, 0]
    assert rsk_rows(rev, n) == [1] * n
    assert inversions(rev) == n * (n - 1) // 2
    assert inversions(ident) == 0
    assert descents(ident) == 0 and ascents(ident) == n - 1 and exceedances(ident) == 0
    assert descents(rev) == n - 1 and peaks(rev) == 0
    assert major_index(ident) == 0


def test_las_identity_is_one():
    # M_1 = 0 and there are no interior peaks or valleys
    for n in range(1, 8):
        assert las(Permutation.identity(n)) == 1
    assert las([1]) == 1


def test_evaluate_dispatch():
    assert evaluate("lis", [5, 3, 2, 4, 1]) == 2
    assert evaluate("inv-norm", Permutation.reverse(4)) == 1.5
    assert evaluate("rsk:2", [5, 3, 2, 4, 1]) == (2, 3)
    assert evaluate("maj-norm", [5, 3, 2, 4, 1]) == pytest.approx(7 / 5)
    assert evaluate("maj-paper", [5, 3, 2, 4, 1]) == 3
    assert evaluate("cycles", [5, 3, 2, 4, 1]) == 3


@pytest.mark.parametrize("bad", ["foo", "rskx", "rsk:0", "rsk:x", ""])
def test_unknown_statistic(bad):
    with pytest.raises(UnknownStatistic):
        StatisticId.parse(bad)


def test_statistic_id_round_trip():
    for s in CATALOGUE:
        assert StatisticId.parse(str(s)) == s
    assert len(CATALOGUE) == 13
    assert StatisticId.parse("rsk") == StatisticId("rsk", 1)


def test_distance_euclidean_for_vectors():
    assert distance((2, 3), (1, 3)) == 1
    assert distance((0, 0), (3, 4)) == 5
    assert distance(2, 5) == 3


def test_lis_matches_brute_force_n6():
    for w in words(6):
        assert lis(w) == brute_lis(w)


def test_lipschitz_known_values():
    assert lipschitz_sup("descents", 6).sup_delta <= 4
    assert lipschitz_sup("inv", 6).sup_delta <= 12
    # swapping the ends of the identity drops lis from n to n-2
    cert = lipschitz_sup("lis", 6)
    assert cert.sup_delta == 2
    s, (i, j) = cert.witness
    assert abs(lis(s) - lis(compose(s, transposition(i, j, 6)))) == 2
    with pytest.raises(LimitExceeded):
        lipschitz_sup("lis", 11)


@given(permutations(max_n=40))
def test_lis_equals_first_rsk_row(s):
    shape = rsk_shape(s)
    assert shape[0] == lis(s)
    assert len(shape) == lds(s)
    assert sum(shape) == len(s)
    assert all(a >= b for a, b in zip(shape, shape[1:]))


@given(permutations(max_n=40))
def test_prefix_sums_monotone(s):
    sums = rsk_prefix_sums(s, 4)
    assert all(b >= a for a, b in zip(sums, sums[1:]))
    assert sums[-1] <= len(s)


@given(permutations(max_n=40))
def test_ascent_descent_complement(s):
    assert ascents(s) + descents(s) == len(s) - 1
    assert peaks(s) - valleys(s) in (-1, 0, 1)


@given(permutations(max_n=30))
def test_inversions_quadratic_reference(s):
    ref = sum(s[i] > s[j] for i in range(len(s)) for j in range(i + 1, len(s)))
    assert inversions(s) == ref


@given(permutations(max_n=30))
def test_lds_is_lis_of_reversed_values(s):
    n = len(s)
    assert lds(s) == lis([n + 1 - v for v in s])


@given(permutations(min_n=2, max_n=12))
def test_transposition_moves_lis_by_at_most_two(s):
    n = len(s)
    t = compose(s, transposition(1, n, n))
    assert abs(lis(s) - lis(t)) <= 2
    assert abs(descents(s) - descents(t)) <= 4
    assert abs(inversions(s) - inversions(t)) <= 2 * n
    assert math.isfinite(float(las(t)))
