"""Conjugacy-invariant random permutations: samplers, statistics, rate
functions, an exact small-n oracle and a Monte Carlo tail estimator."""

from conjperm.perm import Permutation, compose, cycle_decomposition, inverse
from conjperm.samplers import Law, make_rng, parse_law
from conjperm.statistics import StatisticId, evaluate

__all__ = [
    "Law",
    "Permutation",
    "StatisticId",
    "compose",
    "cycle_decomposition",
    "evaluate",
    "inverse",
    "make_rng",
    "parse_law",
]
__version__ = "0.1.0"
