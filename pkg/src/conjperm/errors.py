"""Exception types shared across the package."""

import os


class NotABijection(ValueError):
    pass


class SizeMismatch(ValueError):
    pass


class LimitExceeded(ValueError):
    pass


class UnknownStatistic(ValueError):
    pass


class InvalidCycleType(ValueError):
    pass


class DomainError(ValueError):
    pass


class ConvergenceFailure(RuntimeError):
    pass


class IncompatibleExponents(ValueError):
    pass


DEFAULT_EXHAUSTIVE_LIMIT = 10


def exhaustive_limit() -> int:
    """Largest n for which full enumeration of S_n is allowed.

    Overridable through the ``CONJPERM_EXHAUSTIVE_LIMIT`` environment variable.
    """
    raw = os.environ.get("CONJPERM_EXHAUSTIVE_LIMIT")
    return int(raw) if raw else DEFAULT_EXHAUSTIVE_LIMIT


def check_limit(n: int, limit: int | None = None) -> None:
    cap = exhaustive_limit() if limit is None else limit
    if n > cap:
        raise LimitExceeded(f"n={n} exceeds the exhaustive limit {cap}")
