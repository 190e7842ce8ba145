import itertools

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def permutations(draw, min_n=1, max_n=12):
    n = draw(st.integers(min_n, max_n))
    return tuple(draw(st.permutations(range(1, n + 1))))


@st.composite
def same_size_pairs(draw, min_n=1, max_n=10):
    n = draw(st.integers(min_n, max_n))
    a = tuple(draw(st.permutations(range(1, n + 1))))
    b = tuple(draw(st.permutations(range(1, n + 1))))
    return a, b


def words(n):
    return list(itertools.permutations(range(1, n + 1)))


@pytest.fixture
def sample_word():
    return (5, 3, 2, 4, 1)


# acceptance criteria record one line each; printed in the terminal summary
_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    def record(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}"
        if detail:
            line += f" | {detail}"
        _ACCEPTANCE_LINES.append((number, line))
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
