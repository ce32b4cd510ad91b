import collections

import pytest

from restricted_degree.models import init_state
from restricted_degree.rng import RandomSource
from restricted_degree.selection import init_selection


def recount(values):
    """Dense histogram of a list of degrees."""
    counts = collections.Counter(values)
    top = max(counts, default=-1)
    return tuple(counts.get(d, 0) for d in range(top + 1))


def fresh(params, rule, seed=1):
    state = init_state(params, RandomSource(seed))
    return state, init_selection(rule, state)


@pytest.fixture
def tmp_run(tmp_path):
    return tmp_path / "run"


def pytest_terminal_summary(terminalreporter):
    lines = getattr(pytest, "acceptance_lines", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines.items()):
        terminalreporter.write_line(line)
