import numpy as np
import pytest

from subtensor import generate_tensor


@pytest.fixture
def small_tensor():
    return generate_tensor(5, 3, 2, seed=11, backend="dense")


def naive_subtensor_sum(t, subsets):
    """Plain nested iteration over 1-based index tuples."""
    import itertools

    total = 0.0
    for idx in itertools.product(*subsets):
        total += float(t.dense[tuple(i - 1 for i in idx)])
    return total


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
