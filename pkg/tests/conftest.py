import functools

import pytest

from ctxselftest.graphs import cycle_graph
from ctxselftest.theta_sdp import build_problem, solve


@functools.lru_cache(maxsize=None)
def cycle_solution(n):
    return solve(build_problem(cycle_graph(n)))


@pytest.fixture(scope="session")
def c5_solution():
    sol = cycle_solution(5)
    assert sol.converged
    return sol


@pytest.fixture(scope="session")
def solved_cycle():
    return cycle_solution


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
