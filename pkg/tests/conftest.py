import os
import time

import numpy as np
import pytest

from gpdo.grid import GroupGrid
from gpdo.repn import LIGHT, heisenberg_grid

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def box():
    return GroupGrid(3, 6.0, 32)


@pytest.fixture(scope="session")
def light():
    return heisenberg_grid(**LIGHT)


@pytest.fixture
def criterion(request):
    """Time a criterion and record one PASS/FAIL line for the terminal summary."""
    state = {"detail": ""}
    t0 = time.perf_counter()
    yield state
    dt = time.perf_counter() - t0
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    ACCEPTANCE_LINES.append(f"criterion {state['id']:>2}: {'PASS' if ok else 'FAIL'}  {dt:7.1f}s  {state['detail']}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    out = yield
    rep = out.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def rng(seed=0):
    return np.random.default_rng(seed)
