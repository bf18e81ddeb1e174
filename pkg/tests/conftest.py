import random

import pytest

from cubicdecoupling import CubicForm


def random_nondegenerate_cubics(count, seed, lo=-3, hi=3):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        phi = CubicForm(*(rng.randint(lo, hi) for _ in range(4)))
        if phi.is_nondegenerate and phi not in out:
            out.append(phi)
    return out


@pytest.fixture
def sum_of_cubes():
    return CubicForm(1, 0, 0, 1)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
