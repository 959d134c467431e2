import random
from functools import lru_cache

import pytest

from frolab import catalog
from frolab.lie import from_structure_equations

ACCEPTANCE_LINES: list[str] = []


@lru_cache(maxsize=None)
def model(name):
    """Catalog complexes are immutable, so tests share one instance per name."""
    return catalog.get(name)


@pytest.fixture(params=sorted(catalog.CATALOG))
def any_model(request):
    return model(request.param)


def random_two_step(seed: int):
    """Random 2-step nilpotent complex: closed generators w_1..w_r, the rest have
    d w_a a random (2,0)+(1,1) combination of the closed ones and their conjugates."""
    rng = random.Random(seed)
    n = rng.choice([2, 3])
    r = rng.randint(1, n - 1)
    closed = list(range(r)) + [n + a for a in range(r)]
    equations = {}
    for a in range(r, n):
        eq = {}
        for i in closed:
            for j in closed:
                if i < j and not (i >= n and j >= n) and rng.random() < 0.4:
                    eq[(i, j)] = rng.choice([-2, -1, 1, 2])
        if not eq:
            eq[(0, n)] = 1
        equations[a] = eq
    return from_structure_equations(n, equations, name=f"random{seed}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
