import numpy as np
import pytest

from btlrank import graph as G


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def small_generator_outputs():
    """A spread of generator outputs with n <= 100, all connected."""
    out = []
    for n in (2, 3, 5, 16, 50, 100):
        out += [G.complete(n), G.path(n), G.star(n)]
    for n in (3, 5, 16, 50, 100):
        out.append(G.cycle(n))
    out += [G.complete_bipartite(2, 3), G.complete_bipartite(10, 40)]
    out += [G.banded(30, 3), G.banded(100, 10)]
    out += [G.cayley(8, 2), G.cayley(50, 7)]
    out += [G.island(2, 3, 1), G.island(3, 30, 5)]
    out += [G.barbell(20, 25, count=5, seed=1), G.barbell(10, 10, p=0.2, seed=4)]
    out += [G.random_tree(30, 3), G.random_tree(100, 9)]
    out += [G.erdos_renyi(60, 0.3, seed=2)]
    return out


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[number])
