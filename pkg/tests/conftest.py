import numpy as np
import pytest

from cutpolicy.graph import Graph, Partitioning

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def graph(n, edges):
    return Graph.from_edges(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2))


def part(labels, k=None):
    labels = np.asarray(labels)
    return Partitioning(labels, int(labels.max()) + 1 if k is None else k)


@pytest.fixture
def triangle():
    return graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def four_cycle():
    return graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])


@pytest.fixture
def two_triangles():
    return graph(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)])


@pytest.fixture
def star():
    return graph(4, [(0, 1), (0, 2), (0, 3)])
