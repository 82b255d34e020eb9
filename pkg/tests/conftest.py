"""Shared fixtures: the six-node reference graph, its known construction
matrices, and random problem generators."""

import numpy as np
import pytest

from prkit import Graph, SparseMatrix, parse_edge_list

# Reference 6-node directed graph (node 0 dangling): out-degrees [0,2,1,3,1,1].
G6_EDGE_LIST = "1 0\n1 2\n2 4\n3 1\n3 2\n3 4\n4 5\n5 4\n"

G6_ADJACENCY = np.array(
    [
        [0, 0, 0, 0, 0, 0],
        [1, 0, 1, 0, 0, 0],
        [0, 0, 0, 0, 1, 0],
        [0, 1, 1, 0, 1, 0],
        [0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 1, 0],
    ],
    dtype=float,
)

G6_DEGREES = np.array([0.0, 2.0, 1.0, 3.0, 1.0, 1.0])
G6_V = np.array([0.0, 0.0, 1 / 3, 1 / 3, 1 / 3, 0.0])

G6_RANDOM_WALK = np.array(
    [
        [0, 1 / 2, 0, 0, 0, 0],
        [0, 0, 0, 1 / 3, 0, 0],
        [0, 1 / 2, 0, 1 / 3, 0, 0],
        [0, 0, 0, 0, 0, 0],
        [0, 0, 1, 1 / 3, 0, 1],
        [0, 0, 0, 0, 1, 0],
    ]
)

G6_STRONG = np.array(
    [
        [0, 1 / 2, 0, 0, 0, 0],
        [0, 0, 0, 1 / 3, 0, 0],
        [1 / 3, 1 / 2, 0, 1 / 3, 0, 0],
        [1 / 3, 0, 0, 0, 0, 0],
        [1 / 3, 0, 1, 1 / 3, 0, 1],
        [0, 0, 0, 0, 1, 0],
    ]
)

G6_WEAK = np.array(
    [
        [1 / 6, 1 / 2, 0, 0, 0, 0],
        [1 / 6, 0, 0, 1 / 3, 0, 0],
        [1 / 6, 1 / 2, 0, 1 / 3, 0, 0],
        [1 / 6, 0, 0, 0, 0, 0],
        [1 / 6, 0, 1, 1 / 3, 0, 1],
        [1 / 6, 0, 0, 0, 1, 0],
    ]
)

# Sink correction keeps the walk at the dangling node: random walk + diag(c).
G6_SINK = G6_RANDOM_WALK + np.diag([1, 0, 0, 0, 0, 0.0])

G6_REVERSE = np.array(
    [
        [0, 0, 0, 0, 0, 0],
        [1, 0, 1 / 2, 0, 0, 0],
        [0, 0, 0, 0, 1 / 3, 0],
        [0, 1, 1 / 2, 0, 1 / 3, 0],
        [0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 1 / 3, 0],
    ]
)

# Strongly preferential walk restricted to nodes {1,...,5} (node 0 fixed).
G6_DIRICHLET = np.array(
    [
        [0, 0, 1 / 3, 0, 0],
        [1 / 2, 0, 1 / 3, 0, 0],
        [0, 0, 0, 0, 0],
        [0, 1, 1 / 3, 0, 1],
        [0, 0, 0, 1, 0],
    ]
)

G6_TOTAL_DEGREES = np.array([1.0, 3.0, 3.0, 3.0, 4.0, 2.0])

G6_WEIGHTED = np.array(
    [
        [0, 1 / 4, 0, 0, 0, 0],
        [0, 0, 0, 3 / 10, 0, 0],
        [0, 3 / 4, 0, 3 / 10, 0, 0],
        [0, 0, 0, 0, 0, 0],
        [0, 0, 1, 4 / 10, 0, 1],
        [0, 0, 0, 0, 1, 0],
    ]
)

# Degree-dependent censored-node construction on the same graph.
G6_CENSORED_PBAR = np.array(
    [
        [0, 1 / 3, 0, 0, 0, 0],
        [0, 0, 0, 1 / 4, 0, 0],
        [0, 1 / 3, 0, 1 / 4, 0, 0],
        [0, 0, 0, 0, 0, 0],
        [0, 0, 1 / 2, 1 / 4, 0, 1 / 2],
        [0, 0, 0, 0, 1 / 2, 0],
    ]
)
G6_CENSORED_C = np.array([1.0, 1 / 3, 1 / 2, 1 / 4, 1 / 2, 1 / 2])

# 4-node / 5-node alignment instance: two undirected graphs, their walk
# matrices, and the known similarity scores at alpha = 0.85, V = ones/20.
FIG4_A_EDGES = [(0, 1), (0, 2), (1, 2), (1, 3)]
FIG4_B_EDGES = [(0, 3), (1, 2), (1, 3), (2, 3), (3, 4)]

FIG4_P = np.array(
    [
        [0, 1 / 3, 1 / 2, 0],
        [1 / 2, 0, 1 / 2, 1],
        [1 / 2, 1 / 3, 0, 0],
        [0, 1 / 3, 0, 0],
    ]
)
FIG4_Q = np.array(
    [
        [0, 0, 0, 1 / 4, 0],
        [0, 0, 1 / 2, 1 / 4, 0],
        [0, 1 / 2, 0, 1 / 4, 0],
        [1, 1 / 2, 1 / 2, 0, 1],
        [0, 0, 0, 1 / 4, 0],
    ]
)
FIG4_X = np.array(
    [
        [0.03, 0.05, 0.05, 0.09, 0.03],
        [0.04, 0.07, 0.07, 0.15, 0.04],
        [0.03, 0.05, 0.05, 0.09, 0.03],
        [0.02, 0.03, 0.03, 0.05, 0.02],
    ]
)


@pytest.fixture
def g6() -> Graph:
    return parse_edge_list(G6_EDGE_LIST)


def undirected_graph(edges, n) -> Graph:
    rows, cols = [], []
    for i, j in edges:
        rows += [i, j]
        cols += [j, i]
    return Graph(SparseMatrix(n, n, rows, cols), directed=False)


def random_graph(rng, n, density=0.3, weighted=False, dangling=None) -> Graph:
    """Random directed graph. dangling=True forces node 0 dangling;
    dangling=False gives every node at least one out-edge."""
    mask = rng.random((n, n)) < density
    np.fill_diagonal(mask, False)
    if dangling is True:
        mask[0, :] = False
    elif dangling is False:
        for i in range(n):
            if not mask[i].any():
                j = (i + 1 + rng.integers(n - 1)) % n
                mask[i, j] = True
    w = rng.uniform(0.5, 2.0, (n, n)) * mask if weighted else mask.astype(float)
    rows, cols = np.nonzero(w)
    return Graph(SparseMatrix(n, n, rows, cols, w[rows, cols]))


def random_undirected_connected(rng, n, extra_edges=None) -> Graph:
    """Random connected undirected graph: spanning tree plus extras."""
    edges = set()
    order = rng.permutation(n)
    for k in range(1, n):
        a, b = order[k], order[rng.integers(k)]
        edges.add((min(a, b), max(a, b)))
    extra = extra_edges if extra_edges is not None else n
    for _ in range(extra):
        a, b = rng.integers(n), rng.integers(n)
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return undirected_graph(sorted(edges), n)


def random_probability(rng, n) -> np.ndarray:
    v = rng.random(n) + 1e-3
    return v / v.sum()


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        status = "PASS" if report.passed else "FAIL"
        print(f"\n[acceptance] {name}: {status}", flush=True)
