import numpy as np
import pytest

import prkit
from prkit import KronOperator, ValidationError
from prkit.isorank import alignment_operators

from conftest import (
    FIG4_A_EDGES,
    FIG4_B_EDGES,
    FIG4_P,
    FIG4_Q,
    FIG4_X,
    random_graph,
    undirected_graph,
)


@pytest.fixture
def fig4_graphs():
    return undirected_graph(FIG4_A_EDGES, 4), undirected_graph(FIG4_B_EDGES, 5)


def brute_greedy(X):
    """Independent re-implementation of greedy extraction by scanning."""
    X = X.copy().astype(float)
    pairs = []
    for _ in range(min(X.shape)):
        best, where = -np.inf, None
        for i in range(X.shape[0]):
            for j in range(X.shape[1]):
                if X[i, j] > best:
                    best, where = X[i, j], (i, j)
        pairs.append(where)
        X[where[0], :] = -np.inf
        X[:, where[1]] = -np.inf
    return pairs


class TestKronApply:
    def test_identity_operators(self):
        eye3 = prkit.Graph(prkit.SparseMatrix(3, 3, range(3), range(3)))
        eye4 = prkit.Graph(prkit.SparseMatrix(4, 4, range(4), range(4)))
        p, q = alignment_operators(eye3, eye4)
        X = np.arange(12.0).reshape(3, 4)
        np.testing.assert_array_equal(prkit.kron_apply(KronOperator(p, q), X), X)

    def test_figure_instance_against_dense_kron(self, fig4_graphs):
        ga, gb = fig4_graphs
        p, q = alignment_operators(ga, gb)
        np.testing.assert_array_equal(p.to_dense(), FIG4_P)
        np.testing.assert_array_equal(q.to_dense(), FIG4_Q)
        X = np.full((4, 5), 1 / 20)
        got = prkit.kron_apply(KronOperator(p, q), X)
        want = (np.kron(FIG4_Q, FIG4_P) @ X.flatten(order="F")).reshape(4, 5, order="F")
        np.testing.assert_allclose(got, want, atol=1e-14)

    def test_random_instances_against_dense_kron(self):
        rng = np.random.default_rng(200)
        for _ in range(10):
            n, m = int(rng.integers(2, 8)), int(rng.integers(2, 8))
            p, q = alignment_operators(random_graph(rng, n), random_graph(rng, m))
            X = rng.random((n, m))
            got = prkit.kron_apply(KronOperator(p, q), X)
            want = (np.kron(q.to_dense(), p.to_dense()) @ X.flatten(order="F")).reshape(
                n, m, order="F"
            )
            np.testing.assert_allclose(got, want, atol=1e-13)

    def test_mass_conservation(self):
        rng = np.random.default_rng(201)
        p, q = alignment_operators(random_graph(rng, 5), random_graph(rng, 6))
        X = rng.random((5, 6))
        out = prkit.kron_apply(KronOperator(p, q), X)
        assert out.sum() == pytest.approx(X.sum(), abs=1e-12)

    def test_shape_mismatch(self, fig4_graphs):
        p, q = alignment_operators(*fig4_graphs)
        with pytest.raises(ValidationError):
            prkit.kron_apply(KronOperator(p, q), np.zeros((5, 4)))


class TestIsorankSolve:
    def test_figure_golden(self, fig4_graphs):
        ga, gb = fig4_graphs
        res = prkit.isorank(ga, gb, alpha=0.85, tol=1e-12)
        assert np.max(np.abs(res.x - FIG4_X)) <= 0.005
        np.testing.assert_array_equal(np.round(res.x, 2), FIG4_X)
        np.testing.assert_allclose(
            res.x[1], [0.04, 0.07, 0.07, 0.15, 0.04], atol=0.005
        )
        assert prkit.greedy_match(res.x)[0] == (1, 3)  # node 2 pairs with D

    def test_small_alpha_approaches_teleportation(self, fig4_graphs):
        ga, gb = fig4_graphs
        res = prkit.isorank(ga, gb, alpha=0.01, tol=1e-12)
        np.testing.assert_allclose(res.x, np.full((4, 5), 1 / 20), atol=0.01)

    def test_nonnegative_unit_mass(self, fig4_graphs):
        res = prkit.isorank(*fig4_graphs, alpha=0.85, tol=1e-12)
        assert np.all(res.x >= 0)
        assert res.x.sum() == pytest.approx(1.0, abs=1e-10)

    def test_isomorphic_graphs_give_symmetric_scores(self):
        rng = np.random.default_rng(202)
        g = random_graph(rng, 5, dangling=False)
        perm = np.array([3, 0, 4, 1, 2])
        rows, cols, vals = g.adjacency.triplets()
        gp = prkit.Graph(prkit.SparseMatrix(5, 5, perm[rows], perm[cols], vals))
        res = prkit.isorank(g, gp, alpha=0.85, tol=1e-13)
        Y = res.x[:, perm]  # node i of g corresponds to perm[i] of gp
        np.testing.assert_allclose(Y, Y.T, atol=1e-10)

    def test_relabeling_equivariance(self, fig4_graphs):
        ga, gb = fig4_graphs
        res = prkit.isorank(ga, gb, alpha=0.85, tol=1e-13)
        perm = np.array([2, 0, 3, 1])
        rows, cols, vals = ga.adjacency.triplets()
        ga2 = prkit.Graph(prkit.SparseMatrix(4, 4, perm[rows], perm[cols], vals))
        res2 = prkit.isorank(ga2, gb, alpha=0.85, tol=1e-13)
        np.testing.assert_allclose(res2.x[perm, :], res.x, atol=1e-10)

    def test_bad_teleportation_matrix(self, fig4_graphs):
        ga, gb = fig4_graphs
        with pytest.raises(ValidationError):
            prkit.isorank(ga, gb, V=np.ones((4, 5)))


class TestGreedyMatch:
    def test_diagonal_identity(self):
        pairs = prkit.greedy_match(np.eye(4) / 4)
        assert pairs == [(0, 0), (1, 1), (2, 2), (3, 3)]

    def test_ties_break_lexicographically(self):
        X = np.array([[0.5, 0.5], [0.5, 0.5]])
        assert prkit.greedy_match(X) == [(0, 0), (1, 1)]

    def test_matches_brute_force(self):
        rng = np.random.default_rng(203)
        for _ in range(20):
            n, m = int(rng.integers(1, 7)), int(rng.integers(1, 7))
            X = rng.random((n, m))
            assert prkit.greedy_match(X) == brute_greedy(X)
