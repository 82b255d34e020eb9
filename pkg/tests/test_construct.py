import numpy as np
import pytest

import prkit
from prkit import Graph, SparseMatrix, ValidationError
from prkit.construct import total_degree_weights

from conftest import (
    G6_DIRICHLET,
    G6_RANDOM_WALK,
    G6_REVERSE,
    G6_SINK,
    G6_STRONG,
    G6_TOTAL_DEGREES,
    G6_V,
    G6_WEAK,
    G6_WEIGHTED,
    random_graph,
    random_probability,
    undirected_graph,
)

EXACT = 1e-15


class TestRandomWalk:
    def test_g6_matrix_and_correction(self, g6):
        sub = prkit.random_walk(g6)
        assert np.max(np.abs(sub.pbar.toarray() - G6_RANDOM_WALK)) <= EXACT
        np.testing.assert_array_equal(sub.correction, [1, 0, 0, 0, 0, 0])

    def test_single_isolated_node(self):
        sub = prkit.random_walk(Graph(SparseMatrix(1, 1)))
        assert sub.pbar.toarray()[0, 0] == 0.0
        np.testing.assert_array_equal(sub.correction, [1.0])

    def test_column_sums_complement_correction(self):
        rng = np.random.default_rng(12)
        g = random_graph(rng, 12, weighted=True)
        sub = prkit.random_walk(g)
        dense = sub.pbar.toarray()
        np.testing.assert_allclose(dense.sum(axis=0), 1.0 - sub.correction, atol=1e-12)


class TestMakeOperator:
    def test_strong_matches_figure_matrix(self, g6):
        op = prkit.make_operator(prkit.random_walk(g6), "strong", G6_V)
        x = np.full(6, 1 / 6)
        np.testing.assert_allclose(op.apply(x), G6_STRONG @ x, atol=1e-15)
        assert np.max(np.abs(op.to_dense() - G6_STRONG)) <= EXACT

    def test_weak_and_sink_dense(self, g6):
        weak = prkit.make_operator(prkit.random_walk(g6), "weak", np.full(6, 1 / 6))
        assert np.max(np.abs(weak.to_dense() - G6_WEAK)) <= EXACT
        sink = prkit.make_operator(prkit.random_walk(g6), "sink")
        assert np.max(np.abs(sink.to_dense() - G6_SINK)) <= EXACT

    def test_no_dangling_modes_coincide(self):
        rng = np.random.default_rng(5)
        g = random_graph(rng, 8, dangling=False)
        sub = prkit.random_walk(g)
        x = random_probability(rng, 8)
        base = sub.apply(x)
        for mode, dist in [("strong", random_probability(rng, 8)), ("weak", np.full(8, 1 / 8)), ("sink", None)]:
            np.testing.assert_allclose(prkit.make_operator(sub, mode, dist).apply(x), base, atol=0)

    def test_weak_against_dense_on_random_input(self, g6):
        rng = np.random.default_rng(9)
        op = prkit.make_operator(prkit.random_walk(g6), "weak", np.full(6, 1 / 6))
        x = random_probability(rng, 6)
        np.testing.assert_allclose(op.apply(x), G6_WEAK @ x, atol=1e-15)

    def test_apply_preserves_probability_mass(self):
        rng = np.random.default_rng(21)
        for trial in range(10):
            g = random_graph(rng, 15)
            v = random_probability(rng, 15)
            x = random_probability(rng, 15)
            for mode, dist in [("strong", v), ("weak", np.full(15, 1 / 15)), ("sink", None)]:
                op = prkit.make_operator(prkit.random_walk(g), mode, dist)
                assert abs(op.apply(x).sum() - 1.0) <= 1e-12

    def test_strong_agrees_with_materialized_dense(self):
        rng = np.random.default_rng(40)
        for n in (10, 30, 50):
            g = random_graph(rng, n, weighted=True)
            v = random_probability(rng, n)
            op = prkit.make_operator(prkit.random_walk(g), mode="strong", dist=v)
            sub = prkit.random_walk(g)
            dense = sub.pbar.toarray() + np.outer(v, sub.correction)
            x = random_probability(rng, n)
            np.testing.assert_allclose(op.apply(x), dense @ x, atol=1e-12)

    def test_bad_distribution_rejected(self, g6):
        with pytest.raises(ValidationError):
            prkit.make_operator(prkit.random_walk(g6), "strong", np.ones(6))
        with pytest.raises(ValidationError):
            prkit.make_operator(prkit.random_walk(g6), "sink", np.full(6, 1 / 6))


class TestReverseWalk:
    def test_g6_reverse_matrix(self, g6):
        sub = prkit.reverse_walk(g6)
        assert np.max(np.abs(sub.pbar.toarray() - G6_REVERSE)) <= EXACT
        # node 3 (paper's node 4) has no in-edges, so it dangles here
        np.testing.assert_array_equal(sub.correction, [0, 0, 0, 1, 0, 0])

    def test_undirected_graph_reverse_equals_forward(self):
        g = undirected_graph([(0, 1), (1, 2), (2, 0)], 3)
        assert prkit.reverse_walk(g).pbar.equals(prkit.random_walk(g).pbar)

    def test_equals_walk_on_transposed_graph(self):
        rng = np.random.default_rng(17)
        g = random_graph(rng, 14, weighted=True)
        gt = Graph(prkit.transpose(g.adjacency))
        assert prkit.reverse_walk(g).pbar.equals(prkit.random_walk(gt).pbar)


class TestWeightedWalk:
    def test_g6_total_degree_weights(self, g6):
        np.testing.assert_array_equal(total_degree_weights(g6), G6_TOTAL_DEGREES)
        sub = prkit.weighted_walk(g6, G6_TOTAL_DEGREES)
        assert np.max(np.abs(sub.pbar.toarray() - G6_WEIGHTED)) <= EXACT
        np.testing.assert_array_equal(
            sub.pbar.toarray()[:, 1], [1 / 4, 0, 3 / 4, 0, 0, 0]
        )

    def test_uniform_weights_reduce_to_random_walk(self, g6):
        sub = prkit.weighted_walk(g6, np.ones(6))
        assert sub.pbar.equals(prkit.random_walk(g6).pbar)

    def test_column_sums_zero_or_one(self):
        rng = np.random.default_rng(31)
        g = random_graph(rng, 12)
        dw = rng.uniform(0, 2, 12)
        dw[rng.integers(12)] = 0.0
        sums = prkit.weighted_walk(g, dw).pbar.toarray().sum(axis=0)
        assert np.all((np.abs(sums - 1) <= 1e-12) | (sums == 0.0))

    def test_negative_weights_rejected(self, g6):
        with pytest.raises(ValidationError):
            prkit.weighted_walk(g6, -np.ones(6))


class TestDirichlet:
    def test_g6_reduction_matches_figure(self, g6):
        op = prkit.make_operator(prkit.random_walk(g6), "strong", G6_V)
        red = prkit.dirichlet_reduce(op, [0], [0.0], G6_V, alpha=0.85)
        assert np.max(np.abs(red.problem.pbar.pbar.toarray() - G6_DIRICHLET)) <= EXACT
        np.testing.assert_allclose(red.problem.f, 0.15 * G6_V[1:], atol=1e-15)

    def test_empty_boundary_is_identity(self, g6):
        op = prkit.make_operator(prkit.random_walk(g6), "strong", G6_V)
        red = prkit.dirichlet_reduce(op, [], [], G6_V, alpha=0.85)
        np.testing.assert_allclose(red.problem.f, 0.15 * G6_V, atol=0)
        assert np.max(np.abs(red.problem.pbar.pbar.toarray() - op.to_dense())) <= EXACT

    def test_blocked_system_identity(self):
        rng = np.random.default_rng(77)
        g = random_graph(rng, 10, dangling=False)
        v = random_probability(rng, 10)
        s = np.array([2, 5])
        v[s] = 0.0
        v /= v.sum()
        b = rng.uniform(0.0, 1.0, 2)
        alpha = 0.85
        op = prkit.make_operator(prkit.random_walk(g), "strong", v)
        red = prkit.dirichlet_reduce(op, s, b, v, alpha)
        # The reduced solution re-inserted at the boundary satisfies the
        # second block row of the full system.
        x = red.expand(prkit.solve_pseudo(red.problem, tol=1e-13).x)
        P = op.to_dense()
        kept = red.kept
        lhs = x[kept] - alpha * (P[np.ix_(kept, np.arange(10))] @ x)
        np.testing.assert_allclose(lhs, (1 - alpha) * v[kept], atol=1e-10)

    def test_v_nonzero_on_boundary_rejected(self, g6):
        op = prkit.make_operator(prkit.random_walk(g6), "strong", G6_V)
        with pytest.raises(ValidationError):
            prkit.dirichlet_reduce(op, [2], [0.0], G6_V, alpha=0.85)


class TestUndirectedStationary:
    def test_path_graph(self):
        g = undirected_graph([(0, 1), (1, 2)], 3)
        np.testing.assert_allclose(prkit.undirected_stationary(g), [0.25, 0.5, 0.25], atol=0)

    def test_star_graph(self):
        g = undirected_graph([(0, i) for i in range(1, 5)], 5)
        np.testing.assert_allclose(
            prkit.undirected_stationary(g), [0.5, 0.125, 0.125, 0.125, 0.125], atol=0
        )

    def test_walk_fixes_stationary_vector(self):
        rng = np.random.default_rng(8)
        from conftest import random_undirected_connected

        g = random_undirected_connected(rng, 12)
        x = prkit.undirected_stationary(g)
        np.testing.assert_allclose(prkit.random_walk(g).apply(x), x, atol=1e-12)

    def test_directed_or_disconnected_rejected(self, g6):
        with pytest.raises(ValidationError):
            prkit.undirected_stationary(g6)
        two = undirected_graph([(0, 1), (2, 3)], 4)
        with pytest.raises(ValidationError):
            prkit.undirected_stationary(two)
