import numpy as np
import pytest

from searchrank.google import (
    ConvergenceError,
    ParameterError,
    classical_pagerank,
    connectivity_matrix,
    google_from_graph,
    google_matrix,
    patch_dangling,
)
from searchrank.netgen import DirectedGraph, generate_scale_free

from .conftest import random_google
from .oracles import google_dense


def test_connectivity_single_edge():
    np.testing.assert_array_equal(connectivity_matrix(DirectedGraph(2, {(0, 1)})), [[0, 0], [1, 0]])


def test_connectivity_all_dangling():
    np.testing.assert_array_equal(connectivity_matrix(DirectedGraph(3)), np.zeros((3, 3)))


def test_connectivity_outdegree_split():
    h = connectivity_matrix(DirectedGraph(4, {(0, 1), (0, 2)}))
    np.testing.assert_array_equal(h[:, 0], [0, 0.5, 0.5, 0])


def test_patch_dangling():
    np.testing.assert_array_equal(patch_dangling(np.array([[0, 0], [1, 0.0]])), [[0, 0.5], [1, 0.5]])
    h = np.array([[0, 1.0], [1.0, 0]])
    np.testing.assert_array_equal(patch_dangling(h), h)
    np.testing.assert_array_equal(patch_dangling(np.zeros((3, 3))), np.full((3, 3), 1 / 3))


def test_google_two_node(g2):
    np.testing.assert_allclose(g2.entries, [[0.075, 0.5], [0.925, 0.5]], atol=1e-15)


def test_google_limits(rng):
    e = random_google(rng, 6, 1.0).entries
    np.testing.assert_allclose(google_matrix(e, 0.0).entries, 1 / 6, atol=1e-15)
    np.testing.assert_array_equal(google_matrix(e, 1.0).entries, e)


@pytest.mark.parametrize("alpha", [-0.1, 1.2])
def test_google_bad_alpha(alpha):
    with pytest.raises(ParameterError):
        google_matrix(np.eye(2), alpha)


@pytest.mark.parametrize("alpha", [0.0, 0.25, 0.85, 1.0])
def test_google_invariants_on_generated_graph(alpha):
    g = generate_scale_free(64, seed=2)
    G = google_from_graph(g, alpha)
    assert np.all(np.abs(G.entries.sum(axis=0) - 1) < 1e-12)
    assert np.all(G.entries >= 0)
    if alpha < 1:
        assert G.entries.min() >= (1 - alpha) / 64 - 1e-15
    np.testing.assert_allclose(G.entries, google_dense(g.edges, g.n, alpha), atol=1e-15)


def test_pagerank_two_node(g2):
    # p1 / p0 = 0.925 / 0.5
    expected = np.array([1.0, 1.85]) / 2.85
    p = classical_pagerank(g2)
    np.testing.assert_allclose(p, expected, atol=1e-9)
    assert np.abs(g2.entries @ p - p).sum() <= 1e-10


def test_pagerank_uniform_at_alpha_zero(rng):
    G = google_matrix(random_google(rng, 9).entries, 0.0)
    np.testing.assert_allclose(classical_pagerank(G), 1 / 9, atol=1e-12)


def test_pagerank_independent_of_start(rng):
    G = random_google(rng, 12, 0.85)
    p1 = classical_pagerank(G)
    p2 = classical_pagerank(G, start=rng.random(12))
    assert np.abs(p1 - p2).sum() <= 10 * 1e-10


def test_pagerank_hubs_and_degenerate_residuals():
    g = generate_scale_free(32, seed=3)
    p = classical_pagerank(google_from_graph(g, 0.85))
    indeg = g.in_degree()
    residual = p[indeg == 0]
    assert np.ptp(residual) < 1e-15
    assert p[indeg > 0].min() > residual[0]
    assert residual[0] == pytest.approx(p.min())


def test_pagerank_nonconvergence():
    G = google_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]), 1.0)
    with pytest.raises(ConvergenceError) as exc:
        classical_pagerank(G, start=np.array([1.0, 0.0]), max_iter=50)
    assert exc.value.residual > 1
