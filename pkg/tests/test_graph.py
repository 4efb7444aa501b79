import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphon_centrality import centrality as cent
from graphon_centrality import graph, numerics, presets, sampling
from graphon_centrality.errors import DomainError

TRIANGLE = np.ones((3, 3)) - np.eye(3)
PATH4 = np.diag(np.ones(3), 1) + np.diag(np.ones(3), -1)


def random_graph(n, seed, p=0.5):
    r = np.random.default_rng(seed)
    A = np.triu((r.random((n, n)) < p).astype(float), 1)
    return A + A.T


def test_degree_examples():
    np.testing.assert_array_equal(graph.degree(TRIANGLE).values, [2, 2, 2])
    np.testing.assert_array_equal(graph.degree(np.zeros((4, 4))).values, np.zeros(4))


def test_degree_of_constant_probability_matrix():
    P = sampling.probability_matrix(presets.constant_kernel(0.3), sampling.make_latents(8))
    np.testing.assert_allclose(graph.degree(graph.rescale(P, "over_N")).values, P.sum(axis=1) / 8, rtol=1e-15)


@pytest.mark.parametrize("n", [2, 5, 30])
def test_eigenvector_complete_graph(n):
    c = graph.eigenvector(np.ones((n, n)) - np.eye(n))
    np.testing.assert_allclose(c.values, 1.0, atol=1e-12)


def test_eigenvector_single_node():
    assert graph.eigenvector([[0.0]]).values.tolist() == [1.0]


def test_eigenvector_disconnected_flag():
    A = np.zeros((4, 4))
    A[0, 1] = A[1, 0] = A[2, 3] = A[3, 2] = 1
    c = graph.eigenvector(A)
    assert c.meta["degenerate"]
    assert np.linalg.norm(c.values) == pytest.approx(2.0)


def test_katz_examples():
    np.testing.assert_allclose(graph.katz(TRIANGLE, 0.25).values, [2, 2, 2], atol=1e-14)
    np.testing.assert_allclose(graph.katz(TRIANGLE, 1e-12).values, 1.0, atol=1e-11)
    series = numerics.neumann_apply(PATH4, 0.2, np.ones(4), 1000)
    np.testing.assert_allclose(graph.katz(PATH4, 0.2).values, series, atol=1e-10)


def test_katz_domain_error_names_lambda():
    with pytest.raises(DomainError, match="lambda1=2"):
        graph.katz(TRIANGLE, 0.5)


def test_pagerank_isolated_nodes():
    A = np.zeros((3, 3))
    A[0, 1] = A[1, 0] = 1
    c = graph.pagerank(A, 0.85)
    assert c.meta["isolated"] == 1
    assert c.values[2] == pytest.approx(0.15)


def test_rescale_examples():
    np.testing.assert_array_equal(graph.rescale(np.ones((4, 4)), "over_N"), np.full((4, 4), 0.25))
    S = random_graph(10, 1)
    assert set(np.unique(graph.rescale(S, "over_N_kappa", 0.1))) <= {0.0, 1.0}
    with pytest.raises(DomainError):
        graph.rescale(S, "bogus")


def test_embed_step():
    f = graph.embed_step([1.0, 2.0])
    np.testing.assert_array_equal(f.rep.boundaries, [0, 0.5, 1])
    np.testing.assert_array_equal(f.values, [1, 2])
    assert cent.l2_norm(graph.embed_step(np.full(7, -3.0))) == pytest.approx(3.0)


def test_aligned_sbm_degree_embeds_exactly(sbm):
    P = sampling.probability_matrix(sbm, sampling.make_latents(10))
    emb = graph.embed_step(graph.degree(graph.rescale(P, "over_N")))
    ref = cent.sbm_centrality(sbm, "degree")
    assert cent.l2_distance(emb, ref) <= 1e-15


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2**32 - 1))
def test_permutation_equivariance(n, seed):
    A = random_graph(n, seed, 0.6)
    pi = np.random.default_rng(seed + 1).permutation(n)
    Ap = A[np.ix_(pi, pi)]
    np.testing.assert_array_equal(graph.degree(Ap).values, graph.degree(A).values[pi])
    np.testing.assert_allclose(graph.pagerank(Ap, 0.85).values, graph.pagerank(A, 0.85).values[pi], atol=1e-12)
    if A.any():
        lam = numerics.sym_eig(A, top=1).eigenvalues[0]
        c = graph.katz(A, 0.5 / lam).values
        np.testing.assert_allclose(graph.katz(Ap, 0.5 / lam).values, c[pi], atol=1e-12)
        e = graph.eigenvector(A)
        if not e.meta["degenerate"] and e.meta["gap"] > 1e-6:
            np.testing.assert_allclose(graph.eigenvector(Ap).values, e.values[pi], atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_eigenvector_norm(n, seed):
    A = random_graph(n, seed, 0.7)
    assert abs(np.linalg.norm(graph.eigenvector(A).values) - np.sqrt(n)) <= 1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32 - 1), st.floats(0.05, 0.95))
def test_pagerank_mass(n, seed, beta):
    A = random_graph(n, seed, 0.6) + np.eye(n)
    assert abs(graph.pagerank(A, beta).values.sum() - n) <= 1e-9 * n


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2**32 - 1))
def test_katz_first_order_in_alpha(n, seed):
    A = random_graph(n, seed, 0.5)
    if not A.any():
        return
    lam = numerics.sym_eig(A, top=1).eigenvalues[0]
    deg = graph.degree(A).values
    for frac in (1e-3, 1e-2, 1e-1):
        alpha = frac / lam
        k = graph.katz(A, alpha).values
        # remainder sum_{k>=2} alpha^k A^k 1 is bounded by sqrt(n) (alpha lam)^2 / (1 - alpha lam)
        assert np.max(np.abs(k - 1 - alpha * deg)) <= np.sqrt(n) * frac ** 2 / (1 - frac) + 1e-12


def test_input_validation():
    with pytest.raises(DomainError):
        graph.degree(np.ones((2, 3)))
    with pytest.raises(DomainError):
        graph.degree(-np.ones((2, 2)))
    with pytest.raises(DomainError):
        graph.graph_centrality(TRIANGLE, "closeness")
