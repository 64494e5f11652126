"""Graph construction, normalization, and the modularity operator."""

import numpy as np
import pytest

from modembed import datasets, graph

from conftest import dense_masses, dense_modularity, graph_from, random_edges


def test_karate_shape_and_mass(karate):
    assert karate.n == 34
    assert karate.nnz == 156  # 78 undirected edges, mirrored
    assert abs(karate.total_mass - 1.0) < 1e-12
    # Node 0 has degree 16 out of 2*78 endpoint slots.
    assert abs(karate.marginal[karate.index_of(0)] - 16.0 / 156.0) < 1e-12


def test_karate_matches_dense_oracle(karate, karate_dense):
    pi = karate_dense.sum(axis=1)
    assert np.abs(karate.marginal - pi).max() < 1e-15
    for u in range(34):
        for w in range(34):
            assert abs(karate.pair_mass(u, w) - karate_dense[u, w]) < 1e-15


def test_pair_mass_symmetric(karate):
    rng = np.random.default_rng(3)
    for _ in range(200):
        u, w = rng.integers(0, karate.n, size=2)
        assert karate.pair_mass(int(u), int(w)) == karate.pair_mass(int(w), int(u))


def test_random_graphs_match_dense_oracle():
    """P, marginals, apply(), and row sums against the dense rebuild."""
    rng = np.random.default_rng(42)
    for trial in range(20):
        n = int(rng.integers(5, 60))
        edges = random_edges(rng, n, weighted=trial % 2 == 1,
                             self_loops=trial % 3 == 0)
        g = graph_from(edges, n)
        P = dense_masses(edges, n)
        Qd = dense_modularity(P)

        assert abs(g.total_mass - 1.0) < 1e-12
        assert np.abs(g.marginal - P.sum(axis=1)).max() < 1e-14
        assert np.abs(g.diag_mass - np.diag(P)).max() < 1e-15

        Q = g.modularity_matrix()
        H = rng.standard_normal((n, 4))
        assert np.abs(Q.apply(H) - Qd @ H).max() < 1e-12
        Qz = Q.zero_diagonal()
        Qdz = dense_modularity(P, zero_diag=True)
        assert np.abs(Qz.apply(H) - Qdz @ H).max() < 1e-12

        # Zero row sums: Q applied to the ones vector vanishes.
        assert np.abs(Q.apply(np.ones(n))).max() < 1e-12
        assert abs(Q.trace() - np.trace(Qd)) < 1e-14


def test_apply_one_dimensional(karate, karate_dense):
    Q = karate.modularity_matrix()
    x = np.random.default_rng(0).standard_normal(34)
    got = Q.apply(x)
    want = dense_modularity(karate_dense) @ x
    assert got.shape == (34,)
    assert np.abs(got - want).max() < 1e-14


def test_covariance_entries(karate, karate_dense):
    Q = karate.modularity_matrix()
    Qd = dense_modularity(karate_dense)
    for u, w in ((0, 1), (5, 5), (33, 2), (12, 30)):
        assert abs(Q.covariance(u, w) - Qd[u, w]) < 1e-15


def test_row_covariance_matches_dense():
    rng = np.random.default_rng(7)
    n = 30
    edges = random_edges(rng, n, weighted=True, self_loops=True)
    g = graph_from(edges, n)
    Qdz = dense_modularity(dense_masses(edges, n), zero_diag=True)
    Q = g.modularity_matrix(diag_zeroed=True)
    H = rng.random((n, 5))
    agg = Q.make_aggregate(H)
    for u in range(n):
        z = Q.row_covariance(H, agg, u)
        assert np.abs(z - Qdz[u] @ H).max() < 1e-13


def test_partition_modularity_vs_brute():
    rng = np.random.default_rng(11)
    n = 25
    edges = random_edges(rng, n, weighted=True, self_loops=True)
    g = graph_from(edges, n)
    Qd = dense_modularity(dense_masses(edges, n))
    Q = g.modularity_matrix()
    for k in (1, 2, 5):
        part = rng.integers(0, k, size=n)
        brute = sum(Qd[np.ix_(part == c, part == c)].sum() for c in range(k))
        assert abs(Q.partition_modularity(part) - brute) < 1e-14


def test_self_loop_becomes_diagonal_mass():
    g = graph.from_edge_list([(0, 1, 2.0), (1, 1, 1.0)])
    # W = 3: p(0,1) = p(1,0) = 2/6, p(1,1) = 1/3.
    assert abs(g.pair_mass(0, 1) - 2.0 / 6.0) < 1e-15
    assert abs(g.diag_mass[g.index_of(1)] - 1.0 / 3.0) < 1e-15
    assert abs(g.total_mass - 1.0) < 1e-15


def test_directed_duplicates_sum():
    g = graph.from_edge_list([(0, 1, 1.0), (1, 0, 3.0)])
    assert abs(g.pair_mass(0, 1) - 0.5) < 1e-15


def test_isolated_node_has_zero_marginal():
    g = graph.from_edge_list([(0, 1)], nodes=[0, 1, 2])
    assert g.n == 3
    assert g.marginal[g.index_of(2)] == 0.0
    Q = g.modularity_matrix()
    assert np.abs(Q.apply(np.ones(3))).max() < 1e-15


def test_edge_list_validation():
    with pytest.raises(ValueError, match="invalid weight"):
        graph.from_edge_list([(0, 1, -1.0)])
    with pytest.raises(ValueError, match="invalid weight"):
        graph.from_edge_list([(0, 1, float("nan"))])
    with pytest.raises(ValueError, match="empty graph"):
        graph.from_edge_list([])
    with pytest.raises(ValueError, match="empty graph"):
        graph.from_edge_list([(0, 1, 0.0)])


def test_label_lookup(karate):
    assert karate.label_of(karate.index_of(33)) == 33
    with pytest.raises(KeyError):
        karate.index_of("nope")


def test_from_similarity_hand_case():
    sim = np.array([[0.0, 2.0], [2.0, 0.0]])
    g = graph.from_similarity(sim)
    assert abs(g.pair_mass(0, 1) - 0.5) < 1e-15
    assert g.diag_mass.sum() == 0.0


def test_from_similarity_symmetrizes():
    sim = np.array([[0.0, 4.0], [0.0, 0.0]])
    g = graph.from_similarity(sim)
    assert abs(g.pair_mass(0, 1) - 0.5) < 1e-15


def test_from_similarity_rejects_constant():
    with pytest.raises(ValueError, match="degenerate similarity"):
        graph.from_similarity(np.ones((3, 3)))


def test_from_bivariate_validation():
    ok = np.full((2, 2), 0.25)
    graph.from_bivariate(ok)
    with pytest.raises(ValueError, match="symmetric"):
        graph.from_bivariate(np.array([[0.2, 0.1], [0.3, 0.4]]))
    with pytest.raises(ValueError, match="sums to"):
        graph.from_bivariate(ok * 2.0)
    bad = np.array([[0.6, -0.1], [-0.1, 0.6]])
    with pytest.raises(ValueError, match="negative"):
        graph.from_bivariate(bad)


def test_edge_list_roundtrip(tmp_path, karate):
    """Save/load preserves the distribution keyed by node label."""
    path = tmp_path / "karate.tsv"
    graph.save_edge_list(path, karate)
    back = graph.load_edge_list(path)
    assert back.n == karate.n
    for u, w in datasets.karate_club_edges():
        a = karate.pair_mass(karate.index_of(u), karate.index_of(w))
        b = back.pair_mass(back.index_of(str(u)), back.index_of(str(w)))
        assert abs(a - b) < 1e-15


def test_load_edge_list_comments_and_weights(tmp_path):
    path = tmp_path / "g.tsv"
    path.write_text("# header\na b 2.0\n\nb c\n")
    g = graph.load_edge_list(path)
    assert g.n == 3
    assert abs(g.pair_mass(g.index_of("a"), g.index_of("b")) - 2.0 / 6.0) < 1e-15


def test_load_edge_list_rejects_garbage(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("a b c d e\n")
    with pytest.raises(ValueError):
        graph.load_edge_list(path)


def test_edges_iteration(karate):
    pairs = karate.edges()
    assert len(pairs) == 78
    assert all(u < w for u, w in pairs)
