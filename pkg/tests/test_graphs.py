"""Graph containers, spectra, subgraphs, degree functions, the recovery
metric, and the edge-list reader."""

import numpy as np
import pytest

from helpers import complete_graph, empty_graph, path_graph, star_graph

from graphonlap import graphon
from graphonlap.errors import DatasetError, DegenerateInputError
from graphonlap.graphs import (
    Graph,
    LaplacianMatrix,
    empirical_degree_function,
    induced_subgraph,
    laplacian,
    laplacian_cone_violations,
    perturb_adjacency,
    read_edge_list,
    recovery_error,
    spectrum,
)
from graphonlap.solver import laplacian_from_weights


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph(np.array([[0.0, 1.0], [0.0, 0.0]]))  # not symmetric
    with pytest.raises(ValueError):
        Graph(np.array([[1.0]]))  # self-loop
    with pytest.raises(ValueError):
        Graph(np.zeros((2, 3)))
    g = Graph(np.zeros((1, 1)))
    assert g.n == 1


def test_laplacian_k3():
    lap = laplacian(complete_graph(3)).matrix
    assert np.array_equal(np.diag(lap), [2.0, 2.0, 2.0])
    off = lap - np.diag(np.diag(lap))
    assert np.all(off[~np.eye(3, dtype=bool)] == -1.0)


def test_laplacian_empty():
    assert not laplacian(empty_graph(3)).matrix.any()


def test_p3_spectrum_matches_characteristic_polynomial():
    # oracle: roots of det(L - t I) = -t^3 + 4 t^2 - 3 t for the 3-path
    roots = np.sort(np.roots([-1.0, 4.0, -3.0, 0.0]).real)
    spec = spectrum(laplacian(path_graph(3)))
    assert np.allclose(spec.eigenvalues, roots, atol=1e-9)
    assert np.allclose(spec.eigenvalues, [0.0, 1.0, 3.0], atol=1e-9)
    assert np.allclose(spec.eigenvectors[:, 0], np.ones(3) / np.sqrt(3.0), atol=1e-9)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_complete_graph_spectrum(n):
    spec = spectrum(laplacian(complete_graph(n)))
    expected = np.concatenate([[0.0], np.full(n - 1, float(n))])
    assert np.allclose(spec.eigenvalues, expected, atol=1e-9)


def test_zero_matrix_spectrum():
    spec = spectrum(LaplacianMatrix(np.zeros((4, 4))))
    assert np.allclose(spec.eigenvalues, 0.0)


def test_spectrum_rejects_asymmetric():
    m = np.array([[0.0, 1.0], [0.5, 0.0]])
    with pytest.raises(ValueError):
        spectrum(m)


def test_spectrum_invariants_on_sampled_graph():
    g = graphon.sample_graph(graphon.quadratic_sum(0.7), 30, seed=1)
    lap = laplacian(g)
    spec = spectrum(lap)
    v = spec.eigenvectors
    assert np.abs(v.T @ v - np.eye(30)).max() <= 1e-8
    recon = (v * spec.eigenvalues) @ v.T
    assert np.linalg.norm(recon - lap.matrix) <= 1e-7 * np.linalg.norm(lap.matrix)
    # sign convention: largest-magnitude entry of each column is positive
    idx = np.argmax(np.abs(v), axis=0)
    assert np.all(v[idx, np.arange(30)] > 0)
    # connected dense sample: lambda_1 ~ 0 with constant eigenvector
    assert spec.eigenvalues[0] <= 1e-8
    if spec.eigenvalues[1] > 1e-6:
        assert np.allclose(np.abs(v[:, 0]), 1.0 / np.sqrt(30), atol=1e-8)


def test_induced_subgraph_full_and_single():
    g = graphon.sample_graph(graphon.constant(0.5), 12, seed=4)
    same = induced_subgraph(g, 12, seed=9)
    assert np.array_equal(same.adjacency, g.adjacency)
    single = induced_subgraph(g, 1, seed=9)
    assert single.n == 1 and not single.adjacency.any()
    with pytest.raises(ValueError):
        induced_subgraph(g, 13, seed=0)
    with pytest.raises(ValueError):
        induced_subgraph(g, 0, seed=0)


def test_induced_subgraph_of_complete_is_complete():
    g = complete_graph(5)
    for seed in range(10):
        sub = induced_subgraph(g, 3, seed)
        assert np.array_equal(sub.adjacency, complete_graph(3).adjacency)


def test_empirical_degree_function_examples():
    assert np.allclose(empirical_degree_function(complete_graph(4), 4).values, 0.75)
    assert not empirical_degree_function(empty_graph(5), 4).values.any()
    prior = empirical_degree_function(star_graph(3), 4)
    assert np.allclose(prior.values, [0.25, 0.25, 0.25, 0.75])


def test_empirical_degree_function_identity_grid():
    g = graphon.sample_graph(graphon.quadratic_sum(0.7), 23, seed=8)
    prior = empirical_degree_function(g, 23)
    assert np.allclose(prior.values, np.sort(g.degrees()) / 23)


def test_recovery_error_properties():
    lap = laplacian(path_graph(4)).matrix
    other = laplacian(star_graph(3)).matrix
    assert recovery_error(lap, lap) == 0.0
    assert abs(recovery_error(2.0 * lap, lap)) <= 1e-12
    assert abs(recovery_error(-lap, lap) - 2.0) <= 1e-12
    assert abs(recovery_error(lap, other) - recovery_error(other, lap)) <= 1e-15
    # invariance to positive rescaling of either argument, to 1e-12
    assert abs(recovery_error(3.7 * lap, other) - recovery_error(lap, other)) <= 1e-12
    assert abs(recovery_error(lap, 0.004 * other) - recovery_error(lap, other)) <= 1e-12
    with pytest.raises(DegenerateInputError):
        recovery_error(np.zeros_like(lap), lap)
    with pytest.raises(ValueError):
        recovery_error(lap, other[:3, :3])


def test_perturb_adjacency_structure():
    g = graphon.sample_graph(graphon.constant(0.5), 20, seed=0)
    same = perturb_adjacency(g, 0.0, seed=5)
    assert np.array_equal(same.adjacency, g.adjacency)
    noisy = perturb_adjacency(g, 0.1, seed=5)
    a = noisy.adjacency
    assert np.array_equal(a, a.T)
    assert not np.diag(a).any()
    again = perturb_adjacency(g, 0.1, seed=5)
    assert np.array_equal(a, again.adjacency)
    with pytest.raises(ValueError):
        perturb_adjacency(g, -0.1, seed=0)


def test_perturbation_moments_match_sigma():
    # sample-moment oracle over >= 1e4 off-diagonal entries
    n, sigma = 142, 0.3
    g = empty_graph(n)
    rows, cols = np.triu_indices(n, 1)
    assert rows.size >= 10_000
    noise = perturb_adjacency(g, sigma, seed=11).adjacency[rows, cols]
    assert abs(noise.std(ddof=1) - sigma) < 0.05 * sigma


def test_elementwise_l1_equals_twice_trace_on_valid_laplacians():
    rng = np.random.default_rng(123)
    for k in range(100):
        n = int(rng.integers(2, 30))
        w = rng.uniform(0.0, 2.0, n * (n - 1) // 2) * (rng.random(n * (n - 1) // 2) < 0.6)
        lap = laplacian_from_weights(w, n)
        l11 = np.abs(lap).sum()
        tr = np.trace(lap)
        assert abs(l11 - 2.0 * tr) <= 1e-9 * max(1.0, abs(tr))
        viol = laplacian_cone_violations(lap)
        assert viol["max_offdiag"] <= 0.0
        assert viol["max_abs_row_sum"] <= 1e-9 * n


def test_laplacian_matrix_validation():
    with pytest.raises(ValueError):
        LaplacianMatrix(np.eye(3))  # nonzero row sums
    lap = LaplacianMatrix(laplacian(path_graph(3)).matrix)
    assert lap.n == 3


def test_read_edge_list(tmp_path):
    p = tmp_path / "toy.edges"
    p.write_text(
        "# comment\n"
        "% another comment\n"
        "1 2\n"
        "2 1 5.0\n"
        "2 3 2.5\n"
        "3 3\n"
        "\n"
        "4 1 0.5\n"
    )
    g = read_edge_list(p)
    assert g.n == 4
    assert g.edge_count() == 3
    assert set(np.unique(g.adjacency)) == {0.0, 1.0}
    gw = read_edge_list(p, weighted=True)
    # duplicate (1,2)/(2,1) keeps the larger weight regardless of order
    assert gw.adjacency[0, 1] == 5.0
    assert gw.adjacency[1, 2] == 2.5
    g0 = read_edge_list(p, one_indexed=False)
    assert g0.n == 5


def test_read_edge_list_errors(tmp_path):
    with pytest.raises(DatasetError):
        read_edge_list(tmp_path / "missing.edges")
    bad = tmp_path / "bad.edges"
    bad.write_text("1 2 3 4\n")
    with pytest.raises(DatasetError):
        read_edge_list(bad)
    nonint = tmp_path / "nonint.edges"
    nonint.write_text("a b\n")
    with pytest.raises(DatasetError):
        read_edge_list(nonint)
    zero_in_one_indexed = tmp_path / "zero.edges"
    zero_in_one_indexed.write_text("0 1\n")
    with pytest.raises(DatasetError):
        read_edge_list(zero_in_one_indexed, one_indexed=True)
    comment_only = tmp_path / "empty.edges"
    comment_only.write_text("# nothing\n")
    with pytest.raises(DatasetError):
        read_edge_list(comment_only)
