"""Consensus filters, signal simulation, covariance, template estimation,
and the binary matrix format."""

import numpy as np
import pytest

from helpers import complete_graph, empty_graph

from graphonlap import graphon
from graphonlap.errors import InvalidFilterError
from graphonlap.graphs import laplacian, spectrum
from graphonlap.signals import (
    ConsensusFilter,
    SpectralTemplates,
    apply_filter,
    default_consensus_filter,
    estimate_templates,
    exact_covariance,
    exact_templates,
    generate_signals,
    load_matrix,
    save_matrix,
    templates_from_covariance,
    templates_from_noisy_adjacency,
)


def test_filter_validation():
    with pytest.raises(ValueError):
        ConsensusFilter(())
    with pytest.raises(ValueError):
        ConsensusFilter((0.0,))
    with pytest.raises(ValueError):
        ConsensusFilter((0.2, -0.1))
    f = ConsensusFilter((0.2, 0.1))
    assert f.order == 2


def test_filter_bound_enforced_at_application():
    lap = laplacian(complete_graph(3))  # lambda_max = 3
    with pytest.raises(InvalidFilterError):
        apply_filter(ConsensusFilter((0.5,)), lap, np.ones(3))
    # alpha = 1/lambda_max is allowed (closed interval)
    apply_filter(ConsensusFilter((1.0 / 3.0,)), lap, np.ones(3))


def test_zero_laplacian_filter_is_identity():
    lap = laplacian(empty_graph(4))
    w = np.array([1.0, -2.0, 3.0, 0.5])
    y = apply_filter(ConsensusFilter((0.7, 0.3)), lap, w)
    assert np.array_equal(y, w)


def test_all_ones_vector_is_invariant():
    lap = laplacian(complete_graph(5))
    ones = np.ones(5)
    y = apply_filter(ConsensusFilter((0.1, 0.05)), lap, ones)
    assert np.allclose(y, ones, atol=1e-12)


def test_filter_against_dense_oracle_on_k3():
    lap = laplacian(complete_graph(3))
    e1 = np.array([1.0, 0.0, 0.0])
    y = apply_filter(ConsensusFilter((0.2,)), lap, e1)
    dense = np.eye(3) - 0.2 * lap.matrix
    assert np.allclose(y, dense @ e1, atol=1e-12)
    spec = spectrum(lap)
    h = np.array([1.0, 0.4, 0.4])  # h(0)=1, h(3)=0.4
    oracle = (spec.eigenvectors * h) @ spec.eigenvectors.T @ e1
    assert np.allclose(y, oracle, atol=1e-9)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_filter_matches_eigendecomposition_evaluation(seed):
    g = graphon.sample_graph(graphon.quadratic_sum(0.7), 15, seed=seed)
    lap = laplacian(g)
    filt = default_consensus_filter(lap)
    spec = spectrum(lap)
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(15)
    direct = apply_filter(filt, lap, w)
    h = filt.response(spec.eigenvalues)
    via_eig = (spec.eigenvectors * h) @ (spec.eigenvectors.T @ w)
    assert np.abs(direct - via_eig).max() <= 1e-8


def test_filter_response_nonnegative_nonincreasing_on_spectrum():
    g = graphon.sample_graph(graphon.quadratic_sum(0.7), 20, seed=3)
    lap = laplacian(g)
    filt = default_consensus_filter(lap)
    h = filt.response(spectrum(lap).eigenvalues)
    assert np.all(h >= 0.0)
    assert np.all(np.diff(h) <= 1e-12)


def test_generate_signals_zero_laplacian_returns_raw_gaussians():
    lap = laplacian(empty_graph(6))
    y = generate_signals(ConsensusFilter((0.4,)), lap, 10, seed=21)
    raw = np.random.default_rng(21).standard_normal((6, 10))
    assert np.array_equal(y, raw)
    with pytest.raises(ValueError):
        generate_signals(ConsensusFilter((0.4,)), lap, 0, seed=1)


def test_signal_sample_mean_is_near_zero():
    g = graphon.sample_graph(graphon.quadratic_sum(0.7), 5, seed=9)
    lap = laplacian(g)
    m = 100_000
    y = generate_signals(default_consensus_filter(lap), lap, m, seed=2)
    assert np.abs(y.mean(axis=1)).max() < 4.0 / np.sqrt(m)


def test_exact_covariance_identity_for_zero_laplacian():
    lap = laplacian(empty_graph(4))
    assert np.allclose(exact_covariance(ConsensusFilter((0.9,)), lap), np.eye(4), atol=1e-12)


def test_exact_covariance_k3_eigenvalues_and_commutation():
    lap = laplacian(complete_graph(3))
    cov = exact_covariance(ConsensusFilter((0.2,)), lap)
    vals = np.linalg.eigvalsh(cov)
    assert np.allclose(np.sort(vals), [0.16, 0.16, 1.0], atol=1e-9)
    assert np.linalg.norm(cov @ lap.matrix - lap.matrix @ cov) <= 1e-8


def test_sample_covariance_converges_to_exact():
    g = graphon.sample_graph(graphon.quadratic_sum(0.7), 12, seed=4)
    lap = laplacian(g)
    filt = default_consensus_filter(lap)
    target = exact_covariance(filt, lap)
    tnorm = np.linalg.norm(target)
    errs = []
    for m in (100, 1000, 10_000):
        per_seed = []
        for seed in range(10):
            y = generate_signals(filt, lap, m, seed=seed)
            per_seed.append(np.linalg.norm(y @ y.T / m - target) / tnorm)
        errs.append(np.mean(per_seed))
    assert errs[0] > errs[1] > errs[2]


def test_estimate_templates_orthonormal_even_rank_deficient():
    rng = np.random.default_rng(0)
    y = rng.standard_normal((8, 3))  # m < n
    templ = estimate_templates(y)
    assert np.abs(templ.vectors.T @ templ.vectors - np.eye(8)).max() <= 1e-8
    assert templ.source == "sample_covariance(m=3)"


def test_templates_from_exact_covariance_k3():
    lap = laplacian(complete_graph(3))
    cov = exact_covariance(ConsensusFilter((0.2,)), lap)
    templ = templates_from_covariance(cov)
    assert np.allclose(templ.vectors[:, 0], np.ones(3) / np.sqrt(3.0), atol=1e-9)


def test_template_alignment_improves_with_m():
    w = graphon.quadratic_sum(0.7)
    n = 40
    mis = {m: [] for m in (50, 500, 5000)}
    for seed in range(20):
        g = graphon.sample_graph(w, n, seed=seed)
        lap = laplacian(g)
        filt = default_consensus_filter(lap)
        v_true = spectrum(lap).eigenvectors
        for m in mis:
            y = generate_signals(filt, lap, m, seed=1000 + seed)
            v_hat = estimate_templates(y).vectors
            align = [min(np.linalg.norm(v_hat[:, i] - v_true[:, i]),
                         np.linalg.norm(v_hat[:, i] + v_true[:, i])) for i in range(n)]
            mis[m].append(np.mean(align))
    means = [np.mean(mis[m]) for m in (50, 500, 5000)]
    assert means[0] > means[1] > means[2]


def test_noisy_adjacency_templates_sigma_zero_exact():
    g = complete_graph(3)
    lap = laplacian(g)
    templ = templates_from_noisy_adjacency(g, 0.0, seed=0)
    assert np.allclose(templ.vectors, spectrum(lap).eigenvectors, atol=1e-12)
    assert np.allclose(np.abs(templ.vectors[:, 0]), 1.0 / np.sqrt(3.0), atol=1e-12)


def test_noisy_adjacency_subspace_distance_grows_with_sigma():
    g = graphon.sample_graph(graphon.quadratic_sum(0.7), 25, seed=6)
    v_true = spectrum(laplacian(g)).eigenvectors
    dist = {}
    for sigma in (0.05, 0.1, 0.2):
        per_seed = []
        for seed in range(20):
            v_hat = templates_from_noisy_adjacency(g, sigma, seed=seed).vectors
            per_seed.append(np.linalg.norm(v_hat @ v_hat.T - v_true @ v_true.T) +
                            np.mean([min(np.linalg.norm(v_hat[:, i] - v_true[:, i]),
                                         np.linalg.norm(v_hat[:, i] + v_true[:, i]))
                                     for i in range(25)]))
        dist[sigma] = np.mean(per_seed)
    assert dist[0.05] < dist[0.1] < dist[0.2]


def test_spectral_templates_validation():
    with pytest.raises(ValueError):
        SpectralTemplates(np.ones((3, 3)), source="bad")
    templ = exact_templates(laplacian(complete_graph(4)))
    assert templ.n == 4 and templ.source == "exact"


def test_matrix_io_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    m = rng.standard_normal((7, 3))
    path = tmp_path / "mat.bin"
    save_matrix(path, m)
    assert path.stat().st_size == 16 + 7 * 3 * 8
    back = load_matrix(path)
    assert np.array_equal(back, m)


def test_matrix_io_errors(tmp_path):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"NOTMAGIC" + b"\x00" * 8)
    with pytest.raises(ValueError):
        load_matrix(bad)
    trunc = tmp_path / "trunc.bin"
    save_matrix(trunc, np.ones((4, 4)))
    trunc.write_bytes(trunc.read_bytes()[:-8])
    with pytest.raises(ValueError):
        load_matrix(trunc)
