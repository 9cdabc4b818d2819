"""Consensus-filtered graph signals, covariance estimation, and ordered
spectral templates.

Signals follow y = prod_k (I - alpha_k L) w with w standard normal, so
their covariance shares the Laplacian's eigenvectors and its eigenvalues
are a monotonically decreasing function of the Laplacian's.  Sorting the
covariance eigenbasis by descending eigenvalue therefore aligns it with
the ascending Laplacian spectrum.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import InvalidFilterError
from .graphs import (
    Graph,
    LaplacianMatrix,
    fix_eigenvector_signs,
    laplacian,
    perturb_adjacency,
    spectrum,
)

_MATRIX_MAGIC = b"GLAPMAT1"
_HEADER = struct.Struct("<8sII")  # magic, rows, cols (little-endian)


@dataclass(frozen=True)
class ConsensusFilter:
    """Product-form graph filter prod_k (I - alpha_k L), order T >= 1.

    Coefficients must be positive; the upper bound alpha_k <= 1/lambda_max
    depends on the Laplacian and is checked at application time so the
    filter response stays nonnegative and decreasing on the spectrum.
    """

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(float(a) for a in np.atleast_1d(self.coefficients))
        if len(coeffs) < 1:
            raise ValueError("filter needs at least one coefficient")
        if any(a <= 0.0 for a in coeffs):
            raise ValueError("filter coefficients must be positive")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def response(self, eigenvalues: np.ndarray) -> np.ndarray:
        """Scalar response h(lambda) = prod_k (1 - alpha_k lambda)."""
        lam = np.asarray(eigenvalues, dtype=float)
        out = np.ones_like(lam)
        for a in self.coefficients:
            out = out * (1.0 - a * lam)
        return out


@dataclass(frozen=True)
class SpectralTemplates:
    """Orthonormal approximate eigenbasis, column i aligned with the i-th
    smallest Laplacian eigenvalue."""

    vectors: np.ndarray
    source: str

    def __post_init__(self):
        v = np.array(self.vectors, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"templates must be square, got shape {v.shape}")
        gram_err = np.abs(v.T @ v - np.eye(v.shape[0])).max()
        if gram_err > 1e-8:
            raise ValueError(f"template columns not orthonormal (error {gram_err:.2e})")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]


def _check_filter_bound(f: ConsensusFilter, l: LaplacianMatrix) -> None:
    lam_max = float(np.linalg.eigvalsh(l.matrix)[-1])
    if lam_max <= 0.0:
        return
    bound = 1.0 / lam_max
    worst = max(f.coefficients)
    if worst > bound * (1.0 + 1e-12):
        raise InvalidFilterError(
            f"coefficient {worst} exceeds 1/lambda_max = {bound:.6g}; "
            "the filter response would lose monotone nonnegativity"
        )


def apply_filter(f: ConsensusFilter, l: LaplacianMatrix, w: np.ndarray) -> np.ndarray:
    """Apply prod_k (I - alpha_k L) to a vector (or each column of a
    matrix) by successive products with L; the dense filter matrix is
    never formed."""
    _check_filter_bound(f, l)
    y = np.asarray(w, dtype=float).copy()
    for a in f.coefficients:
        y = y - a * (l.matrix @ y)
    return y


def generate_signals(f: ConsensusFilter, l: LaplacianMatrix, m: int, seed: int) -> np.ndarray:
    """m filtered standard-normal inputs as the columns of an n x m matrix."""
    if m < 1:
        raise ValueError(f"need at least one signal, got m={m}")
    rng = np.random.default_rng(seed)
    w = rng.standard_normal((l.n, m))
    return apply_filter(f, l, w)


def exact_covariance(f: ConsensusFilter, l: LaplacianMatrix) -> np.ndarray:
    """Population covariance of the filtered signals: the squared filter
    applied to the Laplacian."""
    _check_filter_bound(f, l)
    spec = spectrum(l)
    h2 = f.response(spec.eigenvalues) ** 2
    return (spec.eigenvectors * h2) @ spec.eigenvectors.T


def estimate_templates(signals: np.ndarray) -> SpectralTemplates:
    """Spectral templates from the sample covariance of observed signals.

    The covariance is Y Y^T / m (signals are zero-mean by construction, so
    no mean subtraction and no m-1 correction).  Columns are ordered by
    descending covariance eigenvalue, which aligns them with ascending
    Laplacian eigenvalues.
    """
    y = np.asarray(signals, dtype=float)
    if y.ndim != 2 or y.shape[1] < 1:
        raise ValueError(f"signals must be an n x m matrix, got shape {y.shape}")
    m = y.shape[1]
    cov = (y @ y.T) / m
    _, vecs = np.linalg.eigh(cov)
    vecs = vecs[:, ::-1]
    return SpectralTemplates(fix_eigenvector_signs(vecs), source=f"sample_covariance(m={m})")


def templates_from_covariance(cov: np.ndarray) -> SpectralTemplates:
    """Templates from an explicitly given covariance matrix (the
    infinite-sample shortcut)."""
    spec = spectrum(np.asarray(cov, dtype=float))
    vecs = spec.eigenvectors[:, ::-1]
    return SpectralTemplates(fix_eigenvector_signs(vecs), source="exact_covariance")


def exact_templates(l: LaplacianMatrix) -> SpectralTemplates:
    """Eigenvectors of the true Laplacian in ascending-eigenvalue order."""
    return SpectralTemplates(spectrum(l).eigenvectors, source="exact")


def templates_from_noisy_adjacency(g: Graph, sigma: float, seed: int) -> SpectralTemplates:
    """Eigenvectors of the Laplacian of a Gaussian-perturbed adjacency,
    in ascending-eigenvalue order."""
    noisy = perturb_adjacency(g, sigma, seed)
    spec = spectrum(laplacian(noisy))
    return SpectralTemplates(spec.eigenvectors, source=f"noisy_adjacency(sigma={sigma})")


def default_consensus_filter(l: LaplacianMatrix, frac: float = 0.9) -> ConsensusFilter:
    """Single-step filter I - alpha L with alpha = frac / lambda_max;
    frac < 1 keeps the response strictly positive on the spectrum."""
    lam_max = float(np.linalg.eigvalsh(l.matrix)[-1])
    if lam_max <= 0.0:
        return ConsensusFilter((frac,))
    return ConsensusFilter((frac / lam_max,))


def save_matrix(path, matrix: np.ndarray) -> None:
    """Write a matrix as little-endian float64 with a 16-byte header
    (magic, rows, cols)."""
    m = np.ascontiguousarray(np.atleast_2d(np.asarray(matrix, dtype="<f8")))
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MATRIX_MAGIC, m.shape[0], m.shape[1]))
        fh.write(m.tobytes())


def load_matrix(path) -> np.ndarray:
    """Read a matrix written by :func:`save_matrix`."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, rows, cols = _HEADER.unpack(header)
        if magic != _MATRIX_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        data = fh.read(rows * cols * 8)
    if len(data) != rows * cols * 8:
        raise ValueError(f"{path}: truncated payload")
    return np.frombuffer(data, dtype="<f8").reshape(rows, cols).copy()
