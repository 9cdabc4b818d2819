"""Graph and Laplacian containers, spectra, subgraph sampling, empirical
degree functions, the normalized recovery metric, and an edge-list reader.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DatasetError, DegenerateInputError
from .priors import DegreePrior, midpoint_grid


def _frozen_array(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Graph:
    """Undirected graph stored as a symmetric adjacency matrix.

    Sampled graphs are 0/1; real-valued entries (including negative ones
    from noise injection) are allowed for perturbed or recovered graphs.
    The diagonal is always zero and symmetry is exact.
    """

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.array(self.adjacency, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {a.shape}")
        if a.shape[0] < 1:
            raise ValueError("graph must have at least one node")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be exactly symmetric")
        if np.any(np.diag(a) != 0.0):
            raise ValueError("adjacency diagonal must be zero (no self-loops)")
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1))

    def edge_count(self) -> int:
        """Number of nonzero unordered pairs."""
        return int(np.count_nonzero(np.triu(self.adjacency, 1)))


@dataclass(frozen=True)
class LaplacianMatrix:
    """Symmetric matrix with (numerically) zero row sums.

    Row sums vanish for every L = D - A, including Laplacians of noisy
    graphs whose off-diagonal signs are wrong; sign conditions for
    membership in the cone of valid graph Laplacians are audited
    separately via :func:`laplacian_cone_violations`.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"Laplacian must be square, got shape {m.shape}")
        n = m.shape[0]
        if not np.allclose(m, m.T, rtol=0.0, atol=1e-9 * max(1.0, np.abs(m).max())):
            raise ValueError("Laplacian must be symmetric")
        row_sums = m.sum(axis=1)
        if np.abs(row_sums).max() > 1e-9 * n * max(1.0, np.abs(m).max()):
            raise ValueError("Laplacian rows must sum to zero")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition with ascending eigenvalues and orthonormal
    eigenvectors under a deterministic sign convention."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen_array(self.eigenvalues))
        object.__setattr__(self, "eigenvectors", _frozen_array(self.eigenvectors))


def laplacian(g: Graph) -> LaplacianMatrix:
    """Combinatorial Laplacian L = D - A with D = diag(A 1)."""
    a = g.adjacency
    return LaplacianMatrix(np.diag(a.sum(axis=1)) - a)


def laplacian_cone_violations(matrix: np.ndarray) -> dict:
    """Violation magnitudes of membership in the valid-Laplacian cone
    (symmetric, nonpositive off-diagonal, zero row sums)."""
    m = np.asarray(matrix, dtype=float)
    n = m.shape[0]
    off = m - np.diag(np.diag(m))
    return {
        "max_offdiag": float(off.max(initial=0.0)),
        "max_abs_row_sum": float(np.abs(m.sum(axis=1)).max()),
        "min_diag": float(np.diag(m).min()),
        "asymmetry": float(np.abs(m - m.T).max()),
        "n": n,
    }


def fix_eigenvector_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip column signs so each column's largest-magnitude entry is
    positive; ties broken by the lowest index."""
    v = np.array(vectors, dtype=float)
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[idx, np.arange(v.shape[1])])
    signs[signs == 0.0] = 1.0
    return v * signs


def spectrum(l: LaplacianMatrix | np.ndarray, sym_tol: float = 1e-8) -> Spectrum:
    """Symmetric eigendecomposition, eigenvalues ascending.

    Raises ValueError for inputs that are not symmetric within ``sym_tol``
    (relative to the largest entry).
    """
    m = l.matrix if isinstance(l, LaplacianMatrix) else np.asarray(l, dtype=float)
    scale = max(1.0, float(np.abs(m).max()))
    if np.abs(m - m.T).max() > sym_tol * scale:
        raise ValueError("input matrix is not symmetric within tolerance")
    m = 0.5 * (m + m.T)
    vals, vecs = np.linalg.eigh(m)
    return Spectrum(vals, fix_eigenvector_signs(vecs))


def induced_subgraph(g: Graph, n0: int, seed: int) -> Graph:
    """Restrict the graph to a uniformly chosen n0-subset of nodes.

    The subset is drawn without replacement and kept in ascending node
    order, so relabeling is deterministic.
    """
    if not 1 <= n0 <= g.n:
        raise ValueError(f"n0 must be in [1, {g.n}], got {n0}")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(g.n, size=n0, replace=False))
    return Graph(g.adjacency[np.ix_(idx, idx)])


def empirical_degree_function(g0: Graph, grid: int) -> DegreePrior:
    """Normalized sorted-degree step function sampled at grid midpoints.

    With d0 = sort(A0 1) ascending, returns
    [d0]_{floor(n0 * x) + 1} / n0 at each midpoint x = (i - 1/2)/grid
    (1-based indexing into d0).
    """
    x = midpoint_grid(grid)
    n0 = g0.n
    d0 = np.sort(g0.degrees())
    idx = np.minimum(np.floor(n0 * x).astype(int), n0 - 1)
    return DegreePrior(x, d0[idx] / n0, source=f"subgraph(n0={n0})")


def recovery_error(est, truth) -> float:
    """Frobenius distance between the unit-Frobenius normalizations of two
    matrices. Scale invariant; equals 2 for est = -truth."""
    a = est.matrix if isinstance(est, LaplacianMatrix) else np.asarray(est, dtype=float)
    b = truth.matrix if isinstance(truth, LaplacianMatrix) else np.asarray(truth, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise DegenerateInputError("recovery error undefined for zero-norm input")
    return float(np.linalg.norm(a / na - b / nb))


def perturb_adjacency(g: Graph, sigma: float, seed: int) -> Graph:
    """Add a symmetric Gaussian perturbation N(0, sigma^2) i.i.d. over
    unordered pairs; the diagonal stays zero and entries may go negative.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    rng = np.random.default_rng(seed)
    noise = np.triu(rng.standard_normal((g.n, g.n)), 1)
    noise = noise + noise.T
    return Graph(g.adjacency + sigma * noise)


def read_edge_list(path, one_indexed: bool = True, weighted: bool = False) -> Graph:
    """Read a whitespace-separated "u v [weight]" edge list.

    Lines beginning with '#' or '%' and blank lines are skipped.  The graph
    is symmetrized (an edge listed in either direction is present); when
    both directions carry weights the larger one wins, which keeps the
    result independent of line order.  Weights are discarded (entries
    binarized to 1) unless ``weighted`` is set.  Self-loops are dropped.
    The node count is the largest id seen.
    """
    offset = 1 if one_indexed else 0
    edges: dict[tuple[int, int], float] = {}
    max_id = -1
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#") or line.startswith("%"):
                    continue
                parts = line.split()
                if len(parts) not in (2, 3):
                    raise DatasetError(f"{path}:{lineno}: expected 'u v [weight]', got {line!r}")
                try:
                    u = int(parts[0]) - offset
                    v = int(parts[1]) - offset
                    w = float(parts[2]) if len(parts) == 3 else 1.0
                except ValueError as exc:
                    raise DatasetError(f"{path}:{lineno}: {exc}") from None
                if u < 0 or v < 0:
                    raise DatasetError(
                        f"{path}:{lineno}: node id below {offset} (check index flag)"
                    )
                max_id = max(max_id, u, v)
                if u == v:
                    continue
                key = (min(u, v), max(u, v))
                edges[key] = max(edges.get(key, 0.0), w if weighted else 1.0)
    except OSError as exc:
        raise DatasetError(f"cannot read edge list {path}: {exc}") from None
    if max_id < 0:
        raise DatasetError(f"{path}: no edges found")
    adj = np.zeros((max_id + 1, max_id + 1))
    for (u, v), w in edges.items():
        adj[u, v] = adj[v, u] = w
    return Graph(adj)
