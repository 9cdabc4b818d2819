"""Degree priors: sorted degree-function samples on a midpoint grid.

A prior holds the values of a (graphon or empirical) degree function at the
grid midpoints x_i = (i - 1/2) / grid, sorted ascending so they can be
compared against an ascending Laplacian spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def midpoint_grid(grid: int) -> np.ndarray:
    """Midpoints (i - 1/2)/grid for i = 1..grid."""
    if grid < 1:
        raise ValueError(f"grid must be >= 1, got {grid}")
    return (np.arange(grid) + 0.5) / grid


@dataclass(frozen=True)
class DegreePrior:
    """Sorted degree-function values on a midpoint grid.

    Attributes
    ----------
    grid : np.ndarray
        Midpoints in (0, 1), ascending.
    values : np.ndarray
        Degree values at the midpoints, sorted ascending.
    source : str
        Provenance tag, e.g. "quadratic_sum(gamma=0.7)" or "subgraph(n0=30)".
    """

    grid: np.ndarray
    values: np.ndarray
    source: str = ""

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or values.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if grid.size < 1:
            raise ValueError("prior must have at least one grid point")
        if np.any(grid <= 0.0) or np.any(grid >= 1.0):
            raise ValueError("grid midpoints must lie strictly inside (0, 1)")
        if np.any(np.diff(values) < -1e-12):
            raise ValueError("prior values must be sorted ascending")
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        return int(self.values.size)


def save_prior(prior: DegreePrior, path) -> None:
    """Write "x,value" rows; '#' lines are comments."""
    lines = [f"# degree prior: {prior.source}", "# x,value"]
    lines += [f"{repr(float(x))},{repr(float(v))}" for x, v in zip(prior.grid, prior.values)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_prior(path) -> DegreePrior:
    xs, vs = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            x, v = line.split(",")
            xs.append(float(x))
            vs.append(float(v))
    return DegreePrior(np.array(xs), np.array(vs), source=f"file:{path}")


def spectral_distance(eigenvalues: np.ndarray, prior: DegreePrior) -> float:
    """Discretized L2 distance between the normalized eigenvalue step
    function and a degree prior on the same grid.

    The step function takes value lambda_i / n on the i-th cell of an
    n-cell uniform partition of [0, 1]; with ``prior.grid`` the midpoints of
    that partition, the midpoint rule gives
    sqrt((1/n) * sum_i (lambda_i / n - d_i)^2).
    """
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    n = lam.size
    if prior.size != n:
        raise ValueError(f"prior grid size {prior.size} != spectrum size {n}")
    return float(np.sqrt(np.mean((lam / n - prior.values) ** 2)))
