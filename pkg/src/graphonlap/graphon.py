"""Graphon models: a registry of closed-form kernel families, graph
sampling with i.i.d. uniform latent positions, and degree functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import ConfigError
from .graphs import Graph
from .priors import DegreePrior, midpoint_grid


@dataclass(frozen=True)
class LatentDraw:
    """Latent uniform positions used for one sampled graph.

    Retained for diagnostics only; inference never reads it.
    """

    latents: np.ndarray
    seed: int

    def __post_init__(self):
        lat = np.array(self.latents, dtype=float)
        if np.any(lat < 0.0) or np.any(lat > 1.0):
            raise ValueError("latents must lie in [0, 1]")
        lat.setflags(write=False)
        object.__setattr__(self, "latents", lat)


@dataclass(frozen=True)
class Graphon:
    """Symmetric kernel on the unit square with values in [0, 1].

    Instances come from the family factories below (``constant``,
    ``quadratic_sum``, ``max_decay``, ``step_graphon``) which attach a
    closed-form degree function where one exists.
    """

    family: str
    params: dict = field(compare=False)
    kernel: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(compare=False)
    degree_form: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    def describe(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params.items() if k != "matrix")
        return f"{self.family}({inner})"

    def degree(self, x, method: str = "auto") -> np.ndarray:
        """Degree function d(x) = integral of the kernel over the second
        argument.

        ``method`` is "auto" (closed form when registered, else
        quadrature), "closed", or "quadrature"; quadrature is adaptive
        with absolute tolerance 1e-9.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if method not in ("auto", "closed", "quadrature"):
            raise ValueError(f"unknown method {method!r}")
        if method == "closed" and self.degree_form is None:
            raise ValueError(f"no closed-form degree function for {self.family}")
        if method in ("auto", "closed") and self.degree_form is not None:
            return np.asarray(self.degree_form(x), dtype=float)
        out = np.empty_like(x)
        for i, xi in enumerate(x):
            # interior breakpoint handles kernels with a kink at y = x
            pts = [xi] if 0.0 < xi < 1.0 else None
            val, _ = integrate.quad(
                lambda y: float(self.kernel(np.asarray(xi), np.asarray(y))),
                0.0, 1.0, epsabs=1e-9, limit=200, points=pts,
            )
            out[i] = val
        return out

    def to_config(self) -> dict:
        return {"family": self.family, **self.params}


def constant(p: float) -> Graphon:
    """W(x, y) = p; samples Erdos-Renyi graphs."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must be in [0, 1], got {p}")
    return Graphon(
        family="constant",
        params={"p": p},
        kernel=lambda x, y: np.full(np.broadcast_shapes(np.shape(x), np.shape(y)), float(p)),
        degree_form=lambda x: np.full_like(np.asarray(x, dtype=float), p),
    )


def quadratic_sum(gamma: float) -> Graphon:
    """W(x, y) = gamma (x^2 + y^2) / 2 + (1 - gamma)."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    return Graphon(
        family="quadratic_sum",
        params={"gamma": gamma},
        kernel=lambda x, y: 0.5 * gamma * (np.asarray(x, dtype=float) ** 2 + np.asarray(y, dtype=float) ** 2) + (1.0 - gamma),
        degree_form=lambda x: 0.5 * gamma * np.asarray(x, dtype=float) ** 2 + gamma / 6.0 + (1.0 - gamma),
    )


def max_decay(a: float) -> Graphon:
    """W(x, y) = 1 - a * max(x, y)."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"decay rate must be in [0, 1], got {a}")
    return Graphon(
        family="max_decay",
        params={"a": a},
        kernel=lambda x, y: 1.0 - a * np.maximum(np.asarray(x, dtype=float), np.asarray(y, dtype=float)),
        degree_form=lambda x: 1.0 - 0.5 * a * (1.0 + np.asarray(x, dtype=float) ** 2),
    )


def step_graphon(matrix) -> Graphon:
    """Piecewise-constant graphon from a symmetric k x k probability
    matrix over equal-width blocks."""
    p = np.array(matrix, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError(f"step matrix must be square, got shape {p.shape}")
    if not np.array_equal(p, p.T):
        raise ValueError("step matrix must be symmetric")
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("step matrix entries must lie in [0, 1]")
    k = p.shape[0]
    p.setflags(write=False)

    def block(x):
        return np.minimum(np.floor(np.asarray(x, dtype=float) * k).astype(int), k - 1)

    def kern(x, y):
        bx, by = np.broadcast_arrays(block(x), block(y))
        return p[bx, by]

    return Graphon(
        family="step",
        params={"matrix": p.tolist()},
        kernel=kern,
        degree_form=lambda x: p[block(np.atleast_1d(x))].mean(axis=1),
    )


_FAMILIES = {
    "constant": (constant, ("p",)),
    "quadratic_sum": (quadratic_sum, ("gamma",)),
    "max_decay": (max_decay, ("a",)),
    "step": (step_graphon, ("matrix",)),
}


def from_config(cfg: dict) -> Graphon:
    """Build a registry graphon from a JSON-style dict, e.g.
    {"family": "quadratic_sum", "gamma": 0.7}."""
    if not isinstance(cfg, dict) or "family" not in cfg:
        raise ConfigError(f"graphon config must be a dict with a 'family' key, got {cfg!r}")
    family = cfg["family"]
    if family not in _FAMILIES:
        raise ConfigError(f"unknown graphon family {family!r}; known: {sorted(_FAMILIES)}")
    factory, keys = _FAMILIES[family]
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"graphon family {family!r} requires parameters {missing}")
    extra = set(cfg) - {"family", *keys}
    if extra:
        raise ConfigError(f"unexpected graphon parameters {sorted(extra)} for family {family!r}")
    try:
        return factory(*(cfg[k] for k in keys))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def sample_graph_with_latents(w: Graphon, n: int, seed: int) -> tuple[Graph, LatentDraw]:
    """Sample an n-node simple graph: draw latents i.i.d. uniform on
    [0, 1], then include each edge {i, j} independently with probability
    W(latent_i, latent_j)."""
    if n < 2:
        raise ValueError(f"need at least 2 nodes to sample a graph, got {n}")
    rng = np.random.default_rng(seed)
    latents = rng.random(n)
    probs = np.asarray(w.kernel(latents[:, None], latents[None, :]), dtype=float)
    coins = rng.random((n, n))
    upper = np.triu(coins < probs, 1).astype(float)
    adj = upper + upper.T
    return Graph(adj), LatentDraw(latents, seed)


def sample_graph(w: Graphon, n: int, seed: int) -> Graph:
    """Same draw as :func:`sample_graph_with_latents`, discarding the
    latent positions."""
    g, _ = sample_graph_with_latents(w, n, seed)
    return g


def degree_function(w: Graphon, grid: int) -> DegreePrior:
    """Degree function at grid midpoints, sorted ascending.

    Uses the registered closed form when available, else adaptive
    quadrature.  Sorting matches the ascending-eigenvalue convention the
    prior is compared against; for step graphons it is not a no-op.
    """
    x = midpoint_grid(grid)
    vals = np.sort(w.degree(x))
    return DegreePrior(x, vals, source=w.describe())
