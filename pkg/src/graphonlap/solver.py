"""Convex recovery of a graph Laplacian from spectral templates.

The program minimizes the elementwise l1 norm of the Laplacian plus a
quadratic shrinkage of its (normalized, ordered) eigenvalue variables
toward a degree prior, subject to a Frobenius ball around the matrix
diagonalized by the templates, membership in the cone of valid Laplacians,
and an eta-slack eigenvalue ordering.

The solver is an over-relaxed two-block ADMM.  The Laplacian variable is
parametrized by its nonnegative edge weights, so cone membership reduces
to a nonnegativity clip and the l1 norm becomes linear (4 * sum of
weights); the smooth block is a strongly convex quadratic solved exactly
through a Woodbury identity that exploits the complete-graph incidence
structure.  All steps are deterministic, so a fixed problem and config
reproduce the same iterates bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg as sla

from .errors import ConfigError
from .graphs import LaplacianMatrix, laplacian_cone_violations
from .priors import DegreePrior
from .signals import SpectralTemplates

STATUS_OPTIMAL = "optimal"
STATUS_MAX_ITERS = "max_iters"
STATUS_INFEASIBLE = "infeasible"


# ---------------------------------------------------------------------------
# edge-weight parametrization of the Laplacian cone

def edge_endpoints(n: int):
    """Endpoints (rows, cols) of the n(n-1)/2 unordered pairs, row-major."""
    return np.triu_indices(n, 1)


def laplacian_from_weights(w: np.ndarray, n: int) -> np.ndarray:
    """Laplacian with off-diagonal -w_e and row sums zero; any w >= 0
    yields a member of the valid-Laplacian cone."""
    rows, cols = edge_endpoints(n)
    return _lap_from_w(np.asarray(w, dtype=float), n, rows, cols)


def weights_from_laplacian(matrix: np.ndarray) -> np.ndarray:
    """Edge weights -L_ij from the strict upper triangle."""
    m = np.asarray(matrix, dtype=float)
    rows, cols = edge_endpoints(m.shape[0])
    return -m[rows, cols]


def _lap_from_w(w, n, rows, cols):
    lap = np.zeros((n, n))
    lap[rows, cols] = -w
    lap[cols, rows] = -w
    deg = np.bincount(rows, weights=w, minlength=n) + np.bincount(cols, weights=w, minlength=n)
    lap[np.diag_indices(n)] = deg
    return lap


def _lap_adjoint(m, rows, cols):
    # adjoint of w -> Lap(w) for symmetric m
    dg = np.diag(m)
    return dg[rows] + dg[cols] - 2.0 * m[rows, cols]


def _diag_conj(m, v):
    # diag(V^T m V) without forming the full conjugation
    return np.einsum("ij,ij->j", v, m @ v)


def _template_gaps(v, rows, cols):
    # row e=(a,b): squared eigenvector gaps (v_i[a] - v_i[b])^2, one column per template
    diff = v[rows, :] - v[cols, :]
    return diff * diff


# ---------------------------------------------------------------------------
# projections

def pav_nondecreasing(y: np.ndarray) -> np.ndarray:
    """Isotonic (nondecreasing) least-squares fit via pool-adjacent-violators."""
    vals: list[float] = []
    sizes: list[int] = []
    for v in np.asarray(y, dtype=float):
        vals.append(float(v))
        sizes.append(1)
        while len(vals) > 1 and vals[-2] > vals[-1]:
            total = sizes[-1] + sizes[-2]
            merged = (vals[-1] * sizes[-1] + vals[-2] * sizes[-2]) / total
            vals.pop()
            sizes.pop()
            vals[-1] = merged
            sizes[-1] = total
    return np.repeat(vals, sizes)


def project_ordering_cone(y: np.ndarray, eta: int) -> np.ndarray:
    """Project onto {lam: lam_1 = 0, lam >= 0, lam_i <= lam_{i+1+eta}}.

    The slack constraints split the indices into eta+1 interleaved chains;
    each chain is an isotonic projection, and the nonnegativity bound
    commutes with it (clip after pooling is exact for a constant lower
    bound).  The first coordinate is pinned to zero, which only adds the
    bound lam_{eta+2} >= 0 already implied by nonnegativity.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if n == 0:
        return y.copy()
    out = np.empty(n)
    step = eta + 1
    for start in range(min(step, n)):
        idx = np.arange(start, n, step)
        if start == 0:
            out[0] = 0.0
            idx = idx[1:]
            if idx.size == 0:
                continue
        out[idx] = pav_nondecreasing(y[idx])
    return np.maximum(out, 0.0, out=out)


def project_frobenius_ball(s: np.ndarray, radius: float) -> np.ndarray:
    nrm = float(np.linalg.norm(s))
    if nrm <= radius:
        return s.copy()
    return s * (radius / nrm)


# ---------------------------------------------------------------------------
# problem / solution containers

@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-6
    max_iters: int = 50_000
    over_relaxation: float = 1.6
    penalty_rho: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.tolerance < 1.0:
            raise ConfigError(f"tolerance must be in (0, 1), got {self.tolerance}")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be positive")
        if not 0.0 < self.over_relaxation < 2.0:
            raise ConfigError("over_relaxation must be in (0, 2)")
        if self.penalty_rho <= 0.0:
            raise ConfigError("penalty_rho must be positive")

    @classmethod
    def from_dict(cls, cfg: dict) -> "SolverConfig":
        known = {"tolerance", "max_iters", "over_relaxation", "penalty_rho"}
        extra = set(cfg) - known
        if extra:
            raise ConfigError(f"unknown solver config keys {sorted(extra)}")
        return cls(**cfg)

    def to_dict(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "max_iters": self.max_iters,
            "over_relaxation": self.over_relaxation,
            "penalty_rho": self.penalty_rho,
        }


@dataclass(frozen=True)
class RecoveryProblem:
    """Validated inputs of one recovery instance; build via build_problem."""

    templates: SpectralTemplates
    degree_prior: Optional[DegreePrior]
    beta: float
    epsilon: float
    eta: int

    @property
    def n(self) -> int:
        return self.templates.n

    @property
    def anchored(self) -> bool:
        """Whether the trace anchor tr(L) = n is active (beta == 0)."""
        return self.beta == 0.0


@dataclass(frozen=True)
class RecoverySolution:
    laplacian: LaplacianMatrix
    spectrum_vars: np.ndarray
    objective: float
    primal_residual: float
    dual_residual: float
    iterations: int
    status: str
    diagnostics: dict = field(default_factory=dict, repr=False)


@dataclass(frozen=True)
class KktReport:
    ok: bool
    flags: dict
    violations: dict
    objective: float
    objective_drift: float
    duality_gap_estimate: float


def build_problem(
    templates: SpectralTemplates,
    degree_prior: Optional[DegreePrior],
    beta: float,
    epsilon: float,
    eta: int,
) -> RecoveryProblem:
    """Validate and assemble a recovery problem.

    Without a degree prior, beta is forced to 0 (the no-prior baseline);
    the trace anchor tr(L) = n is then added inside solve to pin the
    otherwise free scale.
    """
    n = templates.n
    if degree_prior is not None and degree_prior.size != n:
        raise ValueError(f"degree prior has {degree_prior.size} points, templates need {n}")
    if beta < 0.0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    if not 0 <= eta <= n - 2:
        raise ValueError(f"eta must be in [0, {n - 2}], got {eta}")
    if degree_prior is None:
        beta = 0.0
    return RecoveryProblem(templates, degree_prior, float(beta), float(epsilon), int(eta))


def objective_value(problem: RecoveryProblem, lap: np.ndarray, lam: np.ndarray) -> float:
    """l1 norm of L plus the beta-weighted discretized shrinkage penalty."""
    lap = lap.matrix if isinstance(lap, LaplacianMatrix) else np.asarray(lap, dtype=float)
    obj = float(np.abs(lap).sum())
    if problem.beta > 0.0 and problem.degree_prior is not None:
        n = problem.n
        dev = np.asarray(lam, dtype=float) / n - problem.degree_prior.values
        obj += problem.beta / n * float(dev @ dev)
    return obj


def constraint_violations(problem: RecoveryProblem, lap: np.ndarray, lam: np.ndarray) -> dict:
    """Signed/one-sided violation magnitudes of constraints (a)-(e)."""
    lap = lap.matrix if isinstance(lap, LaplacianMatrix) else np.asarray(lap, dtype=float)
    lam = np.asarray(lam, dtype=float)
    v = problem.templates.vectors
    n = problem.n
    ball = float(np.linalg.norm(lap - (v * lam) @ v.T)) - problem.epsilon
    cone = laplacian_cone_violations(lap)
    eta = problem.eta
    if n - 1 - eta >= 1:
        ordering = float(np.maximum(lam[: n - 1 - eta] - lam[1 + eta :], 0.0).max())
    else:
        ordering = 0.0
    return {
        "ball_excess": ball,
        "max_offdiag": cone["max_offdiag"],
        "max_abs_row_sum": cone["max_abs_row_sum"],
        "min_diag": cone["min_diag"],
        "lam_first": float(abs(lam[0])),
        "lam_negative": float(max(0.0, -lam.min())),
        "ordering_excess": ordering,
        "anchor_gap": float(abs(np.trace(lap) - n)) if problem.anchored else 0.0,
        "l11_identity": float(abs(np.abs(lap).sum() - 2.0 * np.trace(lap))),
    }


# ---------------------------------------------------------------------------
# smooth-block normal equations

class _QuadraticBlock:
    """Exact minimizer of the smooth (w, lam) block.

    Eliminating lam leaves a system in w with matrix
    rho * (3 I + B B^T) - (rho^2 / c) G G^T, where B is the unsigned
    incidence of the complete graph and G holds squared template gaps.
    Both low-rank pieces have rank <= n, so the inverse is applied through
    a 2n x 2n factorization (Woodbury) at O(n^3) per call.
    """

    def __init__(self, n, g, rows, cols):
        self.n = n
        self.g = g
        self.rows = rows
        self.cols = cols
        btb = np.full((n, n), 1.0)
        np.fill_diagonal(btb, float(n - 1))
        btg = np.zeros((n, n))
        np.add.at(btg, rows, g)
        np.add.at(btg, cols, g)
        self._k_top = np.hstack([np.eye(n) + btb / 3.0, btg / 3.0])
        self._gtg = g.T @ g
        self._btg = btg
        self._lu = None
        self._rho = None

    def node_sums(self, vec):
        return np.bincount(self.rows, weights=vec, minlength=self.n) + np.bincount(
            self.cols, weights=vec, minlength=self.n
        )

    def factor(self, rho, cscal):
        n = self.n
        bottom = np.hstack([self._btg.T / 3.0, self._gtg / 3.0 - (cscal / rho) * np.eye(n)])
        self._lu = sla.lu_factor(np.vstack([self._k_top, bottom]))
        self._rho = rho

    def apply_inverse(self, rhs):
        ur = np.concatenate([self.node_sums(rhs), self.g.T @ rhs])
        y = sla.lu_solve(self._lu, ur)
        yb, yg = y[: self.n], y[self.n :]
        corr = yb[self.rows] + yb[self.cols] + self.g @ yg
        return (rhs / 3.0 - corr / 9.0) / self._rho


# ---------------------------------------------------------------------------
# the ADMM loop

def solve(problem: RecoveryProblem, config: Optional[SolverConfig] = None) -> RecoverySolution:
    """Solve the recovery program by over-relaxed two-block ADMM.

    Internally the problem is solved in 1/n units (L/n, lam/n, eps/n) so
    iterates are O(1) across sizes; reported residuals are the normalized
    primal/dual residuals of the scaled problem.  Iteration stops when
    both fall below ``config.tolerance`` and the clipped candidate
    satisfies the ball constraint within its slack, or at max_iters.
    Zero initialization makes the returned point canonical among optima.
    """
    cfg = config or SolverConfig()
    v = problem.templates.vectors
    n = problem.n
    d = problem.degree_prior.values if problem.degree_prior is not None else np.zeros(n)
    eps_s = problem.epsilon / n
    btil = problem.beta / n**2
    anchor = problem.anchored
    eta = problem.eta

    rows, cols = edge_endpoints(n)
    n_edges = rows.size
    gaps = _template_gaps(v, rows, cols)
    quad = _QuadraticBlock(n, gaps, rows, cols)

    rho = cfg.penalty_rho
    cscal = 2.0 * btil + 2.0 * rho
    quad.factor(rho, cscal)
    h_anchor = quad.apply_inverse(np.full(n_edges, 2.0)) if anchor else None

    alpha = cfg.over_relaxation
    tol_active = cfg.tolerance
    slack_s = max(1e-6, cfg.tolerance * max(1.0, problem.epsilon)) / n

    w = np.zeros(n_edges)
    lam = np.zeros(n)
    r_mat = np.zeros((n, n))
    zeta = np.zeros(n_edges)
    mu = np.zeros(n)
    s_mat = np.zeros((n, n))
    u_w = np.zeros(n_edges)
    u_l = np.zeros(n)
    u_s = np.zeros((n, n))

    pri_hist: list[float] = []
    dual_norm_hist: list[float] = []
    status = STATUS_MAX_ITERS
    r_pri = r_dua = np.inf
    it = 0

    for it in range(1, cfg.max_iters + 1):
        # smooth block (exact)
        st = s_mat - u_s
        b_w = rho * ((zeta - u_w) + _lap_adjoint(st, rows, cols)) - 4.0
        b_l = 2.0 * btil * d + rho * ((mu - u_l) - _diag_conj(st, v))
        w = quad.apply_inverse(b_w + (rho / cscal) * (gaps @ b_l))
        if anchor:
            nu = (2.0 * w.sum() - 1.0) / (2.0 * h_anchor.sum())
            w -= nu * h_anchor
        lam = (b_l + rho * (gaps.T @ w)) / cscal
        r_mat = _lap_from_w(w, n, rows, cols) - (v * lam) @ v.T

        # projection block on relaxed iterates
        zeta_prev, mu_prev, s_prev = zeta, mu, s_mat
        hw = alpha * w + (1.0 - alpha) * zeta_prev
        hl = alpha * lam + (1.0 - alpha) * mu_prev
        hs = alpha * r_mat + (1.0 - alpha) * s_prev
        zeta = np.maximum(hw + u_w, 0.0)
        mu = project_ordering_cone(hl + u_l, eta)
        s_mat = project_frobenius_ball(hs + u_s, eps_s)
        u_w = u_w + hw - zeta
        u_l = u_l + hl - mu
        u_s = u_s + hs - s_mat

        # residuals of the scaled problem
        pri = np.sqrt(
            np.sum((w - zeta) ** 2) + np.sum((lam - mu) ** 2) + np.sum((r_mat - s_mat) ** 2)
        )
        ds = s_mat - s_prev
        at_w = (zeta - zeta_prev) + _lap_adjoint(ds, rows, cols)
        at_l = (mu - mu_prev) - _diag_conj(ds, v)
        dua = rho * np.sqrt(np.sum(at_w**2) + np.sum(at_l**2))
        ax_norm = np.sqrt(np.sum(w**2) + np.sum(lam**2) + np.sum(r_mat**2))
        z_norm = np.sqrt(np.sum(zeta**2) + np.sum(mu**2) + np.sum(s_mat**2))
        atu_w = u_w + _lap_adjoint(u_s, rows, cols)
        atu_l = u_l - _diag_conj(u_s, v)
        atu_norm = rho * np.sqrt(np.sum(atu_w**2) + np.sum(atu_l**2))
        r_pri = pri / max(1.0, ax_norm, z_norm)
        r_dua = dua / max(1.0, atu_norm)

        if r_pri <= tol_active and r_dua <= tol_active:
            cand_w, cand_mu, ball = _candidate(zeta, mu, v, n, rows, cols, anchor)
            if ball <= eps_s + slack_s:
                status = STATUS_OPTIMAL
                break
            tol_active *= 0.2

        if it % 25 == 0:
            # residual balancing; the unscaled dual y = rho * u stays continuous
            new_rho = rho
            if r_pri > 10.0 * r_dua and rho < 1e6:
                new_rho = rho * 2.0
            elif r_dua > 10.0 * r_pri and rho > 1e-6:
                new_rho = rho / 2.0
            if new_rho != rho:
                scale = rho / new_rho
                u_w *= scale
                u_l *= scale
                u_s *= scale
                rho = new_rho
                cscal = 2.0 * btil + 2.0 * rho
                quad.factor(rho, cscal)
                if anchor:
                    h_anchor = quad.apply_inverse(np.full(n_edges, 2.0))

        if anchor and it % 250 == 0:
            pri_hist.append(r_pri)
            dual_norm_hist.append(rho * np.sqrt(np.sum(u_w**2) + np.sum(u_l**2) + np.sum(u_s**2)))
            if len(pri_hist) >= 6 and it >= 1500:
                window = pri_hist[-6:]
                stalled = window[0] - window[-1] < 1e-3 * window[0]
                growing = dual_norm_hist[-1] > 1.2 * dual_norm_hist[-6]
                if stalled and growing and r_pri > 50.0 * cfg.tolerance:
                    status = STATUS_INFEASIBLE
                    break

    cand_w, cand_mu, ball = _candidate(zeta, mu, v, n, rows, cols, anchor)
    lap_out = LaplacianMatrix(n * _lap_from_w(cand_w, n, rows, cols))
    lam_out = n * cand_mu
    obj = objective_value(problem, lap_out, lam_out)
    if status == STATUS_INFEASIBLE:
        obj = float("nan")
    diagnostics = {
        "rho": rho,
        "tolerance": cfg.tolerance,
        "ball_residual": float(n * ball - problem.epsilon),
        "anchor": anchor,
        "u_w": u_w * rho,
        "u_lam": u_l * rho,
        "u_s": u_s * rho,
        "scaled_weights": cand_w,
    }
    return RecoverySolution(
        laplacian=lap_out,
        spectrum_vars=lam_out,
        objective=obj,
        primal_residual=float(r_pri),
        dual_residual=float(r_dua),
        iterations=it,
        status=status,
        diagnostics=diagnostics,
    )


def _candidate(zeta, mu, v, n, rows, cols, anchor):
    """Feasible-by-construction candidate from the projection-block copies;
    under the trace anchor both variables are rescaled so tr(L) = n holds
    exactly (the error metric and the cone are scale compatible)."""
    cand_w = zeta
    cand_mu = mu
    if anchor:
        tr = 2.0 * zeta.sum()
        if tr > 0.25:
            cand_w = zeta / tr
            cand_mu = mu / tr
    ball = float(np.linalg.norm(_lap_from_w(cand_w, n, rows, cols) - (v * cand_mu) @ v.T))
    return cand_w, cand_mu, ball


def verify_kkt(problem: RecoveryProblem, solution: RecoverySolution) -> KktReport:
    """Audit a returned solution: recompute the objective, measure every
    constraint violation, and estimate the duality gap from the stored
    ADMM multipliers.

    A flag is raised for any violation above 10x the solver tolerance
    (scaled by n).  The gap estimate evaluates the dual objective at
    feasibility-repaired multipliers and folds first-order stationarity
    residuals in at the returned point; it is a diagnostic, not a bound.
    """
    if solution.status != STATUS_OPTIMAL:
        raise ValueError(f"verify_kkt requires an optimal solution, got {solution.status!r}")
    n = problem.n
    lap = solution.laplacian.matrix
    lam = solution.spectrum_vars
    tol = solution.diagnostics.get("tolerance", 1e-6)
    viol = constraint_violations(problem, lap, lam)
    thr = 10.0 * tol * max(1.0, float(n))
    flags = {
        "ball": viol["ball_excess"] > thr,
        "offdiag": viol["max_offdiag"] > thr,
        "row_sums": viol["max_abs_row_sum"] > thr,
        "diag": viol["min_diag"] < -thr,
        "lam_first": viol["lam_first"] > thr,
        "lam_negative": viol["lam_negative"] > thr,
        "ordering": viol["ordering_excess"] > thr,
        "anchor": viol["anchor_gap"] > thr,
        "l11_identity": viol["l11_identity"] > thr,
    }
    obj = objective_value(problem, lap, lam)
    drift = abs(obj - solution.objective)
    gap = _duality_gap_estimate(problem, solution, obj)
    return KktReport(
        ok=not any(flags.values()),
        flags=flags,
        violations=viol,
        objective=obj,
        objective_drift=drift,
        duality_gap_estimate=gap,
    )


def _duality_gap_estimate(problem, solution, obj):
    diag = solution.diagnostics
    if "u_s" not in diag:
        return float("nan")
    n = problem.n
    v = problem.templates.vectors
    rows, cols = edge_endpoints(n)
    y_w = np.minimum(np.asarray(diag["u_w"], dtype=float), 0.0)
    y_l = np.asarray(diag["u_lam"], dtype=float)
    y_s = np.asarray(diag["u_s"], dtype=float)
    # polar-cone repair via the Moreau decomposition
    y_l = y_l - project_ordering_cone(y_l, problem.eta)
    g_s = _diag_conj(y_s, v)
    q = y_l - g_s
    btil = problem.beta / n**2
    d = problem.degree_prior.values if problem.degree_prior is not None else np.zeros(n)
    lam_scaled = solution.spectrum_vars / n
    w_scaled = diag.get("scaled_weights", weights_from_laplacian(solution.laplacian.matrix / n))
    if btil > 0.0:
        lam_part = float(q @ d) - float(q @ q) / (4.0 * btil)
    else:
        lam_part = float(q @ lam_scaled)
    r_w = 4.0 + y_w + _lap_adjoint(y_s, rows, cols)
    nu = 0.0
    if problem.anchored:
        nu = -float(r_w.sum()) / (2.0 * r_w.size)
        r_w = r_w + 2.0 * nu
    dual_scaled = -(problem.epsilon / n) * float(np.linalg.norm(y_s)) + lam_part
    dual_scaled += float(r_w @ w_scaled) - nu
    return float(abs(obj - n * dual_scaled) / max(1.0, abs(obj)))
