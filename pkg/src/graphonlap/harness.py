"""Experiment orchestration: deterministic seeding, parameter grid search,
the four experiment drivers, dataset loading, and CSV/JSON emission.

Every random draw is keyed by a blake2b hash of (master_seed, purpose,
coordinates, trial, role), so changing one grid never perturbs the seeds
of unaffected cells, and tuning ("tune" role) never shares a seed with
reporting ("report" role).  Emitted CSV bytes are canonical: rows are
sorted and floats use repr; wall times go to a sidecar file so the main
CSV is byte-identical across runs.
"""

from __future__ import annotations

import hashlib
import json
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import graphon as graphon_mod
from .errors import ConfigError, DatasetError, DegenerateInputError
from .graphs import (
    Graph,
    empirical_degree_function,
    laplacian,
    read_edge_list,
    recovery_error,
)
from .signals import (
    default_consensus_filter,
    estimate_templates,
    exact_templates,
    generate_signals,
    templates_from_noisy_adjacency,
)
from .solver import SolverConfig, build_problem, solve

EXPERIMENTS = ("convergence", "noisy_templates", "subgraph_prior", "dataset_denoise")

METHOD_TRUE = "true_graphon"
METHOD_ALT = "alternate_graphon"
METHOD_NONE = "no_prior"

MACAQUE_NODES = 91
MACAQUE_EDGES = 1401

CSV_COLUMNS = (
    "experiment", "method", "n", "n0", "m", "sigma", "beta", "eps", "eta",
    "trial", "error", "objective", "status", "iterations",
    "primal_residual", "dual_residual",
)


@dataclass(frozen=True)
class TrialResult:
    experiment: str
    method: str
    n: int
    n0: Optional[int]
    m: Optional[int]
    sigma: Optional[float]
    beta: float
    eps: float
    eta: int
    trial: int
    error: float
    objective: float
    status: str
    iterations: int
    primal_residual: float
    dual_residual: float
    wall_time: float = 0.0


@dataclass(frozen=True)
class ExperimentConfig:
    """Grids and knobs for one experiment run.

    beta_grid and eps_grid hold coefficients interpreted through their
    scale modes: "absolute", "n2" (times n^2, the natural growth of the
    shrinkage weight against the trace term), or "n32" (times n^1.5, the
    growth of the Laplacian Frobenius norm for dense graphons).
    """

    experiment: str
    graphon: Optional[dict] = None
    dataset_path: Optional[str] = None
    sizes: tuple = ()
    subgraph_sizes: tuple = ()
    signal_counts: tuple = ()
    noise_levels: tuple = ()
    beta_grid: tuple = (4.0, 16.0, 64.0)
    beta_scale: str = "n2"
    eps_grid: tuple = (0.075,)
    eps_scale: str = "n32"
    eta: int = 0
    trials: int = 20
    tuning_trials: int = 5
    master_seed: int = 20250101
    filter_frac: float = 0.9
    weighted: bool = False
    subgraph_source: str = "independent"
    solver: SolverConfig = field(default_factory=lambda: SolverConfig(tolerance=1e-5))

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; known: {EXPERIMENTS}")
        if self.trials < 1 or self.tuning_trials < 1:
            raise ConfigError("trials and tuning_trials must be >= 1")
        for name in ("sizes", "subgraph_sizes", "signal_counts", "noise_levels",
                     "beta_grid", "eps_grid"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.beta_scale not in ("absolute", "n2"):
            raise ConfigError(f"unknown beta_scale {self.beta_scale!r}")
        if self.eps_scale not in ("absolute", "n32"):
            raise ConfigError(f"unknown eps_scale {self.eps_scale!r}")
        needed = {
            "convergence": ("sizes", "beta_grid", "eps_grid"),
            "noisy_templates": ("sizes", "signal_counts", "beta_grid", "eps_grid"),
            "subgraph_prior": ("sizes", "subgraph_sizes", "signal_counts", "beta_grid", "eps_grid"),
            "dataset_denoise": ("subgraph_sizes", "noise_levels", "beta_grid", "eps_grid"),
        }[self.experiment]
        for name in needed:
            if not getattr(self, name):
                raise ConfigError(f"{self.experiment} requires a nonempty {name} grid")
        if self.graphon is not None:
            w = graphon_mod.from_config(self.graphon)
            if self.experiment in ("convergence", "noisy_templates") and w.family != "quadratic_sum":
                raise ConfigError(
                    f"{self.experiment} compares against the alternate quadratic-sum "
                    f"graphon and needs a quadratic_sum base, got {w.family!r}")
        if self.subgraph_source not in ("independent", "induced"):
            raise ConfigError(f"unknown subgraph_source {self.subgraph_source!r}")

    def to_json(self) -> dict:
        out = {
            "experiment": self.experiment,
            "graphon": self.graphon,
            "dataset_path": self.dataset_path,
            "sizes": list(self.sizes),
            "subgraph_sizes": list(self.subgraph_sizes),
            "signal_counts": list(self.signal_counts),
            "noise_levels": list(self.noise_levels),
            "beta_grid": list(self.beta_grid),
            "beta_scale": self.beta_scale,
            "eps_grid": list(self.eps_grid),
            "eps_scale": self.eps_scale,
            "eta": self.eta,
            "trials": self.trials,
            "tuning_trials": self.tuning_trials,
            "master_seed": self.master_seed,
            "filter_frac": self.filter_frac,
            "weighted": self.weighted,
            "subgraph_source": self.subgraph_source,
            "solver": self.solver.to_dict(),
        }
        return out


def default_config(experiment: str) -> ExperimentConfig:
    """Calibrated defaults reproducing the four experiment panels."""
    if experiment == "convergence":
        return ExperimentConfig(
            experiment=experiment,
            graphon={"family": "quadratic_sum", "gamma": 0.7},
            sizes=(20, 40, 60, 80, 100),
            beta_grid=(4.0, 16.0, 64.0),
            eps_grid=(0.075,),
            eta=0,
            trials=20,
            tuning_trials=5,
        )
    if experiment == "noisy_templates":
        return ExperimentConfig(
            experiment=experiment,
            graphon={"family": "quadratic_sum", "gamma": 0.7},
            sizes=(40,),
            signal_counts=(100, 1000, 10000),
            beta_grid=(4.0, 16.0, 64.0),
            eps_grid=(0.02, 0.05, 0.1, 0.2),
            eta=2,
            trials=20,
            tuning_trials=3,
        )
    if experiment == "subgraph_prior":
        return ExperimentConfig(
            experiment=experiment,
            graphon={"family": "max_decay", "a": 0.8},
            sizes=(100,),
            subgraph_sizes=(10, 30, 50, 70, 90),
            signal_counts=(100, 1000, 10000),
            beta_grid=(4.0, 16.0, 64.0),
            eps_grid=(0.02, 0.05, 0.1, 0.2),
            eta=2,
            trials=20,
            tuning_trials=3,
        )
    if experiment == "dataset_denoise":
        return ExperimentConfig(
            experiment=experiment,
            dataset_path="data/macaque_cortex_stand_in.edges",
            subgraph_sizes=(9, 18, 45, 91),
            noise_levels=(0.05, 0.1, 0.2, 0.4),
            beta_grid=(4.0, 16.0, 64.0),
            eps_grid=(0.02, 0.05, 0.1, 0.2),
            eta=2,
            trials=20,
            tuning_trials=3,
        )
    raise ConfigError(f"unknown experiment {experiment!r}")


def config_from_json(cfg: dict) -> ExperimentConfig:
    """Build a config from a JSON dict, starting from the experiment's
    defaults and overriding the provided keys (strictly checked)."""
    if not isinstance(cfg, dict) or "experiment" not in cfg:
        raise ConfigError("experiment config must be a dict with an 'experiment' key")
    base = default_config(cfg["experiment"])
    known = set(base.to_json())
    extra = set(cfg) - known
    if extra:
        raise ConfigError(f"unknown config keys {sorted(extra)}")
    merged = base.to_json()
    merged.update(cfg)
    solver_cfg = SolverConfig.from_dict(merged.pop("solver"))
    try:
        return ExperimentConfig(solver=solver_cfg, **merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# seeding

def derive_seed(master_seed: int, *parts) -> int:
    """Stable 64-bit seed from the master seed and a coordinate tuple."""
    norm = []
    for p in parts:
        if isinstance(p, (np.floating, float)):
            norm.append(repr(float(p)))
        elif isinstance(p, (np.integer, int)):
            norm.append(int(p))
        else:
            norm.append(str(p))
    payload = repr((int(master_seed), *norm)).encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


# ---------------------------------------------------------------------------
# grid search

def grid_search(evaluate, beta_grid, eps_grid, budget: Optional[int] = None):
    """Exhaustive search over beta x eps, minimizing ``evaluate(beta, eps)``.

    NaN scores count as +inf; ties break toward smaller beta, then smaller
    eps.  ``budget`` optionally caps the number of evaluated pairs (taken
    in sorted order).
    """
    candidates = sorted((float(b), float(e)) for b in beta_grid for e in eps_grid)
    if not candidates:
        raise ValueError("grid_search needs nonempty grids")
    if budget is not None:
        candidates = candidates[: max(1, int(budget))]
    best = None
    best_score = np.inf
    for b, e in candidates:
        score = evaluate(b, e)
        score = np.inf if score is None or np.isnan(score) else float(score)
        if score < best_score:
            best, best_score = (b, e), score
    return best if best is not None else candidates[0]


def _resolve_grid(values, scale: str, n: int):
    if scale == "absolute":
        return [float(v) for v in values]
    if scale == "n2":
        return [float(v) * n * n for v in values]
    if scale == "n32":
        return [float(v) * n**1.5 for v in values]
    raise ConfigError(f"unknown grid scale {scale!r}")


def _mean_or_nan(errors):
    vals = [e for e in errors if not np.isnan(e)]
    return float(np.mean(vals)) if vals else float("nan")


def _solve_for_error(templates, prior, beta, eps, eta, solver_cfg, l_true):
    t0 = time.perf_counter()
    problem = build_problem(templates, prior, beta, eps, eta)
    sol = solve(problem, solver_cfg)
    wall = time.perf_counter() - t0
    if sol.status == "infeasible":
        return float("nan"), sol, wall
    try:
        err = recovery_error(sol.laplacian, l_true)
    except DegenerateInputError:
        err = float("nan")
    return err, sol, wall


def _result(cfg, method, *, n, n0=None, m=None, sigma=None, beta, eps, trial, err, sol, wall):
    return TrialResult(
        experiment=cfg.experiment,
        method=method,
        n=int(n),
        n0=None if n0 is None else int(n0),
        m=None if m is None else int(m),
        sigma=None if sigma is None else float(sigma),
        beta=float(beta),
        eps=float(eps),
        eta=int(cfg.eta),
        trial=int(trial),
        error=float(err),
        objective=float(sol.objective),
        status=sol.status,
        iterations=int(sol.iterations),
        primal_residual=float(sol.primal_residual),
        dual_residual=float(sol.dual_residual),
        wall_time=float(wall),
    )


def _paired_graphons(cfg) -> tuple:
    w = graphon_mod.from_config(cfg.graphon)
    w_alt = graphon_mod.quadratic_sum(1.0 - w.params["gamma"])
    return w, w_alt


def _nested_subgraph(g: Graph, n0: int, seed: int) -> Graph:
    """Uniform n0-subset taken as a prefix of one seeded permutation, so a
    trial's subgraphs are nested across n0 (marginally still uniform;
    pairs the n0 curves without changing their means)."""
    perm = np.random.default_rng(seed).permutation(g.n)
    idx = np.sort(perm[:n0])
    return Graph(g.adjacency[np.ix_(idx, idx)])


# ---------------------------------------------------------------------------
# experiment cells

def _convergence_cell(cfg: ExperimentConfig, n: int) -> list:
    w, w_alt = _paired_graphons(cfg)
    betas = _resolve_grid(cfg.beta_grid, cfg.beta_scale, n)
    epss = _resolve_grid(cfg.eps_grid, cfg.eps_scale, n)
    priors = {
        METHOD_TRUE: graphon_mod.degree_function(w, n),
        METHOD_ALT: graphon_mod.degree_function(w_alt, n),
        METHOD_NONE: None,
    }

    def make_eval(prior, force_beta=None):
        def evaluate(beta, eps):
            errs = []
            for t in range(cfg.tuning_trials):
                g = graphon_mod.sample_graph(
                    w, n, derive_seed(cfg.master_seed, "convergence", "graph", n, t, "tune"))
                l_true = laplacian(g)
                templ = exact_templates(l_true)
                b = beta if force_beta is None else force_beta
                err, _, _ = _solve_for_error(templ, prior, b, eps, cfg.eta, cfg.solver, l_true)
                errs.append(err)
            return _mean_or_nan(errs)
        return evaluate

    tuned = {
        METHOD_TRUE: grid_search(make_eval(priors[METHOD_TRUE]), betas, epss),
        METHOD_ALT: grid_search(make_eval(priors[METHOD_ALT]), betas, epss),
        METHOD_NONE: grid_search(make_eval(None, force_beta=0.0), [0.0], epss),
    }

    results = []
    for t in range(cfg.trials):
        g = graphon_mod.sample_graph(
            w, n, derive_seed(cfg.master_seed, "convergence", "graph", n, t, "report"))
        l_true = laplacian(g)
        templ = exact_templates(l_true)
        for method in (METHOD_TRUE, METHOD_ALT, METHOD_NONE):
            beta, eps = tuned[method]
            err, sol, wall = _solve_for_error(
                templ, priors[method], beta, eps, cfg.eta, cfg.solver, l_true)
            results.append(_result(cfg, method, n=n, beta=beta, eps=eps,
                                   trial=t, err=err, sol=sol, wall=wall))
    return results


def _noisy_templates_cell(cfg: ExperimentConfig, m: int) -> list:
    w, w_alt = _paired_graphons(cfg)
    n = cfg.sizes[0]
    betas = _resolve_grid(cfg.beta_grid, cfg.beta_scale, n)
    epss = _resolve_grid(cfg.eps_grid, cfg.eps_scale, n)
    priors = {
        METHOD_TRUE: graphon_mod.degree_function(w, n),
        METHOD_ALT: graphon_mod.degree_function(w_alt, n),
        METHOD_NONE: None,
    }

    def trial_inputs(t, role):
        g = graphon_mod.sample_graph(
            w, n, derive_seed(cfg.master_seed, "noisy_templates", "graph", n, t, role))
        l_true = laplacian(g)
        filt = default_consensus_filter(l_true, cfg.filter_frac)
        sig = generate_signals(
            filt, l_true, m,
            derive_seed(cfg.master_seed, "noisy_templates", "signals", n, m, t, role))
        return l_true, estimate_templates(sig)

    def make_eval(prior, force_beta=None):
        def evaluate(beta, eps):
            errs = []
            for t in range(cfg.tuning_trials):
                l_true, templ = trial_inputs(t, "tune")
                b = beta if force_beta is None else force_beta
                err, _, _ = _solve_for_error(templ, prior, b, eps, cfg.eta, cfg.solver, l_true)
                errs.append(err)
            return _mean_or_nan(errs)
        return evaluate

    tuned = {
        METHOD_TRUE: grid_search(make_eval(priors[METHOD_TRUE]), betas, epss),
        METHOD_ALT: grid_search(make_eval(priors[METHOD_ALT]), betas, epss),
        METHOD_NONE: grid_search(make_eval(None, force_beta=0.0), [0.0], epss),
    }

    results = []
    for t in range(cfg.trials):
        l_true, templ = trial_inputs(t, "report")
        for method in (METHOD_TRUE, METHOD_ALT, METHOD_NONE):
            beta, eps = tuned[method]
            err, sol, wall = _solve_for_error(
                templ, priors[method], beta, eps, cfg.eta, cfg.solver, l_true)
            results.append(_result(cfg, method, n=n, m=m, beta=beta, eps=eps,
                                   trial=t, err=err, sol=sol, wall=wall))
    return results


def _subgraph_prior_cell(cfg: ExperimentConfig, m: int) -> list:
    w = graphon_mod.from_config(cfg.graphon)
    n = cfg.sizes[0]
    betas = _resolve_grid(cfg.beta_grid, cfg.beta_scale, n)
    epss = _resolve_grid(cfg.eps_grid, cfg.eps_scale, n)
    exact_prior = graphon_mod.degree_function(w, n)
    pivot_n0 = sorted(cfg.subgraph_sizes)[len(cfg.subgraph_sizes) // 2]

    def trial_inputs(t, role):
        g = graphon_mod.sample_graph(
            w, n, derive_seed(cfg.master_seed, "subgraph_prior", "graph", n, t, role))
        l_true = laplacian(g)
        filt = default_consensus_filter(l_true, cfg.filter_frac)
        sig = generate_signals(
            filt, l_true, m,
            derive_seed(cfg.master_seed, "subgraph_prior", "signals", n, m, t, role))
        return g, l_true, estimate_templates(sig)

    def prior_for(g_target, n0, t, role):
        # default: the degrees come from an independent draw of the same
        # graphon (an n0-subgraph of a graphon sample is itself a graphon
        # sample); "induced" reuses the observed graph and then the prior
        # also carries the target's realized degrees
        if cfg.subgraph_source == "independent":
            src = graphon_mod.sample_graph(
                w, n, derive_seed(cfg.master_seed, "subgraph_prior", "prior_graph", n, t, role))
        else:
            src = g_target
        sub = _nested_subgraph(
            src, n0, derive_seed(cfg.master_seed, "subgraph_prior", "subgraph", n, t, role))
        return empirical_degree_function(sub, n)

    # per m: one (beta, eps) tuned at the middle subgraph size and shared
    # across the n0 curves so their comparison is apples-to-apples; the
    # exact-degree-function method is tuned on its own
    def eval_subgraph(beta, eps):
        errs = []
        for t in range(cfg.tuning_trials):
            g, l_true, templ = trial_inputs(t, "tune")
            prior = prior_for(g, pivot_n0, t, "tune")
            err, _, _ = _solve_for_error(templ, prior, beta, eps, cfg.eta, cfg.solver, l_true)
            errs.append(err)
        return _mean_or_nan(errs)

    def eval_exact(beta, eps):
        errs = []
        for t in range(cfg.tuning_trials):
            _, l_true, templ = trial_inputs(t, "tune")
            err, _, _ = _solve_for_error(templ, exact_prior, beta, eps, cfg.eta, cfg.solver, l_true)
            errs.append(err)
        return _mean_or_nan(errs)

    beta_s, eps_s = grid_search(eval_subgraph, betas, epss)
    beta_e, eps_e = grid_search(eval_exact, betas, epss)

    results = []
    for t in range(cfg.trials):
        g, l_true, templ = trial_inputs(t, "report")
        for n0 in cfg.subgraph_sizes:
            prior = prior_for(g, n0, t, "report")
            err, sol, wall = _solve_for_error(templ, prior, beta_s, eps_s, cfg.eta, cfg.solver, l_true)
            results.append(_result(cfg, f"subgraph({n0})", n=n, n0=n0, m=m, beta=beta_s,
                                   eps=eps_s, trial=t, err=err, sol=sol, wall=wall))
        err, sol, wall = _solve_for_error(templ, exact_prior, beta_e, eps_e, cfg.eta, cfg.solver, l_true)
        results.append(_result(cfg, METHOD_TRUE, n=n, m=m, beta=beta_e, eps=eps_e,
                               trial=t, err=err, sol=sol, wall=wall))
    return results


def _dataset_denoise_cell(cfg: ExperimentConfig, sigma: float, tuned: tuple) -> list:
    g_true = load_dataset(cfg.dataset_path, weighted=cfg.weighted)
    n = g_true.n
    l_true = laplacian(g_true)
    beta, eps = tuned
    results = []
    for t in range(cfg.trials):
        templ = templates_from_noisy_adjacency(
            g_true, sigma, derive_seed(cfg.master_seed, "dataset_denoise", "noise", sigma, t, "report"))
        for n0 in cfg.subgraph_sizes:
            sub = _nested_subgraph(
                g_true, n0,
                derive_seed(cfg.master_seed, "dataset_denoise", "subgraph", t, "report"))
            prior = empirical_degree_function(sub, n)
            err, sol, wall = _solve_for_error(templ, prior, beta, eps, cfg.eta, cfg.solver, l_true)
            results.append(_result(cfg, f"subgraph({n0})", n=n, n0=n0, sigma=sigma, beta=beta,
                                   eps=eps, trial=t, err=err, sol=sol, wall=wall))
    return results


def _tune_dataset_denoise(cfg: ExperimentConfig) -> tuple:
    """One (beta, eps) for the whole panel, tuned at middle noise and
    subgraph size, so both monotone trends stay tuning-free."""
    g_true = load_dataset(cfg.dataset_path, weighted=cfg.weighted)
    n = g_true.n
    l_true = laplacian(g_true)
    betas = _resolve_grid(cfg.beta_grid, cfg.beta_scale, n)
    epss = _resolve_grid(cfg.eps_grid, cfg.eps_scale, n)
    sigma_pivot = sorted(cfg.noise_levels)[len(cfg.noise_levels) // 2]
    n0_pivot = sorted(cfg.subgraph_sizes)[len(cfg.subgraph_sizes) // 2]

    def evaluate(beta, eps):
        errs = []
        for t in range(cfg.tuning_trials):
            templ = templates_from_noisy_adjacency(
                g_true, sigma_pivot,
                derive_seed(cfg.master_seed, "dataset_denoise", "noise", sigma_pivot, t, "tune"))
            sub = _nested_subgraph(
                g_true, n0_pivot,
                derive_seed(cfg.master_seed, "dataset_denoise", "subgraph", t, "tune"))
            prior = empirical_degree_function(sub, n)
            err, _, _ = _solve_for_error(templ, prior, beta, eps, cfg.eta, cfg.solver, l_true)
            errs.append(err)
        return _mean_or_nan(errs)

    return grid_search(evaluate, betas, epss)


# ---------------------------------------------------------------------------
# dataset loading

def load_dataset(path, weighted: bool = False,
                 expected_nodes: int = MACAQUE_NODES,
                 expected_edges: int = MACAQUE_EDGES) -> Graph:
    """Read the connectome edge list; a count mismatch is a warning (the
    observed counts are reported), a missing file is fatal."""
    if path is None:
        raise DatasetError("no dataset path configured")
    if not Path(path).exists():
        raise DatasetError(f"dataset file not found: {path}")
    g = read_edge_list(path, one_indexed=True, weighted=weighted)
    if g.n != expected_nodes or g.edge_count() != expected_edges:
        warnings.warn(
            f"dataset {path}: expected {expected_nodes} nodes / {expected_edges} edges, "
            f"found {g.n} nodes / {g.edge_count()} edges",
            stacklevel=2,
        )
    return g


# ---------------------------------------------------------------------------
# experiment dispatch

def _cell_entry(args):
    cfg_json, kind, payload = args
    cfg = config_from_json(cfg_json)
    if kind == "convergence":
        return _convergence_cell(cfg, payload["n"])
    if kind == "noisy_templates":
        return _noisy_templates_cell(cfg, payload["m"])
    if kind == "subgraph_prior":
        return _subgraph_prior_cell(cfg, payload["m"])
    if kind == "dataset_denoise":
        return _dataset_denoise_cell(cfg, payload["sigma"], tuple(payload["tuned"]))
    raise ConfigError(f"unknown cell kind {kind!r}")


def _map_cells(cfg: ExperimentConfig, payloads: list, jobs: int) -> list:
    tasks = [(cfg.to_json(), cfg.experiment, p) for p in payloads]
    if jobs <= 1 or len(tasks) <= 1:
        chunks = [_cell_entry(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_cell_entry, tasks))
    return [r for chunk in chunks for r in chunk]


def run_convergence(cfg: ExperimentConfig, jobs: int = 1) -> list:
    """Fig. 1A: recovery error vs graph size for the three priors."""
    return _map_cells(cfg, [{"n": n} for n in cfg.sizes], jobs)


def run_noisy_templates(cfg: ExperimentConfig, jobs: int = 1) -> list:
    """Fig. 1B: recovery from sample-covariance templates vs signal count."""
    return _map_cells(cfg, [{"m": m} for m in cfg.signal_counts], jobs)


def run_subgraph_prior(cfg: ExperimentConfig, jobs: int = 1) -> list:
    """Fig. 1C: empirical subgraph degree priors vs the exact one."""
    return _map_cells(cfg, [{"m": m} for m in cfg.signal_counts], jobs)


def run_dataset_denoise(cfg: ExperimentConfig, jobs: int = 1) -> list:
    """Fig. 1D: denoising the connectome with subgraph degree priors."""
    tuned = _tune_dataset_denoise(cfg)
    payloads = [{"sigma": s, "tuned": list(tuned)} for s in cfg.noise_levels]
    return _map_cells(cfg, payloads, jobs)


_RUNNERS = {
    "convergence": run_convergence,
    "noisy_templates": run_noisy_templates,
    "subgraph_prior": run_subgraph_prior,
    "dataset_denoise": run_dataset_denoise,
}


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> list:
    return _RUNNERS[cfg.experiment](cfg, jobs)


# ---------------------------------------------------------------------------
# emission

def _sort_key(r: TrialResult):
    return (
        r.experiment, r.method,
        r.n, -1 if r.n0 is None else r.n0, -1 if r.m is None else r.m,
        -1.0 if r.sigma is None else r.sigma, r.beta, r.eps, r.trial,
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_results(results: list, out_dir) -> dict:
    """Write results.csv (canonical bytes), summary.json (per-cell mean,
    std, counts), and timings.csv (wall times, excluded from the
    determinism guarantee).  Returns the written paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        rows = sorted(results, key=_sort_key)
        csv_path = out / "results.csv"
        lines = [",".join(CSV_COLUMNS)]
        for r in rows:
            lines.append(",".join(_fmt(getattr(r, c)) for c in CSV_COLUMNS))
        csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

        timing_path = out / "timings.csv"
        tlines = ["experiment,method,n,n0,m,sigma,trial,wall_time"]
        for r in rows:
            tlines.append(",".join(_fmt(v) for v in (
                r.experiment, r.method, r.n, r.n0, r.m, r.sigma, r.trial, r.wall_time)))
        timing_path.write_text("\n".join(tlines) + "\n", encoding="utf-8")

        summary_path = out / "summary.json"
        summary_path.write_text(
            json.dumps(summarize(results), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write results under {out_dir}: {exc}") from None
    return {"csv": csv_path, "summary": summary_path, "timings": timing_path}


def summarize(results: list) -> dict:
    """Per-cell statistics keyed by method and grid coordinates."""
    cells: dict[tuple, list] = {}
    for r in results:
        key = (r.experiment, r.method, r.n, r.n0, r.m, r.sigma, r.beta, r.eps, r.eta)
        cells.setdefault(key, []).append(r)
    def none_safe(key):
        return tuple(-1 if v is None else v for v in key)

    out = []
    for key in sorted(cells, key=none_safe):
        group = cells[key]
        errs = np.array([g.error for g in group], dtype=float)
        good = errs[~np.isnan(errs)]
        out.append({
            "experiment": key[0], "method": key[1], "n": key[2], "n0": key[3],
            "m": key[4], "sigma": key[5], "beta": key[6], "eps": key[7], "eta": key[8],
            "count": int(good.size),
            "failed": int(errs.size - good.size),
            "error_mean": float(good.mean()) if good.size else None,
            "error_std": float(good.std(ddof=1)) if good.size > 1 else 0.0,
            "mean_wall_time": float(np.mean([g.wall_time for g in group])),
        })
    return {"cells": out}


def read_results_csv(path) -> list:
    """Parse a results.csv back into TrialResult rows (wall times are not
    stored there and read back as 0)."""
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not text:
        return []
    header = text[0].split(",")
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    out = []
    for line in text[1:]:
        vals = dict(zip(CSV_COLUMNS, line.split(",")))
        out.append(TrialResult(
            experiment=vals["experiment"],
            method=vals["method"],
            n=int(vals["n"]),
            n0=int(vals["n0"]) if vals["n0"] else None,
            m=int(vals["m"]) if vals["m"] else None,
            sigma=float(vals["sigma"]) if vals["sigma"] else None,
            beta=float(vals["beta"]),
            eps=float(vals["eps"]),
            eta=int(vals["eta"]),
            trial=int(vals["trial"]),
            error=float(vals["error"]),
            objective=float(vals["objective"]),
            status=vals["status"],
            iterations=int(vals["iterations"]),
            primal_residual=float(vals["primal_residual"]),
            dual_residual=float(vals["dual_residual"]),
        ))
    return out


def cell_means(results: list, method: str, axis: str):
    """Mean/std/count of error along one coordinate for one method,
    returned as {coordinate: (mean, std, count)}."""
    groups: dict = {}
    for r in results:
        if r.method != method:
            continue
        groups.setdefault(getattr(r, axis), []).append(r.error)
    out = {}
    for coord, errs in sorted(groups.items()):
        arr = np.array(errs, dtype=float)
        arr = arr[~np.isnan(arr)]
        if arr.size:
            std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
            out[coord] = (float(arr.mean()), std, int(arr.size))
    return out
