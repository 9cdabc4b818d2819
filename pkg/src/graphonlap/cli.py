"""Command-line interface.

Subcommands: sample (graphon -> edge list), degree-fn (graphon or graph ->
prior CSV), infer (templates + prior -> Laplacian), experiment (one of the
four panels), fetch-dataset (validate the connectome edge list; no
downloading).  Exit codes: 0 ok, 2 config error, 3 dataset error, 4 solver
infeasible on every cell.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import graphon as graphon_mod
from . import harness
from .errors import ConfigError, DatasetError
from .graphs import empirical_degree_function, read_edge_list
from .priors import load_prior, save_prior
from .signals import SpectralTemplates, load_matrix, save_matrix
from .solver import SolverConfig, build_problem, solve

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATASET = 3
EXIT_INFEASIBLE = 4


def write_edge_list(graph, path, one_indexed: bool = True) -> None:
    """Write "u v" lines for the nonzero upper triangle."""
    offset = 1 if one_indexed else 0
    rows, cols = np.nonzero(np.triu(graph.adjacency, 1))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {graph.n} nodes, {rows.size} edges, {'1' if one_indexed else '0'}-indexed\n")
        for u, v in zip(rows, cols):
            fh.write(f"{u + offset} {v + offset}\n")


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from None


def _cmd_sample(args) -> int:
    w = graphon_mod.from_config(_load_json(args.graphon))
    g = graphon_mod.sample_graph(w, args.n, args.seed)
    write_edge_list(g, args.out)
    print(f"wrote {g.n} nodes / {g.edge_count()} edges to {args.out}")
    return EXIT_OK


def _cmd_degree_fn(args) -> int:
    if bool(args.graphon) == bool(args.edges):
        raise ConfigError("degree-fn needs exactly one of --graphon or --edges")
    if args.graphon:
        w = graphon_mod.from_config(_load_json(args.graphon))
        prior = graphon_mod.degree_function(w, args.grid)
    else:
        g = read_edge_list(args.edges, one_indexed=not args.zero_indexed,
                           weighted=args.weighted)
        prior = empirical_degree_function(g, args.grid)
    save_prior(prior, args.out)
    print(f"wrote {prior.size}-point prior ({prior.source}) to {args.out}")
    return EXIT_OK


def _cmd_infer(args) -> int:
    templates = SpectralTemplates(load_matrix(args.templates), source=f"file:{args.templates}")
    prior = load_prior(args.prior) if args.prior else None
    cfg = SolverConfig(tolerance=args.tolerance, max_iters=args.max_iters)
    problem = build_problem(templates, prior, args.beta, args.eps, args.eta)
    sol = solve(problem, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_matrix(out / "laplacian.bin", sol.laplacian.matrix)
    payload = {
        "status": sol.status,
        "objective": sol.objective,
        "iterations": sol.iterations,
        "primal_residual": sol.primal_residual,
        "dual_residual": sol.dual_residual,
        "beta": problem.beta,
        "eps": problem.epsilon,
        "eta": problem.eta,
        "lambda": [float(v) for v in sol.spectrum_vars],
    }
    (out / "solution.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"status={sol.status} objective={sol.objective:.6g} iters={sol.iterations}")
    return EXIT_INFEASIBLE if sol.status == "infeasible" else EXIT_OK


def _cmd_experiment(args) -> int:
    cfg_json = _load_json(args.config) if args.config else {"experiment": args.name}
    cfg_json.setdefault("experiment", args.name)
    if cfg_json["experiment"] != args.name:
        raise ConfigError(
            f"config is for {cfg_json['experiment']!r} but {args.name!r} was requested")
    if args.seed is not None:
        cfg_json["master_seed"] = args.seed
    cfg = harness.config_from_json(cfg_json)
    results = harness.run_experiment(cfg, jobs=args.jobs)
    paths = harness.emit_results(results, args.out)
    print(f"wrote {len(results)} trials to {paths['csv']}")
    if results and all(r.status == "infeasible" for r in results):
        print("every cell was infeasible", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _cmd_fetch_dataset(args) -> int:
    g = harness.load_dataset(args.path, weighted=args.weighted,
                             expected_nodes=args.expect_nodes,
                             expected_edges=args.expect_edges)
    ok = g.n == args.expect_nodes and g.edge_count() == args.expect_edges
    print(f"{args.path}: {g.n} nodes, {g.edge_count()} undirected edges "
          f"(expected {args.expect_nodes}/{args.expect_edges})")
    if args.check and not ok:
        raise DatasetError("dataset counts do not match the expected connectome")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphonlap",
        description="Graph Laplacian inference from spectral templates with graphon degree priors",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a graph from a graphon into an edge list")
    p.add_argument("--graphon", required=True, help="graphon JSON config file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("degree-fn", help="degree function of a graphon or observed graph")
    p.add_argument("--graphon", help="graphon JSON config file")
    p.add_argument("--edges", help="edge-list file")
    p.add_argument("--zero-indexed", action="store_true")
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_degree_fn)

    p = sub.add_parser("infer", help="recover a Laplacian from templates and an optional prior")
    p.add_argument("--templates", required=True, help="binary matrix of template columns")
    p.add_argument("--prior", help="prior CSV from degree-fn (omit for the no-prior baseline)")
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--eta", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=50_000)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_infer)

    p = sub.add_parser("experiment", help="run one of the four experiment panels")
    p.add_argument("name", choices=harness.EXPERIMENTS)
    p.add_argument("--config", help="experiment JSON config (defaults used when omitted)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("fetch-dataset", help="validate the connectome edge list (no download)")
    p.add_argument("--path", required=True)
    p.add_argument("--check", action="store_true")
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--expect-nodes", type=int, default=harness.MACAQUE_NODES)
    p.add_argument("--expect-edges", type=int, default=harness.MACAQUE_EDGES)
    p.set_defaults(func=_cmd_fetch_dataset)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DatasetError as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return EXIT_DATASET


if __name__ == "__main__":
    sys.exit(main())
