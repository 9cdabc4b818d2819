#!/usr/bin/env python3
"""Freeze reference objectives for the solver-oracle acceptance test.

Solves the 25 shared instances (tests/reference_instances.py) with an
established interior-point conic solver through cvxpy and records the
optimal objectives in tests/fixtures/solver_reference.json.  Run offline
from the repository root whenever the instance recipe changes:

    python3 scripts/make_solver_fixtures.py

Requires the `dev` extra (cvxpy).
"""

import json
import sys
from pathlib import Path

import cvxpy as cp
import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from reference_instances import reference_instances  # noqa: E402

OUT = ROOT / "tests" / "fixtures" / "solver_reference.json"


def reference_objective(inst) -> float:
    n = inst["n"]
    v = inst["templates"].vectors
    d = inst["prior"].values
    beta, eps, eta = inst["beta"], inst["eps"], inst["eta"]
    lap = cp.Variable((n, n), symmetric=True)
    lam = cp.Variable(n)
    approx = v @ cp.diag(lam) @ v.T
    mask = np.ones((n, n)) - np.eye(n)
    constraints = [
        cp.norm(lap - approx, "fro") <= eps,
        cp.multiply(mask, lap) <= 0,
        cp.sum(lap, axis=1) == 0,
        lam[0] == 0,
        lam >= 0,
    ]
    for i in range(n - 1 - eta):
        constraints.append(lam[i] <= lam[i + 1 + eta])
    if beta == 0.0:
        constraints.append(cp.trace(lap) == n)
    objective = cp.sum(cp.abs(lap)) + (beta / n) * cp.sum_squares(lam / n - d)
    problem = cp.Problem(cp.Minimize(objective), constraints)
    problem.solve(solver=cp.CLARABEL)
    if problem.status != cp.OPTIMAL:
        raise RuntimeError(f"{inst['key']}: reference solve ended with {problem.status}")
    return float(problem.value)


def main() -> None:
    records = []
    for inst in reference_instances():
        obj = reference_objective(inst)
        records.append({
            "key": inst["key"],
            "n": inst["n"],
            "eta": inst["eta"],
            "beta": inst["beta"],
            "eps": inst["eps"],
            "objective": obj,
        })
        print(f"{inst['key']}: n={inst['n']} beta={inst['beta']} -> {obj:.8f}")
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({
        "reference_solver": f"cvxpy {cp.__version__} / CLARABEL",
        "instances": records,
    }, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
