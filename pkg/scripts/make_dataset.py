#!/usr/bin/env python3
"""Generate the synthetic stand-in connectome shipped in data/.

The file mimics the format and size of the Rhesus Macaque cerebral-cortex
interareal network (91 regions, 1401 undirected pathways): a 1-indexed
"u v" edge list.  Edges are sampled from a decaying-kernel model with
heterogeneous expected degrees, then adjusted deterministically to hit the
exact published counts while keeping every node connected.

Run from the repository root:

    python3 scripts/make_dataset.py
"""

from pathlib import Path

import numpy as np

NODES = 91
EDGES = 1401
SEED = 20260420
OUT = Path(__file__).resolve().parent.parent / "data" / "macaque_cortex_stand_in.edges"


def main() -> None:
    rng = np.random.default_rng(SEED)
    density = EDGES / (NODES * (NODES - 1) / 2)
    # kernel 1 - a*max(x, y) has mean 1 - 2a/3; solve for the target density
    a = 1.5 * (1.0 - density)
    x = (np.arange(NODES) + 0.5) / NODES
    probs = 1.0 - a * np.maximum(x[:, None], x[None, :])
    coins = rng.random((NODES, NODES))
    adj = np.triu(coins < probs, 1).astype(int)
    adj = adj + adj.T

    # every node needs at least one incident edge or the edge list loses it
    for i in np.flatnonzero(adj.sum(axis=1) == 0):
        j = int(rng.integers(NODES - 1))
        j = j if j < i else j + 1
        adj[i, j] = adj[j, i] = 1

    # walk the pair list in a seeded random order, adding or removing
    # edges (never isolating a node) until the count is exact
    count = int(adj.sum() // 2)
    order = rng.permutation(NODES * (NODES - 1) // 2)
    rows, cols = np.triu_indices(NODES, 1)
    for e in order:
        if count == EDGES:
            break
        i, j = int(rows[e]), int(cols[e])
        if count < EDGES and adj[i, j] == 0:
            adj[i, j] = adj[j, i] = 1
            count += 1
        elif count > EDGES and adj[i, j] == 1 and adj[i].sum() > 1 and adj[j].sum() > 1:
            adj[i, j] = adj[j, i] = 0
            count -= 1
    assert count == EDGES, f"adjustment failed: {count} edges"
    assert adj.sum(axis=1).min() >= 1

    lines = [
        "% synthetic stand-in for the macaque cerebral-cortex network",
        f"% {NODES} nodes, {EDGES} undirected edges, 1-indexed",
        f"% generated by scripts/make_dataset.py (seed {SEED})",
    ]
    lines += [f"{i + 1} {j + 1}" for i, j in zip(*np.nonzero(np.triu(adj, 1)))]
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({NODES} nodes, {EDGES} edges)")


if __name__ == "__main__":
    main()
