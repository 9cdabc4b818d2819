"""Small graph builders and shared constants for the test suite."""

import numpy as np

from graphonlap.graphs import Graph


def complete_graph(n: int) -> Graph:
    return Graph(np.ones((n, n)) - np.eye(n))


def empty_graph(n: int) -> Graph:
    return Graph(np.zeros((n, n)))


def path_graph(n: int) -> Graph:
    a = np.zeros((n, n))
    for i in range(n - 1):
        a[i, i + 1] = a[i + 1, i] = 1.0
    return Graph(a)


def star_graph(leaves: int) -> Graph:
    n = leaves + 1
    a = np.zeros((n, n))
    a[0, 1:] = 1.0
    a[1:, 0] = 1.0
    return Graph(a)
