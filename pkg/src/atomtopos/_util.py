from __future__ import annotations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components


class BudgetExceeded(RuntimeError):
    """An enumeration visited more states than its budget allows."""

    def __init__(self, what: str, count: int, budget: int):
        self.what = what
        self.count = count
        self.budget = budget
        super().__init__(f"{what}: budget of {budget} exceeded after {count} states")


class Limits:
    """Process-wide default budgets (visited states, subobjects)."""

    def __init__(self, states: int = 10**7, subobjects: int = 10**4):
        self.states = states
        self.subobjects = subobjects


LIMITS = Limits()


def components(n: int, edges) -> tuple[list[int], int]:
    """Connected-component labels for ``n`` nodes, numbered by first node."""
    if n == 0:
        return [], 0
    edges = list(edges)
    if edges:
        rows, cols = np.array(edges, dtype=np.int64).T
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, raw = connected_components(graph, directed=False)
    relabel: dict[int, int] = {}
    labels = [relabel.setdefault(int(r), len(relabel)) for r in raw]
    return labels, len(relabel)
