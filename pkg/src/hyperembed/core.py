"""Hypergraph data model and incidence/bipartite/clique-expansion constructions.

Nodes occupy bipartite indices 0..n-1 and hyperedge centres n..n+s-1, so the
map between incidence entry (i, j) and bipartite pair (i, n+j) is mechanical.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Hypergraph:
    """A hypergraph with n nodes (indexed 0..n-1) and s hyperedges.

    Hyperedges are stored as frozensets of node indices. Empty hyperedges are
    permitted; downstream connectivity checks will then report disconnected.
    """

    n: int
    hyperedges: tuple[frozenset[int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one node, got n={self.n}")
        if len(self.hyperedges) < 1:
            raise ValueError("need at least one hyperedge")
        edges = tuple(frozenset(e) for e in self.hyperedges)
        object.__setattr__(self, "hyperedges", edges)
        for j, edge in enumerate(edges):
            for i in edge:
                if not (0 <= i < self.n):
                    raise ValueError(f"hyperedge {j} contains out-of-range node {i}")

    @property
    def s(self) -> int:
        return len(self.hyperedges)

    def incidence(self) -> np.ndarray:
        """Binary n x s incidence matrix; entry (i, j) is 1 iff node i is in hyperedge j."""
        B = np.zeros((self.n, self.s))
        for j, edge in enumerate(self.hyperedges):
            for i in edge:
                B[i, j] = 1.0
        return B


def hypergraph_from_incidence(B: np.ndarray) -> Hypergraph:
    """Reconstruct the hypergraph whose binary incidence matrix is B.

    Round-trips with :meth:`Hypergraph.incidence`: hyperedge j collects the
    row indices where column j is 1. Zero columns yield empty hyperedges.
    """
    B = np.asarray(B)
    edges = tuple(frozenset(np.flatnonzero(B[:, j]).tolist()) for j in range(B.shape[1]))
    return Hypergraph(n=B.shape[0], hyperedges=edges)


def bipartite_adjacency(B: np.ndarray) -> np.ndarray:
    """Adjacency [[0, B], [B^T, 0]] of the incidence graph, shape (n+s, n+s).

    Accepts arbitrary real weights, not just binary incidence.
    """
    B = np.asarray(B, dtype=float)
    n, s = B.shape
    A = np.zeros((n + s, n + s))
    A[:n, n:] = B
    A[n:, :n] = B.T
    return A


def clique_expansion(B: np.ndarray) -> np.ndarray:
    """Weighted node graph with adjacency B @ B.T and zeroed diagonal.

    The off-diagonal weight of {u, v} is the number of hyperedges they share.
    """
    B = np.asarray(B, dtype=float)
    A = B @ B.T
    np.fill_diagonal(A, 0.0)
    return A


def is_connected(adjacency: np.ndarray) -> bool:
    """True iff the graph induced by nonzero entries is connected (BFS)."""
    A = np.asarray(adjacency)
    N = A.shape[0]
    if N == 0:
        return True
    seen = np.zeros(N, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.flatnonzero(A[i]):
            if not seen[j]:
                seen[j] = True
                queue.append(j)
    return bool(seen.all())
