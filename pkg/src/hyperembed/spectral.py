"""Laplacian construction, symmetric eigendecomposition and spectral embeddings."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import bipartite_adjacency, clique_expansion, is_connected

logger = logging.getLogger(__name__)

# Eigenvalues with |lam| <= ZERO_EIGENVALUE_RTOL * max|lam| count as zero.
ZERO_EIGENVALUE_RTOL = 1e-9
# Gap between the D-th and (D+1)-th kept eigenvalue below which we warn.
ILL_CONDITIONED_GAP = 1e-6


class DisconnectedGraphError(ValueError):
    """The spectral embedding is ill-defined on a disconnected graph."""


class EigenDecompositionError(RuntimeError):
    """The symmetric eigensolver failed to converge."""


@dataclass(frozen=True)
class SpectralSystem:
    """All eigenpairs of a symmetric matrix, eigenvalues ascending.

    Column k of ``eigenvectors`` is the unit eigenvector for ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]

    def nonzero_indices(self) -> np.ndarray:
        """Indices of eigenvalues treated as nonzero, in ascending order."""
        lam = self.eigenvalues
        scale = np.max(np.abs(lam)) if lam.size else 0.0
        if scale == 0.0:
            return np.array([], dtype=int)
        return np.flatnonzero(np.abs(lam) > ZERO_EIGENVALUE_RTOL * scale)


@dataclass(frozen=True)
class Embedding:
    """Coordinates of n nodes followed by s hyperedge centres, shape (n+s, D)."""

    coords: np.ndarray
    n: int
    s: int

    def __post_init__(self):
        if self.coords.shape[0] != self.n + self.s:
            raise ValueError(
                f"coords has {self.coords.shape[0]} rows, expected n+s={self.n + self.s}"
            )

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    @property
    def nodes(self) -> np.ndarray:
        return self.coords[: self.n]

    @property
    def centres(self) -> np.ndarray:
        return self.coords[self.n :]

    def replace_coords(self, coords: np.ndarray) -> "Embedding":
        return Embedding(coords=coords, n=self.n, s=self.s)


def laplacian(adjacency: np.ndarray) -> np.ndarray:
    """Graph Laplacian diag(A 1) - A; its row sums vanish."""
    A = np.asarray(adjacency, dtype=float)
    return np.diag(A.sum(axis=1)) - A


def eig_sym(L: np.ndarray) -> SpectralSystem:
    """Full eigendecomposition of a symmetric matrix, ascending eigenvalues."""
    L = np.asarray(L, dtype=float)
    scale = np.linalg.norm(L, "fro")
    if scale > 0 and np.linalg.norm(L - L.T, "fro") > 1e-12 * scale:
        raise ValueError("matrix is not symmetric to working precision")
    try:
        lam, vecs = np.linalg.eigh(L)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(L) if L.size else float("nan")
        raise EigenDecompositionError(
            f"eigendecomposition failed on {L.shape[0]}x{L.shape[0]} matrix "
            f"(frobenius norm {scale:.3e}, condition estimate {cond:.3e})"
        ) from exc
    return SpectralSystem(eigenvalues=lam, eigenvectors=vecs)


def _embedding_columns(system: SpectralSystem, D: int) -> np.ndarray:
    """Eigenvectors of the D smallest nonzero eigenvalues, ascending."""
    nonzero = system.nonzero_indices()
    if D > nonzero.size:
        raise ValueError(
            f"embedding dimension {D} exceeds the {nonzero.size} nonzero eigenvalues"
        )
    kept = nonzero[:D]
    if nonzero.size > D:
        gap = system.eigenvalues[nonzero[D]] - system.eigenvalues[kept[-1]]
        if gap < ILL_CONDITIONED_GAP:
            logger.warning(
                "spectral embedding ill-conditioned: eigenvalue gap %.3e "
                "between dimensions %d and %d",
                gap,
                D,
                D + 1,
            )
    return system.eigenvectors[:, kept]


def spectral_embed_graph(adjacency: np.ndarray, D: int) -> np.ndarray:
    """D-dimensional spectral embedding of a connected weighted graph.

    Rows are node coordinates; columns are the unit eigenvectors of the graph
    Laplacian for the D smallest nonzero eigenvalues, each orthogonal to the
    constant vector. Coordinates are determined up to per-column sign.
    """
    if not is_connected(adjacency):
        raise DisconnectedGraphError(
            "graph is disconnected; the zero Laplacian eigenvalue is not simple "
            "and the spectral embedding is ill-defined"
        )
    return _embedding_columns(eig_sym(laplacian(adjacency)), D)


def spectral_embed(B: np.ndarray, D: int) -> Embedding:
    """Spectral embedding of the bipartite incidence graph of B.

    Node rows come first, hyperedge-centre rows after, matching the block
    structure of the bipartite adjacency.
    """
    B = np.asarray(B, dtype=float)
    n, s = B.shape
    coords = spectral_embed_graph(bipartite_adjacency(B), D)
    return Embedding(coords=coords, n=n, s=s)


def embedding_from_system(system: SpectralSystem, n: int, s: int, D: int) -> Embedding:
    """Embedding built from an existing decomposition of a bipartite Laplacian."""
    return Embedding(coords=_embedding_columns(system, D), n=n, s=s)


def centroid_init(B: np.ndarray, D: int) -> Embedding:
    """Clique-expansion spectral embedding with centroid-placed centres.

    Node rows are the spectral embedding of the weighted graph B @ B.T; the
    row of hyperedge j is the mean of its members' rows.
    """
    B = np.asarray(B, dtype=float)
    n, s = B.shape
    sizes = B.sum(axis=0)
    if np.any(sizes == 0):
        empty = np.flatnonzero(sizes == 0)
        raise ValueError(f"centroid of empty hyperedge(s) {empty.tolist()} is undefined")
    nodes = spectral_embed_graph(clique_expansion(B), D)
    centres = (B.T @ nodes) / sizes[:, None]
    return Embedding(coords=np.vstack([nodes, centres]), n=n, s=s)
