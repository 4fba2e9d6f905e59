"""Random geometric hypergraph generator.

Nodes and hyperedge centres are sampled i.i.d. uniform on an axis-aligned box
(unit hypercube by default); node i belongs to hyperedge j iff their Euclidean
distance is at most the connection radius (inclusive boundary).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Hypergraph, hypergraph_from_incidence
from .spectral import Embedding


@dataclass(frozen=True)
class RghConfig:
    n: int
    s: int
    D: int
    r: float
    seed: int = 0
    # (low, high) per-axis bounds; broadcast over all D axes.
    domain: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.n < 1 or self.s < 1 or self.D < 1:
            raise ValueError("n, s and D must all be at least 1")
        if self.r < 0:
            raise ValueError(f"radius must be nonnegative, got {self.r}")
        if self.domain[1] <= self.domain[0]:
            raise ValueError(f"empty sampling domain {self.domain}")


@dataclass(frozen=True)
class GroundTruth:
    points: Embedding
    hypergraph: Hypergraph


def membership_from_geometry(points: Embedding, r: float) -> Hypergraph:
    """Hypergraph whose incidence is the radius rule d_ij <= r on the embedding."""
    d = np.linalg.norm(points.nodes[:, None, :] - points.centres[None, :, :], axis=2)
    return hypergraph_from_incidence((d <= r).astype(float))


def sample_rgh(cfg: RghConfig) -> GroundTruth:
    """Sample a random geometric hypergraph together with its generating points.

    Deterministic given the config: nodes are drawn first, then centres. The
    returned hypergraph agrees exactly with the radius rule on the points, so
    the original embedding is an exact solution of the reconstruction problem.
    """
    rng = np.random.default_rng(cfg.seed)
    low, high = cfg.domain
    nodes = rng.uniform(low, high, size=(cfg.n, cfg.D))
    centres = rng.uniform(low, high, size=(cfg.s, cfg.D))
    points = Embedding(coords=np.vstack([nodes, centres]), n=cfg.n, s=cfg.s)
    return GroundTruth(points=points, hypergraph=membership_from_geometry(points, cfg.r))
