"""Geometric hypergraph embedding via spectral methods and gradient descent."""

from .analysis import (
    Partition,
    PerturbedHypergraph,
    ScoredRelations,
    adjusted_rand_index,
    cluster_trace,
    inject_missing,
    inject_spurious,
    kmeans,
    roc_auc,
    score_relations,
)
from .core import (
    Hypergraph,
    bipartite_adjacency,
    clique_expansion,
    hypergraph_from_incidence,
    is_connected,
)
from .gde import BatchSpec, GdeGradient, GdeResult, armijo_step, gde_gradient, gde_gradient_stochastic, gde_run
from .gdse import GdseGradient, GdseResult, gdse_gradient, gdse_run
from .loss import (
    LossParams,
    distances,
    hard_loss,
    smooth_incidence,
    smooth_indicator,
    smooth_loss,
)
from .rgh import GroundTruth, RghConfig, membership_from_geometry, sample_rgh
from .spectral import (
    DisconnectedGraphError,
    Embedding,
    SpectralSystem,
    centroid_init,
    eig_sym,
    laplacian,
    spectral_embed,
    spectral_embed_graph,
)
from .trace import DivergenceError, RunTrace, TraceRecord

__all__ = [name for name in dir() if not name.startswith("_")]
