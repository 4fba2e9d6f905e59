"""Gradient descent on the bipartite weight matrix, through the spectral embedding.

Each iteration differentiates the smooth loss through the eigendecomposition of
the bipartite Laplacian (first-order eigenvector perturbation), updates the
weights B together with the radius r and sharpness tau by fixed learning
rates, and recomputes the spectral embedding.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import bipartite_adjacency, is_connected
from .loss import (
    LossParams,
    distances,
    hard_loss,
    incidence_norm_sq,
    indicator_grad_x,
    radius_sharpness_grad,
    smooth_indicator,
    smooth_loss,
)
from .spectral import Embedding, SpectralSystem, eig_sym, embedding_from_system, laplacian
from .trace import DivergenceError, RunTrace

logger = logging.getLogger(__name__)

# Below this distance a node-centre pair contributes nothing to the gradient;
# the contribution has limit 0 along smooth paths and zeroing is stable.
DISTANCE_GUARD = 1e-12

PARAM_FLOOR = 1e-6
DIVERGENCE_LIMIT = 1e3

# Stopping rule: relative smooth-loss change below this over PLATEAU_WINDOW
# iterations counts as converged.
PLATEAU_RTOL = 1e-10
PLATEAU_WINDOW = 50


@dataclass(frozen=True)
class GdseGradient:
    dB: np.ndarray
    dr: float
    dtau: float


@dataclass(frozen=True)
class GdseResult:
    embedding: Embedding
    r: float
    tau: float
    trace: RunTrace


def decompose_weights(B: np.ndarray) -> SpectralSystem:
    """Eigendecomposition of the Laplacian of the bipartite graph of B."""
    return eig_sym(laplacian(bipartite_adjacency(B)))


def _perturb_until_distinct(
    B: np.ndarray, rng: np.random.Generator, max_tries: int = 5
) -> tuple[np.ndarray, SpectralSystem]:
    """Re-decompose after tiny random perturbations until eigenvalues are distinct."""
    for _ in range(max_tries):
        system = decompose_weights(B)
        lam = system.eigenvalues
        scale = max(1.0, float(np.max(np.abs(lam))))
        if np.min(np.diff(lam)) > 1e-12 * scale:
            return B, system
        magnitude = 1e-8 * max(np.linalg.norm(B, "fro"), 1.0)
        logger.debug("degenerate spectrum; perturbing B by %.3e", magnitude)
        B = B + magnitude * rng.standard_normal(B.shape)
    return B, decompose_weights(B)


def gdse_gradient(
    B: np.ndarray,
    p: LossParams,
    B0: np.ndarray,
    D: int,
    system: SpectralSystem | None = None,
) -> GdseGradient:
    """Gradient of the smooth loss at the spectral embedding of B.

    The embedding columns are the eigenvectors of the D smallest nonzero
    Laplacian eigenvalues; dB couples them to every remaining nonzero
    eigenpair through the inverse eigenvalue gaps. Pairs within the embedding
    cancel by antisymmetry, and the zero eigenpair drops out because its
    eigenvector is constant.
    """
    B = np.asarray(B, dtype=float)
    B0 = np.asarray(B0, dtype=float)
    n, s = B.shape
    if system is None:
        system = decompose_weights(B)
    norm_sq = incidence_norm_sq(B0)

    nonzero = system.nonzero_indices()
    if D > nonzero.size:
        raise ValueError(f"embedding dimension {D} exceeds {nonzero.size} nonzero eigenpairs")
    emb_idx = nonzero[:D]
    rest_idx = nonzero[D:]

    Y = embedding_from_system(system, n, s, D)
    d = distances(Y)
    resid = smooth_indicator(d, p) - B0
    fprime = indicator_grad_x(d, p)
    S = np.zeros_like(d)
    safe = d >= DISTANCE_GUARD
    S[safe] = 2.0 * resid[safe] * fprime[safe] / d[safe]

    V = system.eigenvectors
    lam = system.eigenvalues
    Vn_emb, Vc_emb = V[:n, emb_idx], V[n:, emb_idx]
    Vn_rest, Vc_rest = V[:n, rest_idx], V[n:, rest_idx]

    dB = np.zeros_like(B)
    for k in range(D):
        Vk = Vn_emb[:, k][:, None] - Vc_emb[None, :, k]
        W = S * Vk
        # matsum(W * V^(h)) decomposes into row/column sums against v^(h).
        coeff = (Vn_rest.T @ W.sum(axis=1) - Vc_rest.T @ W.sum(axis=0)) / (
            lam[emb_idx[k]] - lam[rest_idx]
        )
        dB += Vk * ((Vn_rest @ coeff)[:, None] - (Vc_rest @ coeff)[None, :])
    dB /= norm_sq

    dr, dtau = radius_sharpness_grad(d, p, B0, norm_sq)
    if not (np.all(np.isfinite(dB)) and np.isfinite(dr) and np.isfinite(dtau)):
        raise FloatingPointError("non-finite entries in the GDSE gradient")
    return GdseGradient(dB=dB, dr=dr, dtau=dtau)


def clamp_positive(value: float, name: str) -> float:
    if value <= 0:
        logger.warning("%s driven to %.3e; clamping to %.0e", name, value, PARAM_FLOOR)
        return PARAM_FLOOR
    return value


def loss_plateaued(losses: list[float]) -> bool:
    if len(losses) <= PLATEAU_WINDOW:
        return False
    old, new = losses[-1 - PLATEAU_WINDOW], losses[-1]
    return abs(new - old) < PLATEAU_RTOL * max(abs(old), 1e-300)


def gdse_run(
    B0: np.ndarray,
    D: int,
    r0: float = 0.1,
    tau0: float = 5.0,
    rates: tuple[float, float, float] = (1.0, 1e-3, 1.0),
    max_iter: int = 1000,
    seed: int = 0,
) -> GdseResult:
    """Run the weight-modification descent loop and return embedding, radius and trace.

    Stops at the iteration cap, at exact hard reconstruction, or when the
    smooth loss plateaus. The seed is used only for the random perturbations
    that break degenerate spectra.
    """
    B0 = np.asarray(B0, dtype=float)
    n, s = B0.shape
    if not is_connected(bipartite_adjacency(B0)):
        raise ValueError("bipartite incidence graph is disconnected; GDSE requires connectivity")
    rng = np.random.default_rng(seed)
    gamma_B, gamma_r, gamma_tau = rates

    B = B0.copy()
    r, tau = r0, tau0
    trace = RunTrace()
    B, system = _perturb_until_distinct(B, rng)
    Y = embedding_from_system(system, n, s, D)

    for _ in range(max_iter):
        grad = gdse_gradient(B, LossParams(r=r, tau=tau), B0, D, system=system)
        B = B - gamma_B * grad.dB
        r = clamp_positive(r - gamma_r * grad.dr, "r")
        tau = clamp_positive(tau - gamma_tau * grad.dtau, "tau")

        if not is_connected(bipartite_adjacency(B)):
            raise DivergenceError(
                "bipartite graph of the updated weights became disconnected", trace
            )
        B, system = _perturb_until_distinct(B, rng)
        Y = embedding_from_system(system, n, s, D)

        ls = smooth_loss(Y, LossParams(r=r, tau=tau), B0)
        lh = hard_loss(Y, r, B0)
        trace.append(ls, lh, r, tau)
        if ls > DIVERGENCE_LIMIT:
            raise DivergenceError(f"smooth loss diverged to {ls:.3e}", trace)
        if lh == 0.0 or loss_plateaued([rec.loss_smooth for rec in trace]):
            break

    return GdseResult(embedding=Y, r=r, tau=tau, trace=trace)
