"""Node-centre distances, the sigmoid membership indicator and both losses.

The hard loss counts mismatched incidence entries relative to the number of
memberships; the smooth loss replaces the step indicator with the sigmoid
f(x, r) = 1 / (1 + exp(tau^2 (x^2 - r^2))), which tends to the step as tau
grows. Exponents are clipped at +-700 so f saturates to exactly 0 or 1
(with exactly zero derivatives) instead of overflowing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import Embedding

_EXP_CLIP = 700.0


@dataclass(frozen=True)
class LossParams:
    r: float
    tau: float

    def __post_init__(self):
        if self.r <= 0 or self.tau <= 0:
            raise ValueError(f"r and tau must be positive, got r={self.r}, tau={self.tau}")


def distances(Y: Embedding) -> np.ndarray:
    """n x s matrix of Euclidean distances between node and centre rows."""
    return np.linalg.norm(Y.nodes[:, None, :] - Y.centres[None, :, :], axis=2)


def _sigmoid_pair(x, p: LossParams):
    """(f, f * (1 - f)) evaluated stably.

    Beyond the clip threshold f is exactly 0 or 1 and f (1 - f) is exactly 0,
    so fully saturated pairs contribute nothing to any gradient.
    """
    z = p.tau**2 * (np.square(x) - p.r**2)
    saturated = np.abs(z) >= _EXP_CLIP
    f = 1.0 / (1.0 + np.exp(np.clip(z, -_EXP_CLIP, _EXP_CLIP)))
    f = np.where(saturated, (np.asarray(z) < 0).astype(float), f)
    return f, np.where(saturated, 0.0, f * (1.0 - f))


def smooth_indicator(x, p: LossParams):
    """Sigmoid relaxation of the membership step; equals 1/2 at x = r."""
    return _sigmoid_pair(x, p)[0]


def indicator_grad_x(x, p: LossParams):
    """d/dx of the smooth indicator: -2 tau^2 x f (1 - f)."""
    f, fw = _sigmoid_pair(x, p)
    return -2.0 * p.tau**2 * np.asarray(x) * fw


def indicator_grad_r(x, p: LossParams):
    """d/dr of the smooth indicator: 2 tau^2 r f (1 - f)."""
    return 2.0 * p.tau**2 * p.r * _sigmoid_pair(x, p)[1]


def indicator_grad_tau(x, p: LossParams):
    """d/dtau of the smooth indicator: -2 tau (x^2 - r^2) f (1 - f)."""
    return -2.0 * p.tau * (np.square(np.asarray(x)) - p.r**2) * _sigmoid_pair(x, p)[1]


def smooth_incidence(Y: Embedding, p: LossParams) -> np.ndarray:
    """Elementwise smooth indicator over all node-centre distances."""
    return smooth_indicator(distances(Y), p)


def hard_incidence(Y: Embedding, r: float) -> np.ndarray:
    """Binary incidence reconstructed by the radius rule (boundary inclusive)."""
    return (distances(Y) <= r).astype(float)


def incidence_norm_sq(B0: np.ndarray) -> float:
    """Squared Frobenius norm of the reference incidence; rejects all-zero B0."""
    norm_sq = float(np.sum(np.square(B0)))
    if norm_sq == 0:
        raise ValueError("reference incidence matrix is all zeros; loss is undefined")
    return norm_sq


def hard_loss(Y: Embedding, r: float, B0: np.ndarray) -> float:
    """Relative number of membership mistakes in the hard reconstruction."""
    B0 = np.asarray(B0, dtype=float)
    return float(np.sum(np.square(hard_incidence(Y, r) - B0))) / incidence_norm_sq(B0)


def smooth_loss(Y: Embedding, p: LossParams, B0: np.ndarray) -> float:
    """Sigmoid-relaxed reconstruction loss ||B_smooth - B0||_fro^2 / ||B0||_fro^2."""
    B0 = np.asarray(B0, dtype=float)
    return float(np.sum(np.square(smooth_incidence(Y, p) - B0))) / incidence_norm_sq(B0)


def radius_sharpness_grad(
    d: np.ndarray, p: LossParams, B0: np.ndarray, norm_sq: float
) -> tuple[float, float]:
    """Derivatives of the smooth loss with respect to r and tau.

    Shared by both optimizers; ``d`` is the current distance matrix.
    """
    resid = 2.0 * (smooth_indicator(d, p) - B0)
    dr = float(np.sum(resid * indicator_grad_r(d, p))) / norm_sq
    dtau = float(np.sum(resid * indicator_grad_tau(d, p))) / norm_sq
    return dr, dtau
