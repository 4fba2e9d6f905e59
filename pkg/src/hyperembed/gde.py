"""Direct gradient descent on the embedding coordinates.

Supports exact gradients with Armijo-Goldstein backtracking step selection,
and stochastic gradients over fixed-size node/hyperedge subsets with fixed
learning rates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import bipartite_adjacency, is_connected
from .gdse import (
    DISTANCE_GUARD,
    DIVERGENCE_LIMIT,
    clamp_positive,
    loss_plateaued,
)
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
from .spectral import Embedding, centroid_init, spectral_embed
from .trace import DivergenceError, RunTrace

logger = logging.getLogger(__name__)

ARMIJO_C = 1e-4
ARMIJO_SHRINK = 0.5
ARMIJO_GAMMA_MAX = 1.0
ARMIJO_GAMMA_MIN = 1e-12

STOCHASTIC_RATE_Y = 0.1
STOCHASTIC_RATE_R = 1e-3
STOCHASTIC_RATE_TAU = 1e-3

# Above this bipartite size the default initializer switches from the full
# spectral embedding to the clique-expansion/centroid construction.
CENTROID_INIT_THRESHOLD = 2000


@dataclass(frozen=True)
class GdeGradient:
    dY: np.ndarray
    dr: float
    dtau: float


@dataclass(frozen=True)
class BatchSpec:
    node_batch: int
    edge_batch: int
    seed: int = 0

    def validate(self, n: int, s: int) -> None:
        if not (1 <= self.node_batch <= n):
            raise ValueError(f"node batch size {self.node_batch} not in [1, {n}]")
        if not (1 <= self.edge_batch <= s):
            raise ValueError(f"edge batch size {self.edge_batch} not in [1, {s}]")


@dataclass(frozen=True)
class GdeResult:
    embedding: Embedding
    r: float
    tau: float
    trace: RunTrace


def _coefficient(d: np.ndarray, p: LossParams, B0: np.ndarray, norm_sq: float) -> np.ndarray:
    """Per-pair factor 2 (B_smooth - B0) f'(d) / d, with the small-distance guard."""
    resid = smooth_indicator(d, p) - B0
    fprime = indicator_grad_x(d, p)
    C = np.zeros_like(d)
    safe = d >= DISTANCE_GUARD
    C[safe] = 2.0 * resid[safe] * fprime[safe] / (d[safe] * norm_sq)
    return C


def gde_gradient(Y: Embedding, p: LossParams, B0: np.ndarray) -> GdeGradient:
    """Exact gradient of the smooth loss in the embedding coordinates, r and tau."""
    B0 = np.asarray(B0, dtype=float)
    norm_sq = incidence_norm_sq(B0)
    d = distances(Y)
    C = _coefficient(d, p, B0, norm_sq)

    nodes, centres = Y.nodes, Y.centres
    dY = np.empty_like(Y.coords)
    dY[: Y.n] = C.sum(axis=1)[:, None] * nodes - C @ centres
    dY[Y.n :] = C.sum(axis=0)[:, None] * centres - C.T @ nodes
    dr, dtau = radius_sharpness_grad(d, p, B0, norm_sq)
    if not (np.all(np.isfinite(dY)) and np.isfinite(dr) and np.isfinite(dtau)):
        raise FloatingPointError("non-finite entries in the GDE gradient")
    return GdeGradient(dY=dY, dr=dr, dtau=dtau)


def gde_gradient_stochastic(
    Y: Embedding,
    p: LossParams,
    B0: np.ndarray,
    batch: BatchSpec,
    iteration: int = 0,
) -> GdeGradient:
    """Unbiased minibatch estimate of the exact gradient.

    The sums are restricted to random node and hyperedge subsets (sampled
    without replacement, deterministically from the batch seed and the
    iteration counter) and rescaled by the inverse sampling fractions.
    """
    B0 = np.asarray(B0, dtype=float)
    n, s = B0.shape
    batch.validate(n, s)
    rng = np.random.default_rng([batch.seed, iteration])
    rows = np.sort(rng.choice(n, size=batch.node_batch, replace=False))
    cols = np.sort(rng.choice(s, size=batch.edge_batch, replace=False))
    scale = (n / batch.node_batch) * (s / batch.edge_batch)

    norm_sq = incidence_norm_sq(B0)
    sub_nodes = Y.nodes[rows]
    sub_centres = Y.centres[cols]
    d = np.linalg.norm(sub_nodes[:, None, :] - sub_centres[None, :, :], axis=2)
    B0_sub = B0[np.ix_(rows, cols)]
    C = _coefficient(d, p, B0_sub, norm_sq)

    dY = np.zeros_like(Y.coords)
    dY[rows] = C.sum(axis=1)[:, None] * sub_nodes - C @ sub_centres
    dY[Y.n + cols] = C.sum(axis=0)[:, None] * sub_centres - C.T @ sub_nodes
    dY *= scale
    dr, dtau = radius_sharpness_grad(d, p, B0_sub, norm_sq)
    return GdeGradient(dY=dY, dr=scale * dr, dtau=scale * dtau)


def _backtrack(f0: float, grad_sq: float, value_at: Callable[[float], float | None]) -> float:
    """Backtracking line search for one variable group.

    ``value_at`` returns the objective after a step of the given size, or None
    if the step is infeasible. Returns 0 when no acceptable step remains.
    """
    if grad_sq == 0.0:
        return 0.0
    gamma = ARMIJO_GAMMA_MAX
    while gamma >= ARMIJO_GAMMA_MIN:
        value = value_at(gamma)
        if value is not None and value <= f0 - ARMIJO_C * gamma * grad_sq:
            return gamma
        gamma *= ARMIJO_SHRINK
    logger.debug("no acceptable Armijo step above %.0e; taking step 0", ARMIJO_GAMMA_MIN)
    return 0.0


def armijo_step(
    Y: Embedding,
    p: LossParams,
    grad: GdeGradient,
    objective: Callable[[Embedding, float, float], float],
) -> tuple[float, float, float]:
    """Select step sizes for the three variable groups by backtracking.

    Groups are searched in sequence (Y, then r, then tau), each from the state
    left by the previous accepted step, so applying all three never increases
    the objective.
    """
    r, tau = p.r, p.tau
    f0 = objective(Y, r, tau)

    gamma_Y = _backtrack(
        f0,
        float(np.sum(np.square(grad.dY))),
        lambda g: objective(Y.replace_coords(Y.coords - g * grad.dY), r, tau),
    )
    Y1 = Y.replace_coords(Y.coords - gamma_Y * grad.dY) if gamma_Y else Y
    f1 = objective(Y1, r, tau) if gamma_Y else f0

    def r_value(g):
        trial = r - g * grad.dr
        return objective(Y1, trial, tau) if trial > 0 else None

    gamma_r = _backtrack(f1, grad.dr**2, r_value)
    r1 = r - gamma_r * grad.dr if gamma_r else r
    f2 = objective(Y1, r1, tau) if gamma_r else f1

    def tau_value(g):
        trial = tau - g * grad.dtau
        return objective(Y1, r1, trial) if trial > 0 else None

    gamma_tau = _backtrack(f2, grad.dtau**2, tau_value)
    return gamma_Y, gamma_r, gamma_tau


def initial_embedding(B0: np.ndarray, D: int, init: str) -> Embedding:
    """Starting point for GDE: bipartite spectral, clique-centroid, or size-based."""
    n, s = B0.shape
    if init == "auto":
        init = "spectral" if n + s <= CENTROID_INIT_THRESHOLD else "centroid"
    if init == "spectral":
        return spectral_embed(B0, D)
    if init == "centroid":
        return centroid_init(B0, D)
    raise ValueError(f"unknown initializer {init!r}")


def gde_run(
    B0: np.ndarray,
    D: int,
    r0: float = 0.1,
    tau0: float = 5.0,
    init: str = "auto",
    mode: str = "exact",
    batch: BatchSpec | None = None,
    max_iter: int = 200,
    seed: int = 0,
    callback: Callable[[int, Embedding, float, float], None] | None = None,
) -> GdeResult:
    """Run direct gradient descent on the embedding and return the result.

    In exact mode, step sizes come from Armijo-Goldstein backtracking, so the
    smooth loss is non-increasing. In stochastic mode, fixed learning rates
    are used and the objective is never evaluated on the full data inside the
    loop. ``callback(iteration, Y, r, tau)`` runs after every iteration.
    """
    B0 = np.asarray(B0, dtype=float)
    if mode not in ("exact", "stochastic"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "stochastic" and batch is None:
        raise ValueError("stochastic mode requires a BatchSpec")
    if init == "spectral" and not is_connected(bipartite_adjacency(B0)):
        raise ValueError(
            "bipartite incidence graph is disconnected; spectral initialization "
            "is ill-defined (try the centroid initializer)"
        )

    Y = initial_embedding(B0, D, init)
    r, tau = r0, tau0
    trace = RunTrace()

    def objective(Yt, rt, taut):
        return smooth_loss(Yt, LossParams(r=rt, tau=taut), B0)

    for it in range(max_iter):
        p = LossParams(r=r, tau=tau)
        if mode == "exact":
            grad = gde_gradient(Y, p, B0)
            gamma_Y, gamma_r, gamma_tau = armijo_step(Y, p, grad, objective)
        else:
            grad = gde_gradient_stochastic(Y, p, B0, batch, iteration=it)
            gamma_Y, gamma_r, gamma_tau = (
                STOCHASTIC_RATE_Y,
                STOCHASTIC_RATE_R,
                STOCHASTIC_RATE_TAU,
            )
        Y = Y.replace_coords(Y.coords - gamma_Y * grad.dY)
        r = clamp_positive(r - gamma_r * grad.dr, "r")
        tau = clamp_positive(tau - gamma_tau * grad.dtau, "tau")

        ls = objective(Y, r, tau)
        lh = hard_loss(Y, r, B0)
        trace.append(ls, lh, r, tau)
        if callback is not None:
            callback(it, Y, r, tau)
        if ls > DIVERGENCE_LIMIT:
            raise DivergenceError(f"smooth loss diverged to {ls:.3e}", trace)
        if lh == 0.0 or loss_plateaued([rec.loss_smooth for rec in trace]):
            break

    return GdeResult(embedding=Y, r=r, tau=tau, trace=trace)
