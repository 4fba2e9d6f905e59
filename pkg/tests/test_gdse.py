import numpy as np
import pytest

from hyperembed.gdse import (
    GdseResult,
    clamp_positive,
    decompose_weights,
    gdse_gradient,
    gdse_run,
    loss_plateaued,
)
from hyperembed.loss import (
    LossParams,
    distances,
    hard_loss,
    incidence_norm_sq,
    indicator_grad_x,
    smooth_indicator,
    smooth_loss,
)
from hyperembed.spectral import embedding_from_system


def _loss_of_weights(B, p, B0, D):
    """Smooth loss as a function of the weight matrix, through the embedding."""
    n, s = B0.shape
    Y = embedding_from_system(decompose_weights(B), n, s, D)
    return smooth_loss(Y, p, B0)


def _random_instance(rng, n, s, D):
    """Connected binary incidence plus a generic weight point near it."""
    while True:
        B0 = (rng.random((n, s)) < 0.5).astype(float)
        from hyperembed.core import bipartite_adjacency, is_connected

        if B0.sum() and is_connected(bipartite_adjacency(B0)):
            break
    B = B0 + 0.05 * rng.standard_normal(B0.shape)
    system = decompose_weights(B)
    lam = system.eigenvalues
    if np.min(np.diff(lam)) < 1e-6:  # keep the test point generic
        return _random_instance(rng, n, s, D)
    return B0, B


def _brute_force_dB(B, p, B0, D, skip_embedding_pairs):
    """Direct double-sum eigenperturbation gradient, one (k, h) pair at a time."""
    n, s = B.shape
    system = decompose_weights(B)
    nonzero = system.nonzero_indices()
    emb_idx, lam, V = nonzero[:D], system.eigenvalues, system.eigenvectors
    Y = embedding_from_system(system, n, s, D)
    d = distances(Y)
    resid = smooth_indicator(d, p) - B0
    with np.errstate(divide="ignore", invalid="ignore"):
        S = np.where(d >= 1e-12, 2.0 * resid * indicator_grad_x(d, p) / d, 0.0)

    emb_set = set(emb_idx.tolist())
    dB = np.zeros_like(B)
    for k in emb_idx:
        Vk = V[:n, k][:, None] - V[n:, k][None, :]
        for h in nonzero:
            if h == k or (skip_embedding_pairs and h in emb_set):
                continue
            Vh = V[:n, h][:, None] - V[n:, h][None, :]
            dB += (np.sum(S * Vk * Vh) / (lam[k] - lam[h])) * (Vk * Vh)
    return dB / incidence_norm_sq(B0)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(17)
    p = LossParams(r=0.4, tau=2.0)
    for _ in range(3):
        n, s, D = 7, 4, 2
        B0, B = _random_instance(rng, n, s, D)
        grad = gdse_gradient(B, p, B0, D)
        eps = 1e-6
        fd = np.zeros_like(B)
        for i in range(n):
            for j in range(s):
                Bp, Bm = B.copy(), B.copy()
                Bp[i, j] += eps
                Bm[i, j] -= eps
                fd[i, j] = (
                    _loss_of_weights(Bp, p, B0, D) - _loss_of_weights(Bm, p, B0, D)
                ) / (2 * eps)
        scale = max(np.linalg.norm(fd), 1e-12)
        assert np.linalg.norm(grad.dB - fd) / scale < 1e-4


def test_gradient_matches_brute_force_sum():
    """Vectorized gradient equals the literal double sum over eigenpairs."""
    rng = np.random.default_rng(23)
    p = LossParams(r=0.4, tau=2.0)
    B0, B = _random_instance(rng, 8, 5, 3)
    grad = gdse_gradient(B, p, B0, 3)
    brute = _brute_force_dB(B, p, B0, 3, skip_embedding_pairs=True)
    assert np.allclose(grad.dB, brute, atol=1e-12)


def test_within_embedding_pairs_cancel():
    """Including the within-embedding (k, h) pairs changes nothing: they
    cancel pairwise by antisymmetry of the eigenvalue-gap denominator."""
    rng = np.random.default_rng(29)
    p = LossParams(r=0.4, tau=2.0)
    B0, B = _random_instance(rng, 8, 5, 3)
    with_pairs = _brute_force_dB(B, p, B0, 3, skip_embedding_pairs=False)
    without = _brute_force_dB(B, p, B0, 3, skip_embedding_pairs=True)
    assert np.allclose(with_pairs, without, atol=1e-10)


def test_gradient_zero_at_saturated_exact_fit(fig1_incidence):
    """At an exact hard reconstruction with fully saturated sigmoids, every
    gradient component vanishes identically."""
    B0 = fig1_incidence
    system = decompose_weights(B0)
    Y = embedding_from_system(system, 6, 3, 2)
    d = distances(Y)
    r = 0.5
    margin = np.min(np.abs(d**2 - r**2))
    tau = float(np.sqrt(800.0 / margin))  # clip threshold is 700
    grad = gdse_gradient(B0, LossParams(r=r, tau=tau), B0, 2, system=system)
    assert np.all(grad.dB == 0.0)
    assert grad.dr == 0.0
    assert grad.dtau == 0.0


def test_run_requires_connectivity():
    B0 = np.array([[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        gdse_run(B0, 1, max_iter=1)


def test_run_trace_consistent(fig1_incidence):
    res = gdse_run(fig1_incidence, 2, max_iter=20)
    assert isinstance(res, GdseResult)
    assert len(res.trace) >= 1
    last = res.trace[-1]
    assert last.r == res.r and last.tau == res.tau
    assert last.loss_hard == hard_loss(res.embedding, res.r, fig1_incidence)
    assert last.loss_smooth == pytest.approx(
        smooth_loss(res.embedding, LossParams(r=res.r, tau=res.tau), fig1_incidence),
        rel=1e-12,
    )


def test_run_stops_at_exact_reconstruction(fig1_incidence):
    """Starting at r0 = 0.5 the very first iterate already reconstructs."""
    res = gdse_run(fig1_incidence, 2, r0=0.5, max_iter=100)
    assert res.trace[-1].loss_hard == 0.0
    assert len(res.trace) < 100


def test_clamp_positive():
    assert clamp_positive(0.3, "r") == 0.3
    assert clamp_positive(-1.0, "r") == 1e-6
    assert clamp_positive(0.0, "tau") == 1e-6


def test_loss_plateaued():
    assert not loss_plateaued([1.0] * 30)
    assert loss_plateaued([1.0] * 60)
    decreasing = list(np.linspace(1.0, 0.5, 60))
    assert not loss_plateaued(decreasing)
