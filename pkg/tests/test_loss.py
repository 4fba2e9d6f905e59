import numpy as np
import pytest

from hyperembed.loss import (
    LossParams,
    distances,
    hard_incidence,
    hard_loss,
    incidence_norm_sq,
    indicator_grad_r,
    indicator_grad_tau,
    indicator_grad_x,
    radius_sharpness_grad,
    smooth_incidence,
    smooth_indicator,
    smooth_loss,
)
from hyperembed.spectral import Embedding


def _embedding(nodes, centres):
    return Embedding(coords=np.vstack([nodes, centres]), n=len(nodes), s=len(centres))


def _random_embedding(rng, n=5, s=4, D=2):
    return Embedding(coords=rng.standard_normal((n + s, D)), n=n, s=s)


def test_indicator_known_value():
    # 1 / (1 + exp(5^2 (0.4^2 - 0.5^2))) = 1 / (1 + e^{-2.25})
    p = LossParams(r=0.5, tau=5.0)
    assert smooth_indicator(0.4, p) == pytest.approx(1.0 / (1.0 + np.exp(-2.25)), rel=1e-12)


def test_indicator_half_at_radius():
    for r, tau in [(0.1, 5.0), (0.7, 2.0), (2.0, 30.0)]:
        assert smooth_indicator(r, LossParams(r=r, tau=tau)) == pytest.approx(0.5, rel=1e-12)


def test_indicator_monotone_decreasing():
    p = LossParams(r=0.5, tau=5.0)
    x = np.linspace(0.0, 2.0, 200)
    f = smooth_indicator(x, p)
    assert np.all(np.diff(f) <= 0)
    assert np.all((0 <= f) & (f <= 1))


def test_indicator_saturates_exactly():
    """Far from the boundary at large tau the sigmoid is exactly 0 or 1 with
    exactly zero derivatives (clipped exponent), not an overflow."""
    p = LossParams(r=0.5, tau=1e4)
    assert smooth_indicator(0.4, p) == 1.0
    assert smooth_indicator(0.6, p) == 0.0
    for x in (0.4, 0.6):
        assert indicator_grad_x(x, p) == 0.0
        assert indicator_grad_r(x, p) == 0.0
        assert indicator_grad_tau(x, p) == 0.0


def test_indicator_grads_match_finite_differences():
    rng = np.random.default_rng(0)
    eps = 1e-6
    for _ in range(20):
        x = float(rng.uniform(0.05, 1.5))
        r = float(rng.uniform(0.1, 1.0))
        tau = float(rng.uniform(0.5, 6.0))
        p = LossParams(r=r, tau=tau)
        fd_x = (
            smooth_indicator(x + eps, p) - smooth_indicator(x - eps, p)
        ) / (2 * eps)
        fd_r = (
            smooth_indicator(x, LossParams(r=r + eps, tau=tau))
            - smooth_indicator(x, LossParams(r=r - eps, tau=tau))
        ) / (2 * eps)
        fd_tau = (
            smooth_indicator(x, LossParams(r=r, tau=tau + eps))
            - smooth_indicator(x, LossParams(r=r, tau=tau - eps))
        ) / (2 * eps)
        assert indicator_grad_x(x, p) == pytest.approx(fd_x, rel=1e-6, abs=1e-10)
        assert indicator_grad_r(x, p) == pytest.approx(fd_r, rel=1e-6, abs=1e-10)
        assert indicator_grad_tau(x, p) == pytest.approx(fd_tau, rel=1e-6, abs=1e-10)


def test_sharp_limit_approaches_step():
    """As tau grows the smooth indicator converges to the hard radius rule."""
    rng = np.random.default_rng(1)
    Y = _random_embedding(rng)
    r = 1.0
    hard = hard_incidence(Y, r)
    margin = np.min(np.abs(distances(Y) - r))
    assert margin > 0.01  # generic configuration
    prev = None
    for tau in (10.0, 100.0, 1000.0):
        gap = np.max(np.abs(smooth_incidence(Y, LossParams(r=r, tau=tau)) - hard))
        if prev is not None:
            assert gap <= prev
        prev = gap
    assert prev < 1e-8


def test_distances_worked_example(fig2_points):
    Y = _embedding(*fig2_points)
    d = distances(Y)
    assert d.shape == (6, 3)
    assert d[0, 0] == pytest.approx(0.11434, abs=1e-4)


def test_losses_at_exact_configuration(fig1_incidence, fig2_points):
    Y = _embedding(*fig2_points)
    assert hard_loss(Y, 0.42, fig1_incidence) == 0.0
    # At high sharpness the smooth loss also collapses.
    assert smooth_loss(Y, LossParams(r=0.42, tau=200.0), fig1_incidence) < 1e-12


def test_hard_loss_counts_mismatches(fig1_incidence, fig2_points):
    Y = _embedding(*fig2_points)
    # Shrinking r below d(u1, h1) destroys memberships; each miss costs 1/10.
    full = hard_loss(Y, 0.05, fig1_incidence)
    assert full == pytest.approx(1.0)  # every membership missed, 10/10
    one_out = hard_loss(Y, 0.113, fig1_incidence)
    assert (one_out * 10) == pytest.approx(round(one_out * 10))


def test_loss_invariant_under_column_sign_flip():
    rng = np.random.default_rng(2)
    Y = _random_embedding(rng)
    B0 = (rng.random((5, 4)) < 0.5).astype(float)
    B0[0, 0] = 1.0
    p = LossParams(r=0.8, tau=3.0)
    flipped = Y.replace_coords(Y.coords * np.array([1.0, -1.0]))
    assert smooth_loss(flipped, p, B0) == pytest.approx(smooth_loss(Y, p, B0), rel=1e-14)
    assert hard_loss(flipped, 0.8, B0) == hard_loss(Y, 0.8, B0)


def test_loss_params_validation():
    with pytest.raises(ValueError):
        LossParams(r=0.0, tau=1.0)
    with pytest.raises(ValueError):
        LossParams(r=1.0, tau=-1.0)


def test_incidence_norm_sq_rejects_zero():
    with pytest.raises(ValueError):
        incidence_norm_sq(np.zeros((2, 2)))


def test_radius_grad_sign():
    """With every true membership unreached (d > r), growing r must help."""
    nodes = np.array([[0.0, 0.0]])
    centres = np.array([[1.0, 0.0]])
    Y = _embedding(nodes, centres)
    B0 = np.array([[1.0]])
    p = LossParams(r=0.5, tau=2.0)
    dr, _ = radius_sharpness_grad(distances(Y), p, B0, incidence_norm_sq(B0))
    assert dr < 0  # descent direction increases r


def test_radius_sharpness_grad_matches_finite_differences():
    rng = np.random.default_rng(3)
    Y = _random_embedding(rng)
    B0 = (rng.random((5, 4)) < 0.5).astype(float)
    B0[0, 0] = 1.0
    r, tau = 0.9, 2.5
    norm_sq = incidence_norm_sq(B0)
    d = distances(Y)
    dr, dtau = radius_sharpness_grad(d, LossParams(r=r, tau=tau), B0, norm_sq)
    eps = 1e-6

    def L(rr, tt):
        return smooth_loss(Y, LossParams(r=rr, tau=tt), B0)

    fd_r = (L(r + eps, tau) - L(r - eps, tau)) / (2 * eps)
    fd_tau = (L(r, tau + eps) - L(r, tau - eps)) / (2 * eps)
    assert dr == pytest.approx(fd_r, rel=1e-6, abs=1e-10)
    assert dtau == pytest.approx(fd_tau, rel=1e-6, abs=1e-10)
