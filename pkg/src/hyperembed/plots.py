"""Matplotlib renderings of the CLI's delimited outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .trace import RunTrace


def plot_trace(trace: RunTrace, path) -> None:
    """Loss, radius and sharpness panels over iterations."""
    its = range(len(trace))
    fig, (ax_loss, ax_r, ax_tau) = plt.subplots(
        3, 1, figsize=(6, 7), sharex=True, height_ratios=[2, 1, 1]
    )
    ax_loss.semilogy(its, [t.loss_smooth for t in trace], label="smooth loss")
    ax_loss.semilogy(
        its, [max(t.loss_hard, 1e-16) for t in trace], label="hard loss"
    )
    ax_loss.legend()
    ax_r.plot(its, [t.r for t in trace], color="tab:green", label="r")
    ax_r.legend()
    ax_tau.plot(its, [t.tau for t in trace], color="tab:red", label="tau")
    ax_tau.legend()
    ax_tau.set_xlabel("iteration")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_roc(curve, auc: float, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot([f for f, _ in curve], [t for _, t in curve], marker=".")
    ax.plot([0, 1], [0, 1], linestyle="--", color="grey", linewidth=0.8)
    ax.set_xlabel("FPR")
    ax.set_ylabel("TPR")
    ax.set_title(f"AUC = {auc:.3f}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_ari(entries, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([it for it, _ in entries], [ari for _, ari in entries])
    ax.set_xlabel("GDE iteration")
    ax.set_ylabel("best ARI")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
