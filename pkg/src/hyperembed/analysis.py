"""Downstream tasks: spurious/missing relation detection and node clustering."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .core import Hypergraph, hypergraph_from_incidence
from .gde import GdeResult, gde_run
from .loss import LossParams, smooth_incidence
from .spectral import Embedding


@dataclass(frozen=True)
class PerturbedHypergraph:
    """A hypergraph with injected errors and the (i, j) pairs that were changed."""

    hypergraph: Hypergraph
    labels: frozenset[tuple[int, int]]


@dataclass(frozen=True)
class ScoredRelations:
    """Node-hyperedge pairs with their smooth-incidence scores.

    ``direction`` records which tail is suspicious: "spurious" flags low
    scores among present pairs, "missing" flags high scores among absent ones.
    """

    pairs: tuple[tuple[tuple[int, int], float, bool], ...]
    direction: str


@dataclass(frozen=True)
class Partition:
    """Cluster labels for a fixed node set, ids in [0, k)."""

    labels: np.ndarray

    @property
    def k(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0


def _sample_pairs(candidates: np.ndarray, count: int, seed, kind: str) -> np.ndarray:
    if count > len(candidates):
        raise ValueError(f"cannot sample {count} {kind} pairs from {len(candidates)} candidates")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(candidates), size=count, replace=False)
    return candidates[idx]


def inject_spurious(H: Hypergraph, count: int, seed=0) -> PerturbedHypergraph:
    """Add ``count`` uniformly sampled absent memberships and record them."""
    B = H.incidence()
    absent = np.argwhere(B == 0)
    chosen = _sample_pairs(absent, count, seed, "absent")
    B[chosen[:, 0], chosen[:, 1]] = 1.0
    return PerturbedHypergraph(
        hypergraph=hypergraph_from_incidence(B),
        labels=frozenset((int(i), int(j)) for i, j in chosen),
    )


def inject_missing(H: Hypergraph, count: int, seed=0) -> PerturbedHypergraph:
    """Remove ``count`` uniformly sampled present memberships and record them."""
    B = H.incidence()
    present = np.argwhere(B == 1)
    chosen = _sample_pairs(present, count, seed, "present")
    B[chosen[:, 0], chosen[:, 1]] = 0.0
    return PerturbedHypergraph(
        hypergraph=hypergraph_from_incidence(B),
        labels=frozenset((int(i), int(j)) for i, j in chosen),
    )


def score_relations(
    perturbed: PerturbedHypergraph,
    Y: Embedding,
    p: LossParams,
    direction: str,
) -> ScoredRelations:
    """Smooth-incidence scores for the pairs the given direction inspects.

    The spurious direction scores the pairs present in the perturbed
    hypergraph (injected additions should score low); the missing direction
    scores the absent pairs (removed memberships should score high).
    """
    if direction not in ("spurious", "missing"):
        raise ValueError(f"unknown direction {direction!r}")
    B = perturbed.hypergraph.incidence()
    scores = smooth_incidence(Y, p)
    wanted = B == 1 if direction == "spurious" else B == 0
    pairs = tuple(
        ((int(i), int(j)), float(scores[i, j]), (int(i), int(j)) in perturbed.labels)
        for i, j in np.argwhere(wanted)
    )
    return ScoredRelations(pairs=pairs, direction=direction)


def roc_auc(scored: ScoredRelations) -> tuple[list[tuple[float, float]], float]:
    """ROC curve over the flagging threshold, and its area.

    The AUC is the Mann-Whitney statistic (ties counted 1/2): the probability
    that an injected pair looks more suspicious than a legitimate one.
    """
    flags = np.array([flag for _, _, flag in scored.pairs], dtype=bool)
    scores = np.array([score for _, score, _ in scored.pairs])
    n_pos = int(flags.sum())
    n_neg = flags.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs at least one positive and one negative pair")

    # Orient so that larger statistic = more suspicious.
    stat = -scores if scored.direction == "spurious" else scores
    ranks = rankdata(stat)
    auc = (float(ranks[flags].sum()) - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg)

    order = np.argsort(-stat, kind="stable")
    curve = [(0.0, 0.0)]
    tp = fp = 0
    sorted_stat = stat[order]
    sorted_flags = flags[order]
    for i in range(len(order)):
        if sorted_flags[i]:
            tp += 1
        else:
            fp += 1
        # Emit a point only after the last element of a tie group.
        if i + 1 == len(order) or sorted_stat[i + 1] != sorted_stat[i]:
            curve.append((fp / n_neg, tp / n_pos))
    return curve, auc


def _kmeans_once(points: np.ndarray, k: int, rng: np.random.Generator, max_iter: int = 300):
    n = points.shape[0]
    # k-means++ seeding.
    centres = np.empty((k, points.shape[1]))
    centres[0] = points[rng.integers(n)]
    dist_sq = np.sum(np.square(points - centres[0]), axis=1)
    for c in range(1, k):
        total = dist_sq.sum()
        if total == 0:
            centres[c] = points[rng.integers(n)]
        else:
            centres[c] = points[rng.choice(n, p=dist_sq / total)]
        dist_sq = np.minimum(dist_sq, np.sum(np.square(points - centres[c]), axis=1))

    labels = np.full(n, -1)
    for _ in range(max_iter):
        d2 = np.sum(np.square(points[:, None, :] - centres[None, :, :]), axis=2)
        new_labels = d2.argmin(axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            members = points[labels == c]
            if len(members):
                centres[c] = members.mean(axis=0)
            else:
                # Re-seed an empty cluster from the point farthest from its centroid.
                residual = np.sum(np.square(points - centres[labels]), axis=1)
                farthest = int(residual.argmax())
                centres[c] = points[farthest]
                labels[farthest] = c
    inertia = float(np.sum(np.square(points - centres[labels])))
    return labels, inertia


def kmeans(points: np.ndarray, k: int, restarts: int = 1, seed=0) -> Partition:
    """Lloyd's algorithm with k-means++ seeding, best inertia over restarts."""
    points = np.asarray(points, dtype=float)
    if k > points.shape[0]:
        raise ValueError(f"k={k} exceeds the {points.shape[0]} available points")
    rng = np.random.default_rng(seed)
    best_labels, best_inertia = None, np.inf
    for _ in range(restarts):
        labels, inertia = _kmeans_once(points, k, rng)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return Partition(labels=np.asarray(best_labels))


def adjusted_rand_index(a: Partition, b: Partition) -> float:
    """Chance-corrected partition agreement from the contingency table."""
    la, lb = np.asarray(a.labels), np.asarray(b.labels)
    if la.shape != lb.shape:
        raise ValueError("partitions label different node sets")
    ka, kb = la.max() + 1, lb.max() + 1
    contingency = np.zeros((ka, kb))
    np.add.at(contingency, (la, lb), 1)

    def comb2(x):
        return x * (x - 1) / 2.0

    sum_cells = comb2(contingency).sum()
    sum_rows = comb2(contingency.sum(axis=1)).sum()
    sum_cols = comb2(contingency.sum(axis=0)).sum()
    total = comb2(la.size)
    expected = sum_rows * sum_cols / total if total else 0.0
    max_index = (sum_rows + sum_cols) / 2.0
    if max_index == expected:
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))


@dataclass
class ClusterTrace:
    """Best K-means ARI against ground truth after each GDE iteration."""

    entries: list[tuple[int, float]] = field(default_factory=list)
    result: GdeResult | None = None


def cluster_trace(
    B0: np.ndarray,
    D: int,
    k: int,
    true_labels: np.ndarray,
    kmeans_runs: int = 50,
    seed: int = 0,
    **gde_kwargs,
) -> ClusterTrace:
    """Run GDE and record the best-of-``kmeans_runs`` ARI after every iteration.

    Each K-means run uses a single k-means++ restart with its own seed; the
    best ARI against ``true_labels`` is recorded per iteration.
    """
    truth = Partition(labels=np.asarray(true_labels))
    out = ClusterTrace()

    def best_ari(Y: Embedding) -> float:
        return max(
            adjusted_rand_index(
                kmeans(Y.nodes, k, restarts=1, seed=[seed, run]), truth
            )
            for run in range(kmeans_runs)
        )

    def record(it, Y, r, tau):
        out.entries.append((it, best_ari(Y)))

    out.result = gde_run(B0, D, seed=seed, callback=record, **gde_kwargs)
    return out
