"""Seeded Lloyd k-means on the rows of an eigenvector basis (comparison baseline)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Partition


@dataclass(frozen=True, eq=False)
class KmeansResult:
    labels: Partition
    centers: np.ndarray
    inertia: float
    iters: int
    seed: int | None
    repaired: int = 0
    inertia_history: list = field(default_factory=list)


def _assign(X, centers):
    d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    lab = np.argmin(d2, axis=1)
    return lab, d2[np.arange(X.shape[0]), lab]


def _lloyd(X, k, rng, max_iters):
    n = X.shape[0]
    centers = X[rng.choice(n, size=k, replace=False)].copy()
    labels, dist = _assign(X, centers)
    history = [float(dist.sum())]
    repaired = 0
    it = 0
    for it in range(1, max_iters + 1):
        new_centers = centers.copy()
        counts = np.bincount(labels, minlength=k)
        for c in range(k):
            if counts[c]:
                new_centers[c] = X[labels == c].mean(axis=0)
        empty = np.flatnonzero(counts == 0)
        for c in empty:
            # farthest row from its current center seeds the empty cluster
            far = int(np.argmax(dist))
            new_centers[c] = X[far]
            dist[far] = 0.0
            repaired += 1
        centers = new_centers
        new_labels, dist = _assign(X, centers)
        history.append(float(dist.sum()))
        if np.array_equal(new_labels, labels) and not empty.size:
            break
        labels = new_labels
    for c in range(k):
        if np.any(labels == c):
            centers[c] = X[labels == c].mean(axis=0)
    inertia = float(((X - centers[labels]) ** 2).sum())
    return labels, centers, inertia, it, repaired, history


def kmeans_rows(X, k: int, seed: int | None = 0, max_iters: int = 300, restarts: int = 1) -> KmeansResult:
    """Lloyd's algorithm from uniformly drawn distinct rows; best of ``restarts`` by inertia."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds the number of rows {n}")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, restarts)):
        run = _lloyd(X, k, rng, max_iters)
        if best is None or run[2] < best[2]:
            best = run
    labels, centers, inertia, iters, repaired, history = best
    if np.bincount(labels, minlength=k).min() == 0:
        # only reachable with duplicate rows; relabel compactly
        part = Partition.from_labels(labels)
    else:
        part = Partition(labels, k)
    return KmeansResult(part, centers, inertia, iters, seed, repaired, history)
