"""Mini-batch iteration and class-balanced resampling."""

from __future__ import annotations

from typing import Iterator

import numpy as np


def minibatches(indices: np.ndarray, batch_size: int, rng: np.random.Generator) -> Iterator[np.ndarray]:
    """Shuffle ``indices`` once and yield consecutive batches (last one may be short)."""
    order = rng.permutation(indices)
    for start in range(0, order.size, batch_size):
        yield order[start : start + batch_size]


def balanced_indices(labels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Positions for one balanced epoch: every sample once, minority class
    oversampled with replacement up to the majority count."""
    labels = np.asarray(labels)
    pos = np.nonzero(labels > 0.5)[0]
    neg = np.nonzero(labels <= 0.5)[0]
    if pos.size == 0 or neg.size == 0:
        return np.arange(labels.size)
    minority, majority = (pos, neg) if pos.size < neg.size else (neg, pos)
    extra = rng.choice(minority, size=majority.size - minority.size, replace=True)
    return np.concatenate([majority, minority, extra])


def class_weights(labels: np.ndarray) -> np.ndarray:
    """Per-sample weights giving both classes equal total weight."""
    labels = np.asarray(labels)
    pos = labels > 0.5
    n_pos = max(int(pos.sum()), 1)
    n_neg = max(labels.size - int(pos.sum()), 1)
    return np.where(pos, labels.size / (2.0 * n_pos), labels.size / (2.0 * n_neg))
