"""Ranking and regression metrics."""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from .errors import ShapeMismatch, SingleClass


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ShapeMismatch(f"length {a.size} vs {b.size}")
    if a.size < 2:
        raise ValueError("metrics need at least 2 samples")
    return a, b


def auroc(scores, labels) -> float:
    """Mann-Whitney U / (n_pos * n_neg) with tie midranks."""
    s, y = _pair(scores, labels)
    pos = y > 0.5
    n_pos = int(pos.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("AUROC needs both classes")
    ranks = rankdata(s, method="average")
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def average_precision(scores, labels) -> float:
    """Sum over distinct score thresholds of (recall step) x precision."""
    s, y = _pair(scores, labels)
    pos = y > 0.5
    n_pos = int(pos.sum())
    if n_pos == 0:
        raise SingleClass("average precision needs at least one positive")
    order = np.argsort(-s, kind="mergesort")
    s, pos = s[order], pos[order]
    tp = np.cumsum(pos)
    # last index of each run of tied scores
    ends = np.r_[np.nonzero(np.diff(s))[0], s.size - 1]
    tp_at = tp[ends].astype(np.float64)
    precision = tp_at / (ends + 1)
    recall = tp_at / n_pos
    steps = np.diff(np.r_[0.0, recall])
    return float(np.sum(steps * precision))


def r2_score(pred, target) -> float:
    """1 - SS_res / SS_tot. A constant target scores 1.0 if hit exactly, else 0.0."""
    p, t = _pair(pred, target)
    ss_res = float(np.sum((t - p) ** 2))
    ss_tot = float(np.sum((t - t.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return 1.0 - ss_res / ss_tot


def pearson_r(a, b) -> float:
    """Pearson correlation; 0.0 when either input is constant."""
    x, y = _pair(a, b)
    x = x - x.mean()
    y = y - y.mean()
    den = np.sqrt(np.sum(x * x) * np.sum(y * y))
    if den == 0.0:
        return 0.0
    return float(np.clip(np.sum(x * y) / den, -1.0, 1.0))


def correlation_matrix(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pearson r between every column of ``a`` and every column of ``b``.

    Returns ``(r, const_a, const_b)``; pairs involving a constant column get 0.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[0] != b.shape[0]:
        raise ShapeMismatch("correlation inputs need equal row counts")
    ac = a - a.mean(axis=0)
    bc = b - b.mean(axis=0)
    na = np.sqrt(np.sum(ac * ac, axis=0))
    nb = np.sqrt(np.sum(bc * bc, axis=0))
    const_a = na <= 1e-12 * np.maximum(1.0, np.abs(a).max(axis=0, initial=0.0))
    const_b = nb <= 1e-12 * np.maximum(1.0, np.abs(b).max(axis=0, initial=0.0))
    sa = np.where(const_a, 1.0, na)
    sb = np.where(const_b, 1.0, nb)
    r = (ac / sa).T @ (bc / sb)
    r[const_a, :] = 0.0
    r[:, const_b] = 0.0
    return np.clip(r, -1.0, 1.0), const_a, const_b
