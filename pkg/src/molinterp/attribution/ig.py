"""Integrated gradients with a right-endpoint Riemann sum."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np


class NonFiniteGradient(FloatingPointError):
    pass


class Differentiable(Protocol):
    """Scalar model evaluated on a stack of inputs.

    ``value_and_grad(xs)`` takes ``xs`` of shape (M, *input_shape) and
    returns values (M,) and input gradients of the same shape as ``xs``.
    """

    def value_and_grad(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]: ...


@dataclass(frozen=True)
class LinearModel:
    """``F(x) = sum(w * x) + b``; IG is exact for it at any step count."""

    w: np.ndarray
    b: float = 0.0

    def value_and_grad(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        axes = tuple(range(1, xs.ndim))
        vals = np.sum(xs * self.w, axis=axes) + self.b
        return vals, np.broadcast_to(self.w, xs.shape).copy()


@dataclass(frozen=True)
class CallableModel:
    fn: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]

    def value_and_grad(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.fn(xs)


@dataclass(frozen=True)
class AttributionMap:
    attributions: np.ndarray  # same shape as the input (atoms x features)
    baseline_kind: str
    steps: int
    f_input: float
    f_baseline: float
    target: str = "model output"

    @property
    def total(self) -> float:
        return float(self.attributions.sum())

    @property
    def completeness_residual(self) -> float:
        """``|sum(attributions) - (F(x) - F(baseline))|``."""
        return abs(self.total - (self.f_input - self.f_baseline))

    def atom_scores(self) -> np.ndarray:
        return atom_scores(self)


def resolve_baseline(x: np.ndarray, baseline: str | np.ndarray, mean_vector: np.ndarray | None = None):
    """Baseline array and its label. ``"mean"`` repeats ``mean_vector`` on every row."""
    if isinstance(baseline, str):
        if baseline == "zero":
            return np.zeros_like(x), "zero"
        if baseline == "mean":
            if mean_vector is None:
                raise ValueError("mean baseline needs the corpus mean feature vector")
            return np.broadcast_to(np.asarray(mean_vector, dtype=np.float64), x.shape).copy(), "mean"
        raise ValueError(f"unknown baseline {baseline!r}")
    arr = np.asarray(baseline, dtype=np.float64)
    if arr.shape != x.shape:
        raise ValueError("explicit baseline must match the input shape")
    return arr, "custom"


def integrated_gradients(
    model: Differentiable,
    x: np.ndarray,
    baseline: str | np.ndarray = "zero",
    steps: int = 64,
    mean_vector: np.ndarray | None = None,
    chunk: int = 64,
    target: str = "model output",
) -> AttributionMap:
    """``(x - x~) * (1/M) * sum_{m=1..M} grad F(x~ + (m/M)(x - x~))``."""
    if steps < 1:
        raise ValueError("IG needs at least one step")
    x = np.asarray(x, dtype=np.float64)
    base, kind = resolve_baseline(x, baseline, mean_vector)
    delta = x - base
    grad_sum = np.zeros_like(x)
    f_input = None
    for start in range(1, steps + 1, chunk):
        ms = np.arange(start, min(start + chunk, steps + 1), dtype=np.float64)
        alphas = (ms / steps).reshape((-1,) + (1,) * x.ndim)
        vals, grads = model.value_and_grad(base[None] + alphas * delta[None])
        if not np.all(np.isfinite(grads)):
            raise NonFiniteGradient("model gradient is not finite on the integration path")
        grad_sum += grads.sum(axis=0)
        if ms[-1] == steps:
            f_input = float(vals[-1])
    f_base = float(model.value_and_grad(base[None])[0][0])
    attr = delta * grad_sum / steps
    return AttributionMap(attr, kind, steps, float(f_input), f_base, target)


def atom_scores(amap: AttributionMap) -> np.ndarray:
    """Per-row sum of absolute attributions."""
    a = amap.attributions
    return np.abs(a).reshape(a.shape[0], -1).sum(axis=1)
