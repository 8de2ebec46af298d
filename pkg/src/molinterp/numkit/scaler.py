"""Per-feature standardization."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch

STD_FLOOR = 1e-8


@dataclass(frozen=True)
class ScalerState:
    mean: np.ndarray
    std: np.ndarray

    def transform(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.mean.shape[0]:
            raise ShapeMismatch(f"scaler fit on width {self.mean.shape[0]}, got {x.shape}")
        return (x - self.mean) / self.std

    def inverse(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=np.float64) * self.std + self.mean

    def digest(self) -> str:
        """Digest of the fitted statistics."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.mean, dtype="<f8").tobytes())
        h.update(np.ascontiguousarray(self.std, dtype="<f8").tobytes())
        return h.hexdigest()[:16]


def fit_scaler(x: np.ndarray) -> ScalerState:
    """Column means and population standard deviations (floored at 1e-8)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ShapeMismatch("scaler needs a non-empty 2-D matrix")
    return ScalerState(x.mean(axis=0), np.maximum(x.std(axis=0), STD_FLOOR))
