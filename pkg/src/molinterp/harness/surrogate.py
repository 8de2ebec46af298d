"""Differentiable surrogate reward: per-atom MLP, sum pooling, scalar head.

The surrogate stands in for a generative policy's output head as the saliency
target. It predicts QED from atom features. Hidden layers carry no biases, so
the network is positively homogeneous in its input up to the output offset;
gradients along a straight path from the zero vector are then constant within
each activation region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..numkit import AdamState, DenseNet, NonFiniteLoss, adam_step, make_rng, mse_loss, r2_score, split_indices
from ..numkit.checkpoint import net_from_arrays, net_to_arrays
from ..numkit.errors import ShapeMismatch
from .featurize import N_FEATURES


@dataclass(frozen=True)
class SurrogateConfig:
    atom_hidden: tuple[int, ...] = (64,)
    pooled: int = 32
    head_hidden: tuple[int, ...] = (32,)
    activation: str = "relu"
    biases: bool = False
    epochs: int = 150
    batch_size: int = 32
    lr: float = 3e-3
    test_fraction: float = 0.1
    seed: int = 0


@dataclass
class SurrogateModel:
    phi: DenseNet
    head: DenseNet
    y_mean: float
    y_std: float
    biases: bool = False

    @property
    def params(self) -> list[np.ndarray]:
        return self.phi.params + self.head.params

    @property
    def n_features(self) -> int:
        return self.phi.dims[0]

    def value_and_grad(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Stacked evaluation so the model can be handed straight to IG."""
        xs = np.asarray(xs, dtype=np.float64)
        if xs.ndim == 2:
            v, g = batch_value_and_grad(self, xs[None])
            return v, g[0]
        return batch_value_and_grad(self, xs)


def create_surrogate(config: SurrogateConfig, n_features: int = N_FEATURES) -> SurrogateModel:
    rng = make_rng(config.seed, "surrogate", "init")
    phi = DenseNet.create((n_features,) + config.atom_hidden + (config.pooled,), rng, config.activation)
    head = DenseNet.create((config.pooled,) + config.head_hidden + (1,), rng, config.activation)
    return SurrogateModel(phi, head, 0.0, 1.0, config.biases)


def _segments(sizes: Sequence[int]) -> np.ndarray:
    return np.repeat(np.arange(len(sizes)), sizes)


def _pool(a: np.ndarray, seg: np.ndarray, n_mol: int) -> np.ndarray:
    pooled = np.zeros((n_mol, a.shape[1]))
    np.add.at(pooled, seg, a)
    return pooled


def forward_batch(model: SurrogateModel, x: np.ndarray, sizes: Sequence[int]):
    """Outputs (n_mol,) for stacked atom rows, plus the caches for backward."""
    if x.ndim != 2 or x.shape[1] != model.n_features:
        raise ShapeMismatch(f"surrogate expects atom features of width {model.n_features}, got {x.shape}")
    seg = _segments(sizes)
    a, c_phi = model.phi.eval_with_cache(x)
    pooled = _pool(a, seg, len(sizes))
    out, c_head = model.head.eval_with_cache(pooled)
    return model.y_mean + model.y_std * out[:, 0], (seg, c_phi, c_head)


def backward_batch(model: SurrogateModel, caches, grad_out: np.ndarray):
    """Parameter gradients and per-atom input gradients for upstream ``grad_out`` (n_mol,)."""
    seg, c_phi, c_head = caches
    g_head, g_pooled = model.head.backward(c_head, (model.y_std * grad_out)[:, None])
    g_phi, g_x = model.phi.backward(c_phi, g_pooled[seg])
    grads = g_phi + g_head
    if not model.biases:
        # hidden biases stay at zero; the output offset remains trainable
        for i in range(1, len(g_phi), 2):
            grads[i] = np.zeros_like(grads[i])
        for i in range(len(g_phi) + 1, len(grads) - 1, 2):
            grads[i] = np.zeros_like(grads[i])
    return grads, g_x


def predict(model: SurrogateModel, x: np.ndarray) -> float:
    """Output for one molecule. Rows are canonically ordered first, so any
    permutation of the atoms gives a bit-identical result."""
    order = np.lexsort(x.T[::-1])
    out, _ = forward_batch(model, x[order], [x.shape[0]])
    return float(out[0])


def value_and_grad(model: SurrogateModel, x: np.ndarray) -> tuple[float, np.ndarray]:
    out, caches = forward_batch(model, x, [x.shape[0]])
    _, g = backward_batch(model, caches, np.ones(1))
    return float(out[0]), g


def batch_value_and_grad(model: SurrogateModel, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values (M,) and input gradients (M, n_atoms, F) for M copies of one molecule's atoms."""
    m, n, f = xs.shape
    out, caches = forward_batch(model, xs.reshape(m * n, f), [n] * m)
    _, g = backward_batch(model, caches, np.ones(m))
    return out, g.reshape(m, n, f)


@dataclass(frozen=True)
class SurrogateReport:
    train_r2: float
    test_r2: float
    train_mse: float
    test_mse: float
    loss_curve: tuple[float, ...]


def train_surrogate(
    features: Sequence[np.ndarray], targets: np.ndarray, config: SurrogateConfig = SurrogateConfig()
) -> tuple[SurrogateModel, SurrogateReport]:
    """MSE training on (atom features -> target) with a seeded 90/10 split."""
    targets = np.asarray(targets, dtype=np.float64)
    n = len(features)
    if n != targets.size or n < 2:
        raise ShapeMismatch("need one target per molecule and at least two molecules")
    train_idx, test_idx = split_indices(n, config.test_fraction, config.seed, "surrogate-split")
    model = create_surrogate(config, features[0].shape[1])
    model.y_mean = float(targets[train_idx].mean())
    model.y_std = float(max(targets[train_idx].std(), 1e-8))
    opt = AdamState(lr=config.lr)
    batch_rng = make_rng(config.seed, "surrogate", "batches")
    curve = []
    for epoch in range(config.epochs):
        total = 0.0
        order = batch_rng.permutation(train_idx)
        for start in range(0, order.size, config.batch_size):
            batch = order[start : start + config.batch_size]
            x = np.vstack([features[i] for i in batch])
            sizes = [features[i].shape[0] for i in batch]
            out, caches = forward_batch(model, x, sizes)
            # loss on the standardized scale keeps step sizes target-independent
            loss, g = mse_loss((out - model.y_mean) / model.y_std, (targets[batch] - model.y_mean) / model.y_std)
            if not math.isfinite(loss):
                raise NonFiniteLoss(f"surrogate loss became {loss} at epoch {epoch}", epoch=epoch)
            grads, _ = backward_batch(model, caches, g / model.y_std)
            adam_step(opt, model.params, grads)
            total += loss * batch.size
        curve.append(total / train_idx.size)

    def evaluate(idx: np.ndarray) -> tuple[float, float]:
        if idx.size == 0:
            return float("nan"), float("nan")
        pred = np.array([predict(model, features[i]) for i in idx])
        return r2_score(pred, targets[idx]) if idx.size > 1 else float("nan"), float(np.mean((pred - targets[idx]) ** 2))

    tr_r2, tr_mse = evaluate(train_idx)
    te_r2, te_mse = evaluate(test_idx)
    return model, SurrogateReport(tr_r2, te_r2, tr_mse, te_mse, tuple(curve))


def surrogate_to_arrays(model: SurrogateModel) -> tuple[dict, dict[str, np.ndarray]]:
    phi_meta, arrays = net_to_arrays(model.phi, "phi_")
    head_meta, head_arrays = net_to_arrays(model.head, "head_")
    arrays.update(head_arrays)
    meta = {"phi": phi_meta, "head": head_meta, "y_mean": model.y_mean, "y_std": model.y_std, "biases": model.biases}
    return meta, arrays


def surrogate_from_arrays(meta: dict, arrays: dict[str, np.ndarray]) -> SurrogateModel:
    return SurrogateModel(
        net_from_arrays(meta["phi"], arrays, "phi_"),
        net_from_arrays(meta["head"], arrays, "head_"),
        float(meta["y_mean"]),
        float(meta["y_std"]),
        bool(meta["biases"]),
    )
