"""Dense feed-forward networks with hand-written backward passes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import MissingCache, ShapeMismatch

ACTIVATIONS = ("relu", "softplus", "tanh", "identity")


def _act(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "softplus":
        return np.logaddexp(0.0, z)
    if name == "tanh":
        return np.tanh(z)
    return z


def _act_grad(name: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    if name == "relu":
        return (z > 0.0).astype(z.dtype)
    if name == "softplus":
        return 0.5 * (1.0 + np.tanh(0.5 * z))  # logistic(z), overflow-free
    if name == "tanh":
        return 1.0 - a * a
    return np.ones_like(z)


@dataclass
class ForwardCache:
    inputs: list[np.ndarray]  # input to each layer
    pre: list[np.ndarray]  # pre-activations of hidden layers
    post: list[np.ndarray]  # activations before dropout
    masks: list[np.ndarray | None]


@dataclass
class DenseNet:
    """MLP ``dims[0] -> ... -> dims[-1]`` with a linear output layer.

    Hidden layers apply ``activation`` then inverted dropout (train mode only).
    Weights are stored ``(fan_in, fan_out)`` so ``y = x @ W + b``.
    """

    dims: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activation: str = "relu"
    dropout: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if len(self.dims) < 2:
            raise ShapeMismatch("a network needs at least input and output widths")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        n_hidden = len(self.dims) - 2
        if not self.dropout:
            self.dropout = (0.0,) * n_hidden
        if len(self.dropout) != n_hidden:
            raise ShapeMismatch("one dropout rate per hidden layer")
        for p in self.dropout:
            if not 0.0 <= p < 1.0:
                raise ValueError("dropout rate must be in [0, 1)")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (self.dims[i], self.dims[i + 1]) or b.shape != (self.dims[i + 1],):
                raise ShapeMismatch(f"layer {i} parameters do not match dims {self.dims}")

    @classmethod
    def create(
        cls,
        dims: Sequence[int],
        rng: np.random.Generator,
        activation: str = "relu",
        dropout: float | Sequence[float] = 0.0,
    ) -> "DenseNet":
        """Kaiming-uniform fan-in init (bound sqrt(6/fan_in)); last layer sqrt(3/fan_in); zero biases."""
        dims = tuple(int(d) for d in dims)
        weights, biases = [], []
        for i in range(len(dims) - 1):
            gain = 3.0 if i == len(dims) - 2 else 6.0
            bound = np.sqrt(gain / dims[i])
            weights.append(rng.uniform(-bound, bound, size=(dims[i], dims[i + 1])))
            biases.append(np.zeros(dims[i + 1]))
        n_hidden = len(dims) - 2
        rates = (float(dropout),) * n_hidden if np.isscalar(dropout) else tuple(float(d) for d in dropout)
        return cls(dims, weights, biases, activation, rates)

    @property
    def params(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def copy(self) -> "DenseNet":
        return DenseNet(self.dims, [w.copy() for w in self.weights], [b.copy() for b in self.biases],
                        self.activation, self.dropout)

    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.dims[0]:
            raise ShapeMismatch(f"expected batch of width {self.dims[0]}, got shape {x.shape}")
        return x

    def forward(self, x: np.ndarray, train: bool = False, rng: np.random.Generator | None = None):
        """Return outputs; in train mode return ``(outputs, cache)``.

        Train mode needs ``rng`` whenever some dropout rate is positive.
        """
        x = self._check(x)
        cache = ForwardCache([], [], [], [])
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            cache.inputs.append(h)
            z = h @ w + b
            if i == last:
                h = z
                break
            a = _act(self.activation, z)
            cache.pre.append(z)
            cache.post.append(a)
            mask = None
            if train and self.dropout[i] > 0.0:
                if rng is None:
                    raise ValueError("train-mode dropout needs an rng")
                keep = 1.0 - self.dropout[i]
                mask = (rng.random(a.shape) < keep) / keep
                a = a * mask
            cache.masks.append(mask)
            h = a
        return (h, cache) if train else h

    def backward(self, cache: ForwardCache | None, grad_out: np.ndarray):
        """Gradients ``(param_grads, input_grad)`` for upstream gradient ``grad_out``.

        ``param_grads`` is ordered like :attr:`params` (W0, b0, W1, b1, ...).
        """
        if cache is None or not cache.inputs:
            raise MissingCache("backward needs the cache of a train-mode forward pass")
        g = np.asarray(grad_out, dtype=np.float64)
        if g.shape != (cache.inputs[0].shape[0], self.dims[-1]):
            raise ShapeMismatch(f"upstream gradient shape {g.shape} does not match the output")
        grads: list[np.ndarray] = [None] * (2 * len(self.weights))  # type: ignore[list-item]
        for i in range(len(self.weights) - 1, -1, -1):
            grads[2 * i] = cache.inputs[i].T @ g
            grads[2 * i + 1] = g.sum(axis=0)
            g = g @ self.weights[i].T
            if i > 0:
                j = i - 1
                if cache.masks[j] is not None:
                    g = g * cache.masks[j]
                g = g * _act_grad(self.activation, cache.pre[j], cache.post[j])
        return grads, g

    def input_gradient(self, x: np.ndarray, grad_out: np.ndarray | None = None) -> np.ndarray:
        """d(sum of outputs weighted by grad_out)/dx in eval mode."""
        x = self._check(x)
        out, cache = self.eval_with_cache(x)
        if grad_out is None:
            grad_out = np.ones_like(out)
        return self.backward(cache, grad_out)[1]

    def eval_with_cache(self, x: np.ndarray):
        """Dropout-free forward pass that keeps the cache for :meth:`backward`."""
        saved = self.dropout
        self.dropout = (0.0,) * len(saved)
        try:
            return self.forward(x, train=True)
        finally:
            self.dropout = saved


def mse_loss(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean over all entries of squared error, and its gradient w.r.t. ``pred``."""
    diff = pred - target
    return float(np.mean(diff * diff)), 2.0 * diff / diff.size


def bce_with_logits(logits: np.ndarray, labels: np.ndarray, weights: np.ndarray | None = None):
    """Mean (optionally weighted) binary cross-entropy on logits, and its gradient."""
    z = logits
    loss = np.logaddexp(0.0, z) - labels * z
    prob = 0.5 * (1.0 + np.tanh(0.5 * z))
    grad = prob - labels
    if weights is None:
        return float(np.mean(loss)), grad / loss.size
    wsum = float(np.sum(weights))
    return float(np.sum(weights * loss) / wsum), weights * grad / wsum
