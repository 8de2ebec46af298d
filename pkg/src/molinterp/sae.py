"""Sparse autoencoders over embedding matrices and the factor analysis suite."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .numkit import (
    AdamState,
    DenseNet,
    NonFiniteLoss,
    ShapeMismatch,
    adam_step,
    correlation_matrix,
    fit_scaler,
    make_rng,
    minibatches,
    mse_loss,
    r2_score,
)
from .numkit.scaler import ScalerState


@dataclass(frozen=True)
class SaeConfig:
    k: int = 128
    l1: float = 0.01
    epochs: int = 200
    batch_size: int = 128
    lr: float = 1e-3
    dropout: float = 0.1
    # Optional KL penalty pulling each factor's mean activation rate toward
    # target_sparsity; disabled when kl_weight is 0.
    kl_weight: float = 0.0
    target_sparsity: float = 0.05
    # Rescale decoder columns to unit norm after every step, so the l1 term
    # cannot be dodged by shrinking codes and growing the decoder.
    unit_decoder: bool = True
    seed: int = 0


@dataclass
class SaeModel:
    """``z = relu(W h + b)``, ``h_hat = W' z + b'``."""

    W: np.ndarray  # (k, d)
    b: np.ndarray  # (k,)
    W_dec: np.ndarray  # (d, k)
    b_dec: np.ndarray  # (d,)
    l1: float = 0.01
    dropout: float = 0.1

    @property
    def d(self) -> int:
        return self.W.shape[1]

    @property
    def k(self) -> int:
        return self.W.shape[0]

    @property
    def params(self) -> list[np.ndarray]:
        return [self.W, self.b, self.W_dec, self.b_dec]

    @classmethod
    def create(cls, d: int, k: int, rng: np.random.Generator, l1: float = 0.01, dropout: float = 0.1) -> "SaeModel":
        bound = math.sqrt(6.0 / d)
        W = rng.uniform(-bound, bound, size=(k, d))
        W_dec = W.T / np.maximum(np.linalg.norm(W, axis=1), 1e-12)
        return cls(W, np.zeros(k), W_dec.copy(), np.zeros(d), l1, dropout)


def encode(model: SaeModel, H: np.ndarray) -> np.ndarray:
    """Factor activations ``Z`` (N x k), always non-negative."""
    H = np.asarray(H, dtype=np.float64)
    if H.ndim != 2 or H.shape[1] != model.d:
        raise ShapeMismatch(f"SAE expects width {model.d}, got {H.shape}")
    Z = np.maximum(H @ model.W.T + model.b, 0.0)
    assert (Z >= 0.0).all()
    return Z


def decode(model: SaeModel, Z: np.ndarray) -> np.ndarray:
    return Z @ model.W_dec.T + model.b_dec


def sae_loss_and_grads(
    model: SaeModel,
    H: np.ndarray,
    mask: np.ndarray | None = None,
    kl_weight: float = 0.0,
    target_sparsity: float = 0.05,
) -> tuple[float, list[np.ndarray]]:
    """Batch loss ``mean_n(||h - h_hat||^2 + l1*||z||_1) [+ kl_weight * KL]``.

    ``mask`` is an inverted-dropout mask on the code (applied to the decoder
    input only; the l1 term sees the undropped code). The KL term compares
    ``target_sparsity`` with each factor's batch-mean ``tanh(z)``.
    """
    n = H.shape[0]
    pre = H @ model.W.T + model.b
    z = np.maximum(pre, 0.0)
    zd = z * mask if mask is not None else z
    recon = zd @ model.W_dec.T + model.b_dec
    diff = recon - H
    loss = float(np.sum(diff * diff) / n + model.l1 * np.sum(z) / n)
    g_recon = 2.0 * diff / n
    gW_dec = g_recon.T @ zd
    gb_dec = g_recon.sum(axis=0)
    g_z = g_recon @ model.W_dec
    if mask is not None:
        g_z = g_z * mask
    g_z = g_z + model.l1 / n
    if kl_weight > 0.0:
        t = np.tanh(z)
        rho_hat = np.clip(t.mean(axis=0), 1e-6, 1.0 - 1e-6)
        rho = target_sparsity
        kl = rho * np.log(rho / rho_hat) + (1.0 - rho) * np.log((1.0 - rho) / (1.0 - rho_hat))
        loss += kl_weight * float(np.sum(kl))
        d_rho = -rho / rho_hat + (1.0 - rho) / (1.0 - rho_hat)
        g_z = g_z + kl_weight * d_rho / n * (1.0 - t * t)
    g_pre = g_z * (pre > 0.0)
    gW = g_pre.T @ H
    gb = g_pre.sum(axis=0)
    return loss, [gW, gb, gW_dec, gb_dec]


def train_sae(H: np.ndarray, config: SaeConfig = SaeConfig()) -> tuple[SaeModel, list[float]]:
    """Adam training with mini-batches; returns the model and per-epoch mean loss."""
    H = np.asarray(H, dtype=np.float64)
    if H.ndim != 2 or H.shape[0] < 2:
        raise ShapeMismatch("SAE training needs at least 2 embedding rows")
    init_rng = make_rng(config.seed, "sae", "init")
    batch_rng = make_rng(config.seed, "sae", "batches")
    drop_rng = make_rng(config.seed, "sae", "dropout")
    model = SaeModel.create(H.shape[1], config.k, init_rng, config.l1, config.dropout)
    opt = AdamState(lr=config.lr)
    keep = 1.0 - config.dropout
    curve: list[float] = []
    idx = np.arange(H.shape[0])
    for epoch in range(config.epochs):
        total, count = 0.0, 0
        for batch in minibatches(idx, config.batch_size, batch_rng):
            hb = H[batch]
            mask = None
            if config.dropout > 0.0:
                mask = (drop_rng.random((hb.shape[0], model.k)) < keep) / keep
            loss, grads = sae_loss_and_grads(model, hb, mask, config.kl_weight, config.target_sparsity)
            if not math.isfinite(loss):
                raise NonFiniteLoss(f"SAE loss became {loss} at epoch {epoch}", epoch=epoch)
            adam_step(opt, model.params, grads)
            if config.unit_decoder:
                model.W_dec /= np.maximum(np.linalg.norm(model.W_dec, axis=0), 1e-12)
            total += loss * hb.shape[0]
            count += hb.shape[0]
        curve.append(total / count)
    return model, curve


def reconstruction_mse(model: SaeModel, H: np.ndarray) -> float:
    diff = decode(model, encode(model, H)) - H
    return float(np.mean(diff * diff))


@dataclass(frozen=True)
class SparsityReport:
    frequencies: np.ndarray  # per factor
    threshold: float
    mean: float
    std: float
    min: float
    max: float

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "mean": self.mean,
            "std": self.std,
            "min": self.min,
            "max": self.max,
            "frequencies": [float(f) for f in self.frequencies],
        }


def sparsity_report(Z: np.ndarray, threshold: float = 0.1) -> SparsityReport:
    """Fraction of rows with activation strictly above ``threshold``, per factor."""
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.size == 0:
        raise ShapeMismatch("sparsity report needs a non-empty activation matrix")
    freq = (Z > threshold).mean(axis=0)
    return SparsityReport(freq, threshold, float(freq.mean()), float(freq.std()), float(freq.min()), float(freq.max()))


@dataclass(frozen=True)
class FactorCorrelations:
    r: np.ndarray  # (k, n_signals)
    constant_factors: np.ndarray
    constant_signals: np.ndarray
    top_pairs: list[tuple[int, int, float]]  # (factor, signal, r) by |r| descending


def factor_reward_correlations(Z: np.ndarray, R: np.ndarray, top: int | None = None) -> FactorCorrelations:
    """Pearson r for every (factor, signal); constant columns give r = 0 and are flagged."""
    Z = np.asarray(Z, dtype=np.float64)
    R = np.asarray(R, dtype=np.float64)
    if Z.shape[0] != R.shape[0]:
        raise ShapeMismatch("factor and reward matrices need equal row counts")
    r, cz, cr = correlation_matrix(Z, R)
    pairs = [(i, j, float(r[i, j])) for i in range(r.shape[0]) for j in range(r.shape[1])]
    # round so that rounding noise does not override the index tie-break
    pairs.sort(key=lambda p: (-round(abs(p[2]), 12), p[0], p[1]))
    if top is not None:
        pairs = pairs[:top]
    return FactorCorrelations(r, cz, cr, pairs)


@dataclass(frozen=True)
class PredictorConfig:
    kind: str = "mlp"  # "mlp" or "linear"
    hidden: tuple[int, ...] = (64,)
    epochs: int = 100
    batch_size: int = 128
    lr: float = 1e-3
    dropout: float = 0.2
    seed: int = 0


@dataclass(frozen=True)
class PredictorResult:
    signal: str
    train_r2: float
    test_r2: float


def _fit_linear(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    A = np.hstack([X, np.ones((X.shape[0], 1))])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return coef


def _predict_linear(coef: np.ndarray, X: np.ndarray) -> np.ndarray:
    return X @ coef[:-1] + coef[-1]


def train_mlp_regressor(
    X: np.ndarray, y: np.ndarray, config: PredictorConfig, stream: str
) -> tuple[DenseNet, ScalerState, ScalerState]:
    """MSE-trained MLP on standardized inputs and target."""
    xs = fit_scaler(X)
    ys = fit_scaler(y.reshape(-1, 1))
    Xn = xs.transform(X)
    yn = ys.transform(y.reshape(-1, 1))
    net = DenseNet.create(
        (X.shape[1],) + tuple(config.hidden) + (1,),
        make_rng(config.seed, stream, "init"),
        dropout=config.dropout,
    )
    batch_rng = make_rng(config.seed, stream, "batches")
    drop_rng = make_rng(config.seed, stream, "dropout")
    opt = AdamState(lr=config.lr)
    idx = np.arange(X.shape[0])
    for epoch in range(config.epochs):
        for batch in minibatches(idx, config.batch_size, batch_rng):
            out, cache = net.forward(Xn[batch], train=True, rng=drop_rng)
            loss, g = mse_loss(out, yn[batch])
            if not math.isfinite(loss):
                raise NonFiniteLoss(f"{stream} loss became {loss} at epoch {epoch}", epoch=epoch)
            grads, _ = net.backward(cache, g)
            adam_step(opt, net.params, grads)
    return net, xs, ys


def train_reward_predictor(
    Z: np.ndarray,
    R: np.ndarray,
    train_idx: np.ndarray,
    test_idx: np.ndarray,
    names: Sequence[str],
    config: PredictorConfig = PredictorConfig(),
) -> list[PredictorResult]:
    """One regressor per reward column, trained on factors; R^2 on both splits."""
    Z = np.asarray(Z, dtype=np.float64)
    R = np.asarray(R, dtype=np.float64)
    if Z.shape[0] != R.shape[0] or R.shape[1] != len(names):
        raise ShapeMismatch("reward predictor inputs disagree in shape")
    out = []
    for j, name in enumerate(names):
        y = R[:, j]
        if config.kind == "linear":
            coef = _fit_linear(Z[train_idx], y[train_idx])
            p_train = _predict_linear(coef, Z[train_idx])
            p_test = _predict_linear(coef, Z[test_idx])
        elif config.kind == "mlp":
            net, xs, ys = train_mlp_regressor(Z[train_idx], y[train_idx], config, f"predictor/{name}")
            p_train = ys.inverse(net.forward(xs.transform(Z[train_idx]))).ravel()
            p_test = ys.inverse(net.forward(xs.transform(Z[test_idx]))).ravel()
        else:
            raise ValueError(f"unknown predictor kind {config.kind!r}")
        out.append(PredictorResult(name, r2_score(p_train, y[train_idx]), r2_score(p_test, y[test_idx])))
    return out


def config_dict(config) -> dict:
    return asdict(config)


def sae_to_arrays(model: SaeModel) -> tuple[dict, dict[str, np.ndarray]]:
    meta = {"l1": model.l1, "dropout": model.dropout, "k": model.W.shape[0], "d": model.d}
    return meta, {"W": model.W, "b": model.b, "W_dec": model.W_dec, "b_dec": model.b_dec}


def sae_from_arrays(meta: dict, arrays: dict[str, np.ndarray]) -> SaeModel:
    return SaeModel(
        arrays["W"].copy(), arrays["b"].copy(), arrays["W_dec"].copy(), arrays["b_dec"].copy(),
        float(meta["l1"]), float(meta["dropout"]),
    )
