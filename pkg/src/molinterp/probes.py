"""Per-motif probe classifiers on frozen embeddings.

Each motif gets its own MLP (``d -> 256 -> 128 -> 64 -> 1``) trained with
class-balanced oversampling and binary cross-entropy on standardized
embeddings. The scaler is fit on the training rows only and its digest is
stored in every report row so leakage can be detected after the fact.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .numkit import (
    AdamState,
    DenseNet,
    NonFiniteLoss,
    ScalerState,
    ShapeMismatch,
    SingleClass,
    adam_step,
    auroc,
    average_precision,
    balanced_indices,
    bce_with_logits,
    fit_scaler,
    make_rng,
    minibatches,
    split_indices,
)
from .smarts.library import MotifLibrary


@dataclass(frozen=True)
class ProbeConfig:
    hidden: tuple[int, ...] = (256, 128, 64)
    dropout: float = 0.2
    epochs: int = 50
    batch_size: int = 128
    lr: float = 1e-3
    test_fraction: float = 0.1
    seed: int = 0


@dataclass
class ProbeModel:
    """One probe: network, the scaler it was trained behind, and its motif."""

    net: DenseNet
    scaler: ScalerState
    motif: str

    def logits(self, H: np.ndarray) -> np.ndarray:
        return self.net.forward(self.scaler.transform(H)).ravel()


@dataclass(frozen=True)
class ProbeRow:
    motif: str
    prevalence: float
    auroc: float | None
    ap: float | None
    n_train: int
    n_test: int
    epochs: int
    scaler_digest: str = ""
    single_class_test: bool = False
    skipped: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ProbeReport:
    rows: list[ProbeRow] = field(default_factory=list)

    @property
    def evaluated(self) -> list[ProbeRow]:
        return [r for r in self.rows if r.auroc is not None]

    @property
    def mean_auroc(self) -> float | None:
        vals = [r.auroc for r in self.evaluated]
        return float(np.mean(vals)) if vals else None

    def to_dict(self) -> dict:
        return {"mean_auroc": self.mean_auroc, "rows": [r.to_dict() for r in self.rows]}


def _check(H: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    H = np.asarray(H, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64).ravel()
    if H.ndim != 2 or H.shape[0] != y.size:
        raise ShapeMismatch(f"embeddings {H.shape} vs {y.size} labels")
    return H, y


def train_probe(H: np.ndarray, labels: np.ndarray, config: ProbeConfig = ProbeConfig(), motif: str = "") -> ProbeModel:
    """Fit one probe on the given (training) rows.

    Raises:
        SingleClass: if ``labels`` do not contain both classes.
    """
    H, y = _check(H, labels)
    n_pos = int((y > 0.5).sum())
    if n_pos == 0 or n_pos == y.size:
        raise SingleClass(f"probe {motif!r} needs both classes in its training split")
    scaler = fit_scaler(H)
    X = scaler.transform(H)
    stream = f"probe/{motif}"
    net = DenseNet.create(
        (H.shape[1],) + tuple(config.hidden) + (1,),
        make_rng(config.seed, stream, "init"),
        dropout=config.dropout,
    )
    sample_rng = make_rng(config.seed, stream, "balance")
    batch_rng = make_rng(config.seed, stream, "batches")
    drop_rng = make_rng(config.seed, stream, "dropout")
    opt = AdamState(lr=config.lr)
    target = y.reshape(-1, 1)
    for epoch in range(config.epochs):
        epoch_idx = balanced_indices(y, sample_rng)
        for batch in minibatches(epoch_idx, config.batch_size, batch_rng):
            out, cache = net.forward(X[batch], train=True, rng=drop_rng)
            loss, g = bce_with_logits(out, target[batch])
            if not math.isfinite(loss):
                raise NonFiniteLoss(f"{stream} loss became {loss} at epoch {epoch}", epoch=epoch)
            grads, _ = net.backward(cache, g)
            adam_step(opt, net.params, grads)
    return ProbeModel(net, scaler, motif)


def evaluate_probe(
    model: ProbeModel, H_test: np.ndarray, labels_test: np.ndarray, n_train: int = 0, epochs: int = 0, prevalence: float | None = None
) -> ProbeRow:
    """AUROC and AP on held-out rows. A single-class test split keeps AP (if
    defined) and flags the row instead of raising."""
    H_test, y = _check(H_test, labels_test)
    scores = model.logits(H_test)
    single = bool(y.min() == y.max())
    auc = None if single else auroc(scores, y)
    try:
        ap = average_precision(scores, y)
    except SingleClass:
        ap = None
    prev = float(y.mean()) if prevalence is None else float(prevalence)
    return ProbeRow(model.motif, prev, auc, ap, n_train, y.size, epochs, model.scaler.digest(), single)


@dataclass(frozen=True)
class CooccurrenceMatrix:
    r: np.ndarray  # M x M Pearson correlations; NaN rows/cols for constant motifs
    constant: np.ndarray  # bool per motif
    names: tuple[str, ...] = ()


def motif_cooccurrence_correlation(labels: np.ndarray, names: Sequence[str] = ()) -> CooccurrenceMatrix:
    """Pearson correlation between motif label columns.

    Constant columns are flagged and their rows/columns set to NaN (the
    diagonal entry included), so the matrix stays symmetric.
    """
    L = np.asarray(labels, dtype=np.float64)
    if L.ndim != 2 or L.shape[0] < 2:
        raise ValueError("co-occurrence needs an N x M label matrix with N >= 2")
    centered = L - L.mean(axis=0)
    norms = np.sqrt((centered * centered).sum(axis=0))
    constant = norms == 0.0
    safe = np.where(constant, 1.0, norms)
    unit = centered / safe
    r = np.clip(unit.T @ unit, -1.0, 1.0)
    r = 0.5 * (r + r.T)
    np.fill_diagonal(r, 1.0)
    r[constant, :] = np.nan
    r[:, constant] = np.nan
    return CooccurrenceMatrix(r, constant, tuple(names))


def probe_suite(
    H: np.ndarray,
    labels: np.ndarray,
    library: MotifLibrary | Sequence[str],
    config: ProbeConfig = ProbeConfig(),
    split: tuple[np.ndarray, np.ndarray] | None = None,
) -> ProbeReport:
    """Train and evaluate one probe per motif in library order.

    Args:
        H: Embeddings (N x d).
        labels: Motif label matrix (N x M), columns in library order.
        library: Motif library or plain list of motif names.
        config: Probe hyperparameters.
        split: ``(train_idx, test_idx)``; defaults to the shared seeded split.

    Motifs whose training split is single-class are skipped with a reason.
    """
    H = np.asarray(H, dtype=np.float64)
    L = np.asarray(labels)
    names = list(library.names if isinstance(library, MotifLibrary) else library)
    if L.ndim != 2 or L.shape != (H.shape[0], len(names)):
        raise ShapeMismatch(f"labels {L.shape} do not match {H.shape[0]} rows x {len(names)} motifs")
    if split is None:
        split = split_indices(H.shape[0], config.test_fraction, config.seed)
    train_idx, test_idx = split
    report = ProbeReport()
    for j, name in enumerate(names):
        y = L[:, j].astype(np.float64)
        prevalence = float(y.mean())
        try:
            model = train_probe(H[train_idx], y[train_idx], config, motif=name)
        except SingleClass as exc:
            report.rows.append(ProbeRow(name, prevalence, None, None, train_idx.size, test_idx.size, 0, skipped=str(exc)))
            continue
        row = evaluate_probe(model, H[test_idx], y[test_idx], train_idx.size, config.epochs, prevalence)
        report.rows.append(row)
    return report


def random_label_control(
    H: np.ndarray, prevalence: float = 0.5, seeds: Sequence[int] = (0, 1, 2, 3, 4), config: ProbeConfig = ProbeConfig()
) -> list[float]:
    """Test AUROC of probes trained on coin-flip labels, one per seed."""
    H = np.asarray(H, dtype=np.float64)
    out = []
    for seed in seeds:
        rng = make_rng(seed, "control", "labels")
        y = (rng.random(H.shape[0]) < prevalence).astype(np.float64)
        cfg = ProbeConfig(**{**asdict(config), "seed": seed})
        train_idx, test_idx = split_indices(H.shape[0], cfg.test_fraction, seed)
        model = train_probe(H[train_idx], y[train_idx], cfg, motif="random")
        out.append(evaluate_probe(model, H[test_idx], y[test_idx]).auroc)
    return out
