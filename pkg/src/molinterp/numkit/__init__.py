"""Dense networks, Adam, standardization, metrics and seeded RNG streams."""

from .checkpoint import load_arrays, save_arrays
from .errors import MissingCache, NonFiniteLoss, ShapeMismatch, SingleClass
from .metrics import auroc, average_precision, correlation_matrix, pearson_r, r2_score
from .nn import DenseNet, bce_with_logits, mse_loss
from .optim import AdamState, adam_step
from .rng import derive_seed, make_rng, split_indices
from .scaler import ScalerState, fit_scaler
from .training import balanced_indices, class_weights, minibatches

__all__ = [
    "AdamState",
    "DenseNet",
    "MissingCache",
    "NonFiniteLoss",
    "ScalerState",
    "ShapeMismatch",
    "SingleClass",
    "adam_step",
    "auroc",
    "average_precision",
    "balanced_indices",
    "bce_with_logits",
    "class_weights",
    "correlation_matrix",
    "derive_seed",
    "fit_scaler",
    "load_arrays",
    "make_rng",
    "minibatches",
    "mse_loss",
    "pearson_r",
    "r2_score",
    "save_arrays",
    "split_indices",
]
