"""Planted-signal harness: synthetic corpus, embeddings with known carriers,
atom featurization and a differentiable surrogate reward."""

from .corpus import generate_corpus
from .featurize import FEATURE_NAMES, N_FEATURES, featurize_atoms
from .planted import (
    DEFAULT_DESCRIPTOR_GAINS,
    DEFAULT_MOTIFS,
    MOTIF_GAIN,
    PlantedSignal,
    PlantedSpec,
    SpecInvalid,
    carrier_matrix,
    generate_embeddings,
    planted_sources,
    standardize,
)
from .surrogate import (
    SurrogateConfig,
    SurrogateModel,
    SurrogateReport,
    batch_value_and_grad,
    create_surrogate,
    predict,
    surrogate_from_arrays,
    surrogate_to_arrays,
    train_surrogate,
    value_and_grad,
)

__all__ = [
    "DEFAULT_DESCRIPTOR_GAINS",
    "DEFAULT_MOTIFS",
    "FEATURE_NAMES",
    "MOTIF_GAIN",
    "N_FEATURES",
    "PlantedSignal",
    "PlantedSpec",
    "SpecInvalid",
    "SurrogateConfig",
    "SurrogateModel",
    "SurrogateReport",
    "batch_value_and_grad",
    "carrier_matrix",
    "create_surrogate",
    "featurize_atoms",
    "generate_corpus",
    "generate_embeddings",
    "planted_sources",
    "predict",
    "standardize",
    "surrogate_from_arrays",
    "surrogate_to_arrays",
    "train_surrogate",
    "value_and_grad",
]
