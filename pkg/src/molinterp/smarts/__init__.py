"""SMARTS-subset patterns, subgraph matching and motif labelling."""

from .library import EmptyCorpus, MotifLibrary, label_matrix, load_library, motif_labels, motif_prevalence
from .matcher import has_match, iter_mappings, match_pattern, matches_at
from .pattern import ParseError, Pattern, SmartsError, UnsupportedPrimitive, compile_pattern

__all__ = [
    "EmptyCorpus",
    "MotifLibrary",
    "ParseError",
    "Pattern",
    "SmartsError",
    "UnsupportedPrimitive",
    "compile_pattern",
    "has_match",
    "iter_mappings",
    "label_matrix",
    "load_library",
    "match_pattern",
    "matches_at",
    "motif_labels",
    "motif_prevalence",
]
