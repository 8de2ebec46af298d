"""Saliency maps, motif extraction and counterfactual edits."""

from .counterfactual import CounterfactualResult, counterfactual_scan, edit_product
from .ig import (
    AttributionMap,
    CallableModel,
    LinearModel,
    NonFiniteGradient,
    atom_scores,
    integrated_gradients,
    resolve_baseline,
)
from .motifs import EmptyMolecule, MotifCandidate, extract_motifs, motif_candidates, score_threshold
from .rules import (
    RewiringImpossible,
    RuleNotApplicable,
    TransformationRule,
    apply_rule,
    load_rules,
    make_rule,
    parse_rules_text,
    rule_sites,
)
from .sanitize import Rejection, SanitizeResult, sanitize

__all__ = [
    "AttributionMap",
    "CallableModel",
    "CounterfactualResult",
    "EmptyMolecule",
    "LinearModel",
    "MotifCandidate",
    "NonFiniteGradient",
    "Rejection",
    "RewiringImpossible",
    "RuleNotApplicable",
    "SanitizeResult",
    "TransformationRule",
    "apply_rule",
    "atom_scores",
    "counterfactual_scan",
    "edit_product",
    "extract_motifs",
    "integrated_gradients",
    "load_rules",
    "make_rule",
    "motif_candidates",
    "parse_rules_text",
    "resolve_baseline",
    "rule_sites",
    "sanitize",
    "score_threshold",
]
