"""Counterfactual edits inside salient motifs, scored by the change in QED."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..chem.errors import ChemError
from ..chem.molecule import Molecule
from ..chem.smiles import parse_smiles, write_smiles
from ..descriptors.qed import qed, qed_inputs
from .motifs import MotifCandidate
from .rules import RewiringImpossible, TransformationRule, apply_rule, rule_sites
from .sanitize import sanitize


@dataclass(frozen=True)
class CounterfactualResult:
    motif_index: int
    rule: str
    site: tuple[int, ...]
    product_smiles: str
    qed_before: float
    qed_after: float
    delta_qed: float
    valid: bool
    reason: str = ""


def _qed(mol: Molecule, weights) -> float:
    return qed(qed_inputs(mol), weights)


def edit_product(mol: Molecule, rule: TransformationRule, site: tuple[int, ...]) -> tuple[Molecule | None, str, str]:
    """Apply, sanitize and round-trip one edit; returns (product, smiles, rejection reason)."""
    try:
        product = apply_rule(mol, rule, site)
    except RewiringImpossible as exc:
        return None, "", f"RewiringImpossible: {exc}"
    except ChemError as exc:
        return None, "", f"{type(exc).__name__}: {exc}"
    check = sanitize(product)
    if not check.valid:
        return None, "", f"{check.rejection.kind}: {check.rejection.detail}"
    smiles = write_smiles(product)
    try:
        again = parse_smiles(smiles)
    except ChemError as exc:
        return None, smiles, f"reparse failed: {exc}"
    if again.graph_key() != product.graph_key():
        return None, smiles, "reparse changed the graph"
    return product, smiles, ""


def counterfactual_scan(
    mol: Molecule,
    motifs: Sequence[MotifCandidate],
    rules: Sequence[TransformationRule],
    weights: str | Sequence[float] = "mean",
) -> tuple[list[CounterfactualResult], dict[int, CounterfactualResult]]:
    """Every rule at every site lying inside a motif; best valid edit per motif.

    Results are ordered by motif, then rule order, then site order. The best
    edit has the largest delta QED; ties keep the earliest in that order.
    """
    before = _qed(mol, weights)
    results: list[CounterfactualResult] = []
    best: dict[int, CounterfactualResult] = {}
    site_cache = {rule.name: rule_sites(rule, mol) for rule in rules}
    for mi, motif in enumerate(motifs):
        for rule in rules:
            for site in site_cache[rule.name]:
                if not set(site) <= motif.atoms:
                    continue
                product, smiles, reason = edit_product(mol, rule, site)
                if product is None:
                    res = CounterfactualResult(mi, rule.name, site, smiles, before, float("nan"), float("nan"), False, reason)
                else:
                    after = _qed(product, weights)
                    res = CounterfactualResult(mi, rule.name, site, smiles, before, after, after - before, True)
                    if mi not in best or res.delta_qed > best[mi].delta_qed:
                        best[mi] = res
                results.append(res)
    return results, best
