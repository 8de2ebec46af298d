"""Turning per-atom saliency into a few disjoint candidate motifs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..chem.molecule import Molecule, connected_components


class EmptyMolecule(ValueError):
    pass


@dataclass(frozen=True)
class MotifCandidate:
    atoms: frozenset[int]
    score: float
    origin: str  # "component" or "ring"

    @property
    def sorted_atoms(self) -> tuple[int, ...]:
        return tuple(sorted(self.atoms))


def score_threshold(scores: np.ndarray, percentile: float) -> float:
    """Per-molecule percentile with linear interpolation between order statistics."""
    return float(np.percentile(scores, percentile, method="linear"))


def motif_candidates(
    mol: Molecule, scores: np.ndarray, percentile: float = 75.0, ring_boost: float = 1.1
) -> list[MotifCandidate]:
    """Connected groups of atoms scoring above the percentile, plus every SSSR ring.

    Scores are sums of member atom scores; sets equal to an SSSR ring get
    ``ring_boost``. A component identical to a ring is kept once, as a ring.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if len(mol.atoms) == 0:
        raise EmptyMolecule("cannot extract motifs from a molecule without atoms")
    if scores.shape != (len(mol.atoms),):
        raise ValueError("one score per atom is required")
    thr = score_threshold(scores, percentile)
    hot = [i for i in range(len(mol.atoms)) if scores[i] > thr]
    rings = {frozenset(r) for r in mol.rings}
    out: dict[frozenset[int], MotifCandidate] = {}
    for r in mol.rings:
        s = frozenset(r)
        out[s] = MotifCandidate(s, float(scores[list(r)].sum()) * ring_boost, "ring")
    for comp in connected_components(mol, hot):
        if comp in rings:
            continue
        out[comp] = MotifCandidate(comp, float(scores[sorted(comp)].sum()), "component")
    return sorted(out.values(), key=lambda c: (-c.score, min(c.atoms), c.sorted_atoms))


def extract_motifs(
    mol: Molecule, scores: np.ndarray, percentile: float = 75.0, k: int = 3, ring_boost: float = 1.1
) -> list[MotifCandidate]:
    """Greedy top-``k`` pairwise-disjoint candidates by descending score."""
    if k < 1:
        raise ValueError("k must be at least 1")
    chosen: list[MotifCandidate] = []
    used: set[int] = set()
    for cand in motif_candidates(mol, scores, percentile, ring_boost):
        if cand.atoms & used:
            continue
        chosen.append(cand)
        used |= cand.atoms
        if len(chosen) == k:
            break
    return chosen
