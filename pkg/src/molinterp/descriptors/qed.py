"""Quantitative estimate of drug-likeness from its eight property desirabilities."""

from __future__ import annotations

import math
import warnings
from dataclasses import astuple, dataclass
from pathlib import Path
from typing import Sequence

from ..chem.molecule import BondOrder, Molecule, connected_components
from ..smarts.matcher import has_match, match_pattern
from ..smarts.pattern import Pattern, compile_pattern
from .physchem import crippen_logp, molecular_weight, rotatable_bonds, tpsa
from .tables import AdsParameter, qed_parameters

DESIRABILITY_FLOOR = 1e-6

# Acceptor and donor definitions used by the reference QED implementation.
_ACCEPTOR_SMARTS = (
    "[oH0;X2]",
    "[OH1;X2;v2]",
    "[OH0;X2;v2]",
    "[OH0;X1;v2]",
    "[O-;X1]",
    "[SH0;X2;v2]",
    "[SH0;X1;v2]",
    "[S-;X1]",
    "[nH0;X2]",
    "[NH0;X1;v3]",
)
_TERTIARY_N = "[N;+0;X3;v3]"
_DONOR_SMARTS = "[N&!H0&v3,N&!H0&+1&v4,O&H1&+0,S&H1&+0,n&H1&+0]"


class DegenerateDesirability(RuntimeWarning):
    """A desirability underflowed to zero and was clamped."""


@dataclass(frozen=True)
class QedInputs:
    mw: float
    alogp: float
    hba: int
    hbd: int
    psa: float
    rotb: int
    arom: int
    alerts: int


_compiled: dict[str, Pattern] = {}


def _pattern(text: str) -> Pattern:
    if text not in _compiled:
        _compiled[text] = compile_pattern(text)
    return _compiled[text]


def qed_acceptors(mol: Molecule) -> int:
    count = sum(len(match_pattern(_pattern(s), mol)) for s in _ACCEPTOR_SMARTS)
    tert = _pattern(_TERTIARY_N)
    for (atom,) in match_pattern(tert, mol):
        amide_like = False
        for nb, b in mol.neighbors[atom]:
            other = mol.atoms[nb]
            if other.aromatic or other.element not in ("C", "S"):
                continue
            if mol.bonds[b].order not in (BondOrder.SINGLE, BondOrder.AROMATIC):
                continue
            if any(
                mol.bonds[b2].order == BondOrder.DOUBLE and mol.atoms[x].element == "O" and not mol.atoms[x].aromatic
                for x, b2 in mol.neighbors[nb]
            ):
                amide_like = True
                break
        if not amide_like:
            count += 1
    return count


def qed_donors(mol: Molecule) -> int:
    return len(match_pattern(_pattern(_DONOR_SMARTS), mol))


def qed_aromatic_rings(mol: Molecule) -> int:
    """Ring count left after deleting aliphatic ring atoms bonded to non-aromatic atoms."""
    keep = []
    for a in mol.atoms:
        drop = (
            not a.aromatic
            and mol.in_ring(a.index)
            and any(not mol.atoms[n].aromatic for n in mol.neighbor_atoms(a.index))
        )
        if not drop:
            keep.append(a.index)
    kept = set(keep)
    edges = sum(1 for b in mol.bonds if b.begin in kept and b.end in kept)
    n_comp = len(connected_components(mol, keep)) if keep else 0
    return edges - len(keep) + n_comp


def load_alerts(path: str | Path) -> tuple[Pattern, ...]:
    """Alert SMARTS file: one pattern per line (optional name after a tab)."""
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        out.append(compile_pattern(line.split("\t")[-1].strip()))
    return tuple(out)


def count_alerts(mol: Molecule, alerts: Sequence[Pattern]) -> int:
    return sum(1 for p in alerts if has_match(p, mol))


def qed_inputs(mol: Molecule, alerts: Sequence[Pattern] = ()) -> QedInputs:
    return QedInputs(
        mw=molecular_weight(mol),
        alogp=crippen_logp(mol),
        hba=qed_acceptors(mol),
        hbd=qed_donors(mol),
        psa=tpsa(mol),
        rotb=rotatable_bonds(mol),
        arom=qed_aromatic_rings(mol),
        alerts=count_alerts(mol, alerts),
    )


def ads(x: float, p: AdsParameter) -> float:
    """Asymmetric double sigmoid, normalised to a peak of about 1."""
    exp1 = 1.0 + math.exp(-(x - p.C + p.D / 2.0) / p.E)
    exp2 = 1.0 + math.exp(-(x - p.C - p.D / 2.0) / p.F)
    return (p.A + p.B / exp1 * (1.0 - 1.0 / exp2)) / p.DMAX


def weight_set(name: str) -> tuple[float, ...]:
    """``mean`` (default), ``max`` or ``unit``."""
    params = qed_parameters()
    if name == "mean":
        return tuple(w for _, _, w, _ in params)
    if name == "max":
        return tuple(w for _, _, _, w in params)
    if name == "unit":
        return (1.0,) * len(params)
    raise ValueError(f"unknown QED weight set {name!r}")


def desirabilities(inputs: QedInputs) -> tuple[float, ...]:
    return tuple(ads(float(x), p) for x, (_, p, _, _) in zip(astuple(inputs), qed_parameters()))


def qed_from_desirabilities(d: Sequence[float], weights: Sequence[float]) -> float:
    """Weighted geometric mean ``exp(sum w ln d / sum w)``."""
    if len(d) != len(weights):
        raise ValueError("desirabilities and weights differ in length")
    total = 0.0
    for i, di in enumerate(d):
        if di <= 0.0:
            warnings.warn(
                f"desirability {i} is {di}; clamped to {DESIRABILITY_FLOOR}", DegenerateDesirability, stacklevel=2
            )
            di = DESIRABILITY_FLOOR
        total += weights[i] * math.log(di)
    return math.exp(total / sum(weights))


def qed(inputs: QedInputs, weights: str | Sequence[float] = "mean") -> float:
    w = weight_set(weights) if isinstance(weights, str) else tuple(weights)
    return qed_from_desirabilities(desirabilities(inputs), w)
