"""Structural sanity checks for arbitrary molecular graphs."""

from __future__ import annotations

from dataclasses import dataclass

from ..chem.elements import SUPPORTED, allowed_valences
from ..chem.errors import ChemError
from ..chem.molecule import BondOrder, Molecule, assemble

MAX_ABS_CHARGE = 2


@dataclass(frozen=True)
class Rejection:
    kind: str  # ValenceExceeded, ChargeInsane, UnknownElement, AromaticityBroken
    atom: int | None = None
    ring: tuple[int, ...] | None = None
    detail: str = ""


@dataclass(frozen=True)
class SanitizeResult:
    rejection: Rejection | None = None

    @property
    def valid(self) -> bool:
        return self.rejection is None

    def __bool__(self) -> bool:
        return self.valid


def sanitize(mol: Molecule) -> SanitizeResult:
    """Check elements, charges, valences and aromaticity consistency; pure."""
    for atom in mol.atoms:
        if atom.element not in SUPPORTED:
            return SanitizeResult(Rejection("UnknownElement", atom.index, detail=atom.element))
        if abs(atom.charge) > MAX_ABS_CHARGE:
            return SanitizeResult(Rejection("ChargeInsane", atom.index, detail=f"charge {atom.charge}"))
        if atom.hcount < 0:
            return SanitizeResult(Rejection("ValenceExceeded", atom.index, detail="negative hydrogen count"))
        total = mol.total_valence(atom.index)
        if total > max(allowed_valences(atom.element, atom.charge), default=0):
            return SanitizeResult(
                Rejection("ValenceExceeded", atom.index, detail=f"{atom.element} valence {total}")
            )
    for bond in mol.bonds:
        both = mol.atoms[bond.begin].aromatic and mol.atoms[bond.end].aromatic
        if bond.order == BondOrder.AROMATIC and not both:
            ring = next((r for r in mol.rings if bond.begin in r and bond.end in r), None)
            return SanitizeResult(Rejection("AromaticityBroken", ring=ring, detail=f"bond {bond.index}"))
    try:
        atoms, bonds = mol.specs()
        again = assemble(atoms, bonds, mol.source_text)
    except ChemError as exc:
        return SanitizeResult(Rejection("ValenceExceeded", detail=str(exc)))
    for a, b in zip(mol.atoms, again.atoms):
        if a.aromatic != b.aromatic or a.hcount != b.hcount:
            ring = next((r for r in mol.rings if a.index in r), None)
            kind = "AromaticityBroken" if a.aromatic != b.aromatic else "ValenceExceeded"
            return SanitizeResult(Rejection(kind, atom=a.index, ring=ring, detail="re-perception disagrees"))
    return SanitizeResult()
