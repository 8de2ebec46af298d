"""Self-contained cheminformatics core: SMILES graphs, rings, aromaticity."""

from __future__ import annotations

from .errors import (
    ChemError,
    IndexOutOfRange,
    KekulizationError,
    SmilesError,
    SmilesSyntaxError,
    UnbalancedParen,
    UnclosedRing,
    UnknownElement,
    ValenceError,
)
from .io import SmilesRecord, iter_smiles_file, write_smiles_file
from .molecule import Atom, AtomSpec, Bond, BondOrder, Molecule, assemble, connected_components, unchecked_molecule
from .rings import sssr as _sssr
from .smiles import parse_smiles, write_smiles


def sssr(mol: Molecule) -> list[tuple[int, ...]]:
    """Smallest set of smallest rings, recomputed from the bond graph."""
    return _sssr(len(mol.atoms), mol.adjacency())


def perceive_aromaticity(mol: Molecule) -> Molecule:
    """Re-run Hückel perception on the molecule's Kekulé form (idempotent)."""
    atoms, bonds = mol.specs()
    return assemble(atoms, bonds, mol.source_text)


__all__ = [
    "Atom",
    "AtomSpec",
    "Bond",
    "BondOrder",
    "ChemError",
    "IndexOutOfRange",
    "KekulizationError",
    "Molecule",
    "SmilesError",
    "SmilesRecord",
    "SmilesSyntaxError",
    "UnbalancedParen",
    "UnclosedRing",
    "UnknownElement",
    "ValenceError",
    "assemble",
    "connected_components",
    "iter_smiles_file",
    "parse_smiles",
    "perceive_aromaticity",
    "sssr",
    "unchecked_molecule",
    "write_smiles",
    "write_smiles_file",
]
