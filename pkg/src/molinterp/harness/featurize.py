"""Continuous per-atom features: the inputs that saliency is computed over.

Column layout (width 18, identical for every molecule):

====  ==========================================================
0-9   element one-hot: B, C, N, O, P, S, F, Cl, Br, I
10    formal charge
11    aromatic flag
12    heavy-atom degree
13    total hydrogen count
14    ring-membership flag
15    Crippen logP contribution of the atom and its hydrogens
16    Ertl TPSA contribution / 10
17    atom mass including hydrogens / 100
====  ==========================================================
"""

from __future__ import annotations

import numpy as np

from ..chem.elements import ATOMIC_WEIGHT
from ..chem.molecule import Molecule
from ..descriptors.physchem import crippen_contributions, tpsa_contributions

ELEMENTS = ("B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I")
FEATURE_NAMES = tuple(f"elem_{e}" for e in ELEMENTS) + (
    "charge",
    "aromatic",
    "degree",
    "h_count",
    "in_ring",
    "logp_share",
    "tpsa_share",
    "mass_share",
)
N_FEATURES = len(FEATURE_NAMES)


def featurize_atoms(mol: Molecule) -> np.ndarray:
    """Feature matrix of shape (n_atoms, 18) for ``mol``."""
    n = len(mol.atoms)
    x = np.zeros((n, N_FEATURES))
    logp = crippen_contributions(mol)
    psa = tpsa_contributions(mol)
    h_mass = ATOMIC_WEIGHT["H"]
    for a in mol.atoms:
        i = a.index
        x[i, ELEMENTS.index(a.element)] = 1.0
        x[i, 10] = a.charge
        x[i, 11] = float(a.aromatic)
        x[i, 12] = mol.degree(i)
        x[i, 13] = a.hcount
        x[i, 14] = float(mol.in_ring(i))
        x[i, 15] = logp[i]
        x[i, 16] = psa[i] / 10.0
        x[i, 17] = (ATOMIC_WEIGHT[a.element] + a.hcount * h_mass) / 100.0
    return x
