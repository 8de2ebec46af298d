"""Graph-level physicochemical descriptors: weight, TPSA, Crippen logP, counts, complexity."""

from __future__ import annotations

import math
from collections import Counter

from ..chem.elements import ATOMIC_WEIGHT
from ..chem.molecule import BondOrder, Molecule
from ..smarts.matcher import matches_at
from .tables import crippen_table, tpsa_table

H_WEIGHT = ATOMIC_WEIGHT["H"]
_HALO = ("F", "Cl", "Br")


def molecular_weight(mol: Molecule) -> float:
    """Average molecular weight in Da, implicit hydrogens included."""
    return sum(ATOMIC_WEIGHT[a.element] for a in mol.atoms) + H_WEIGHT * mol.hydrogen_count()


def _bond_counts(mol: Molecule, atom: int) -> tuple[int, int, int, int]:
    counts = [0, 0, 0, 0]
    for _, b in mol.neighbors[atom]:
        order = mol.bonds[b].order
        counts[3 if order == BondOrder.AROMATIC else int(order) - 1] += 1
    return counts[0], counts[1], counts[2], counts[3]


def _in_ring_of_size(mol: Molecule, atom: int, size: int) -> bool:
    return any(len(r) == size and atom in r for r in mol.rings)


def tpsa_contributions(mol: Molecule, include_sp: bool = False) -> list[float]:
    """Per-atom Ertl polar surface contributions (zero for non-polar atoms)."""
    table = tpsa_table()
    polar = ("N", "O", "S", "P") if include_sp else ("N", "O")
    out = []
    for atom in mol.atoms:
        if atom.element not in polar:
            out.append(0.0)
            continue
        nbrs = mol.degree(atom.index)
        key = (
            nbrs,
            atom.hcount,
            atom.charge,
            *_bond_counts(mol, atom.index),
            int(_in_ring_of_size(mol, atom.index, 3)),
        )
        value = None
        for row in table:
            if row.element == atom.element and row.matches(key):
                value = row.value
                break
        if value is None:
            if atom.element == "N":
                value = max(0.0, 30.5 - 8.2 * nbrs + 1.5 * atom.hcount)
            elif atom.element == "O":
                value = max(0.0, 28.5 - 8.6 * nbrs + 1.5 * atom.hcount)
            else:
                value = 0.0
        out.append(value)
    return out


def tpsa(mol: Molecule, include_sp: bool = False) -> float:
    return sum(tpsa_contributions(mol, include_sp))


def _hydrogen_type(mol: Molecule, atom: int) -> str:
    """Crippen class of a hydrogen attached to ``atom``.

    Hydrogens are implicit here, so the hydrogen patterns of the type table
    are decided from the parent atom and its other neighbours, in table order.
    """
    a = mol.atoms[atom]
    if a.element == "C":
        return "H1"
    heavy = [mol.atoms[n] for n in mol.neighbor_atoms(atom)]
    aliphatic_o = a.element == "O" and not a.aromatic
    if aliphatic_o:
        # other neighbours of O: heavy atoms plus any second hydrogen
        if any((n.element == "C" and not n.aromatic and mol.degree(n.index) + n.hcount == 4) or
               (n.element == "C" and n.aromatic) for n in heavy):
            return "H2"
        if a.hcount > 1 or any(n.element not in ("C", "N", "O", "S") for n in heavy):
            return "H2"
    # the parent-element tests ignore aromaticity: [nH] hydrogens are N-H type
    if a.element not in ("C", "N", "O"):
        return "H2"
    if a.element == "N":
        return "H3"
    # remaining case: aliphatic O bonded only to aliphatic C/N/O/S
    if any(n.element == "N" for n in heavy):
        return "H3"
    for n in heavy:
        if n.element == "C":
            for nb, b in mol.neighbors[n.index]:
                other = mol.atoms[nb]
                if nb != atom and mol.bonds[b].order == BondOrder.DOUBLE and (
                    other.element in ("C", "N") or (other.element in ("O", "S") and not other.aromatic)
                ):
                    return "H4"
        elif n.element in ("O", "S"):
            return "H4"
    return "HS"


def crippen_types(mol: Molecule) -> list[str | None]:
    """First-match Wildman–Crippen type per heavy atom; None if no type applies."""
    heavy_types = [t for t in crippen_table() if not t.label.startswith("H")]
    out: list[str | None] = []
    for atom in range(len(mol.atoms)):
        label = None
        for t in heavy_types:
            if matches_at(t.pattern, mol, atom):
                label = t.label
                break
        out.append(label)
    return out


def crippen_contributions(mol: Molecule) -> list[float]:
    """Per-atom logP contributions; each heavy atom carries its hydrogens."""
    table = crippen_table()
    value = {}
    for t in table:
        value.setdefault(t.label, t.logp)
    out = []
    for atom, label in zip(mol.atoms, crippen_types(mol)):
        c = value[label] if label is not None else 0.0
        if atom.hcount:
            c += atom.hcount * value[_hydrogen_type(mol, atom.index)]
        out.append(c)
    return out


def crippen_logp(mol: Molecule) -> float:
    return sum(crippen_contributions(mol))


def lipinski_hbd(mol: Molecule) -> int:
    """Total hydrogens on N and O atoms."""
    return sum(a.hcount for a in mol.atoms if a.element in ("N", "O"))


def lipinski_hba(mol: Molecule) -> int:
    """Number of N and O atoms."""
    return sum(1 for a in mol.atoms if a.element in ("N", "O"))


def _has_triple(mol: Molecule, atom: int) -> bool:
    return any(mol.bonds[b].order == BondOrder.TRIPLE for _, b in mol.neighbors[atom])


def _bulky_terminal(mol: Molecule, atom: int) -> bool:
    """CF3, CCl3, CBr3 or tert-butyl centre."""
    a = mol.atoms[atom]
    if a.element != "C":
        return False
    nbrs = [mol.atoms[n] for n in mol.neighbor_atoms(atom)]
    for halo in _HALO:
        if sum(1 for n in nbrs if n.element == halo) >= 3:
            return True
    methyls = sum(
        1 for n in nbrs if n.element == "C" and not n.aromatic and n.hcount == 3 and mol.degree(n.index) == 1
    )
    return methyls >= 3


def _is_carbonyl_like(mol: Molecule, atom: int) -> bool:
    a = mol.atoms[atom]
    if a.element != "C" or a.aromatic or mol.degree(atom) != 3:
        return False
    return any(
        mol.bonds[b].order == BondOrder.DOUBLE and mol.atoms[nb].element in ("N", "O", "S")
        for nb, b in mol.neighbors[atom]
    )


def is_rotatable(mol: Molecule, bond_index: int) -> bool:
    """Strict rotatable-bond test.

    A non-ring single bond between heavy atoms of degree >= 2, neither atom in
    a triple bond nor a CX3/tert-butyl centre, and not the C-X bond of an
    amide, ester, thioester or amidine (C(=N/O/S) to N/O/S).
    """
    bond = mol.bonds[bond_index]
    if bond.order != BondOrder.SINGLE or bond_index in mol.ring_bonds:
        return False
    a, b = bond.begin, bond.end
    for x in (a, b):
        if mol.degree(x) < 2 or _has_triple(mol, x) or _bulky_terminal(mol, x):
            return False
    for c, x in ((a, b), (b, a)):
        if _is_carbonyl_like(mol, c) and mol.atoms[x].element in ("N", "O", "S"):
            return False
    return True


def rotatable_bonds(mol: Molecule) -> int:
    return sum(1 for i in range(len(mol.bonds)) if is_rotatable(mol, i))


def complexity(mol: Molecule) -> float:
    """Bertz-style information content of the heavy-atom graph.

    Sum of two terms, both in bits. The connectivity term treats every pair of
    bonds sharing an atom as one connection, classed by the centre element and
    the sorted element pair of its ends: ``2*n*log2(n) - sum(n_i*log2(n_i))``.
    The element term is ``N*log2(N) - sum(N_e*log2(N_e))`` over heavy-atom
    element counts. Both terms are zero for a single atom and grow with size
    and heterogeneity.
    """

    def info(counts: Counter) -> tuple[int, float]:
        total = sum(counts.values())
        if total == 0:
            return 0, 0.0
        return total, total * math.log2(total) - sum(c * math.log2(c) for c in counts.values())

    pairs: Counter = Counter()
    for atom in mol.atoms:
        nb = sorted(mol.atoms[n].element for n in mol.neighbor_atoms(atom.index))
        for i in range(len(nb)):
            for j in range(i + 1, len(nb)):
                pairs[(atom.element, nb[i], nb[j])] += 1
    n_conn, h_conn = info(pairs)
    conn = (n_conn * math.log2(n_conn) + h_conn) if n_conn else 0.0
    _, h_elem = info(Counter(a.element for a in mol.atoms))
    return conn + h_elem


def ring_count(mol: Molecule) -> int:
    return len(mol.rings)
