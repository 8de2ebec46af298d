"""Hückel aromaticity perception and kekulization.

Electron contributions (per ring atom, read from the Kekulé structure):

====================================================  ===
atom situation                                         pi
====================================================  ===
double bond to an atom of the same ring                1
double bond to an atom of another ring (fused)         1
C with exocyclic double bond to N/O/S                  0
C carbanion (-1, no double bond)                       2
C carbocation (+1, no double bond)                     0
N, neutral, three connections incl. H (pyrrole type)   2
N anion without double bond                            2
O / S, neutral, two connections (furan/thiophene)      2
anything else (sp3, triple bonds, cumulenes)           --
====================================================  ===

A SSSR ring of size 5-7 made of C/N/O/S atoms is aromatic iff every member
has a contribution and the total is 4n+2.
"""

from __future__ import annotations

from typing import Sequence

from .elements import default_valence
from .errors import KekulizationError

PI_RING_ELEMENTS = frozenset({"C", "N", "O", "S"})
PI_RING_SIZES = (5, 6, 7)


def pi_contribution(
    atom: int,
    ring: frozenset[int],
    elements: Sequence[str],
    charges: Sequence[int],
    hcounts: Sequence[int],
    kek_nbrs: Sequence[Sequence[tuple[int, int]]],
    ring_atoms: frozenset[int],
) -> int | None:
    """Pi electrons that ``atom`` donates to ``ring``; None if it cannot take part."""
    elem = elements[atom]
    charge = charges[atom]
    nbrs = kek_nbrs[atom]
    if any(order == 3 for _, order in nbrs):
        return None
    doubles = [nb for nb, order in nbrs if order == 2]
    if len(doubles) > 1:
        return None
    if doubles:
        partner = doubles[0]
        if partner in ring:
            return 1
        if partner in ring_atoms and elements[partner] in ("C", "N"):
            return 1
        if elem == "C" and elements[partner] in ("O", "N", "S"):
            return 0
        return None
    connections = len(nbrs) + hcounts[atom]
    if elem == "C":
        if charge == -1:
            return 2
        if charge == 1:
            return 0
        return None
    if elem == "N":
        if charge == 0 and connections == 3:
            return 2
        if charge == -1:
            return 2
        return None
    if elem in ("O", "S"):
        if charge == 0 and connections == 2:
            return 2
        return None
    return None


def aromatic_rings(
    rings: Sequence[tuple[int, ...]],
    elements: Sequence[str],
    charges: Sequence[int],
    hcounts: Sequence[int],
    kek_nbrs: Sequence[Sequence[tuple[int, int]]],
) -> list[int]:
    """Indices into ``rings`` of the rings that satisfy the Hückel rule."""
    ring_atoms = frozenset(a for ring in rings for a in ring)
    out = []
    for idx, ring in enumerate(rings):
        if len(ring) not in PI_RING_SIZES:
            continue
        if any(elements[a] not in PI_RING_ELEMENTS for a in ring):
            continue
        members = frozenset(ring)
        total = 0
        for a in ring:
            c = pi_contribution(a, members, elements, charges, hcounts, kek_nbrs, ring_atoms)
            if c is None:
                break
            total += c
        else:
            if total % 4 == 2:
                out.append(idx)
    return out


def needs_pi_bond(element: str, charge: int, explicit_h: int | None, sigma_sum: int) -> bool:
    """Whether an input-aromatic atom must receive one double bond.

    ``sigma_sum`` counts every aromatic bond as 1 plus the orders of its
    other bonds. Organic-subset atoms take the double bond whenever their
    default valence leaves room for it; bracket atoms use their stated H.
    """
    used = sigma_sum + (explicit_h or 0)
    target = default_valence(element, charge, used)
    if target is None:
        return False
    return target - used >= 1


def kekulize(
    n_atoms: int,
    aromatic_bonds: Sequence[tuple[int, int]],
    need: Sequence[bool],
    text: str = "",
) -> set[tuple[int, int]]:
    """Choose which aromatic bonds become double so every needy atom gets one.

    Backtracking perfect matching over the needy atoms, always extending the
    lowest-index unmatched atom first; deterministic for a fixed input.
    """
    adj: dict[int, list[int]] = {i: [] for i in range(n_atoms)}
    for a, b in aromatic_bonds:
        if need[a] and need[b]:
            adj[a].append(b)
            adj[b].append(a)
    for nbrs in adj.values():
        nbrs.sort()
    matched = [-1] * n_atoms
    order = [i for i in range(n_atoms) if need[i]]

    def solve(pos: int) -> bool:
        while pos < len(order) and matched[order[pos]] != -1:
            pos += 1
        if pos == len(order):
            return True
        u = order[pos]
        for v in adj[u]:
            if matched[v] == -1:
                matched[u], matched[v] = v, u
                if solve(pos + 1):
                    return True
                matched[u], matched[v] = -1, -1
        return False

    if not solve(0):
        raise KekulizationError("aromatic system admits no alternating bond assignment", text)
    return {(min(u, v), max(u, v)) for u, v in enumerate(matched) if v > u}
