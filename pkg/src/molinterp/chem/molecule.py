"""Core molecular graph types and the assembly pipeline that validates them."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Sequence

from . import aromaticity
from .elements import SUPPORTED, allowed_valences, default_valence
from .errors import IndexOutOfRange, KekulizationError, SmilesSyntaxError, UnknownElement, ValenceError
from .rings import components, count_components, sssr


class BondOrder(IntEnum):
    SINGLE = 1
    DOUBLE = 2
    TRIPLE = 3
    AROMATIC = 4


@dataclass(frozen=True, slots=True)
class Atom:
    index: int
    element: str
    charge: int = 0
    hcount: int = 0
    aromatic: bool = False
    explicit_h: int | None = None

    @property
    def is_bracket(self) -> bool:
        return self.explicit_h is not None


@dataclass(frozen=True, slots=True)
class Bond:
    index: int
    begin: int
    end: int
    order: BondOrder
    kekule: int

    def other(self, atom: int) -> int:
        return self.end if atom == self.begin else self.begin


@dataclass(frozen=True, slots=True)
class AtomSpec:
    """Unvalidated atom description fed to :func:`assemble`."""

    element: str
    charge: int = 0
    explicit_h: int | None = None
    aromatic: bool = False


# Bond order in a spec: 1/2/3, or None for "aromatic or single, decide from rings".
BondSpec = tuple[int, int, "int | None"]


@dataclass(frozen=True, eq=False)
class Molecule:
    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    rings: tuple[tuple[int, ...], ...]
    source_text: str = ""
    n_fragments: int = 1
    neighbors: tuple[tuple[tuple[int, int], ...], ...] = field(default=(), repr=False)
    ring_count: tuple[int, ...] = field(default=(), repr=False)
    ring_bonds: frozenset[int] = field(default=frozenset(), repr=False)

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def multi_fragment(self) -> bool:
        return self.n_fragments > 1

    def degree(self, atom: int) -> int:
        return len(self.neighbors[atom])

    def neighbor_atoms(self, atom: int) -> list[int]:
        return [nb for nb, _ in self.neighbors[atom]]

    def bond_between(self, a: int, b: int) -> Bond | None:
        for nb, bidx in self.neighbors[a]:
            if nb == b:
                return self.bonds[bidx]
        return None

    def kekule_sum(self, atom: int) -> int:
        return sum(self.bonds[b].kekule for _, b in self.neighbors[atom])

    def total_valence(self, atom: int) -> int:
        return self.kekule_sum(atom) + self.atoms[atom].hcount

    def in_ring(self, atom: int) -> bool:
        return self.ring_count[atom] > 0

    def adjacency(self) -> list[list[int]]:
        return [[nb for nb, _ in nbrs] for nbrs in self.neighbors]

    def heavy_atom_count(self) -> int:
        return len(self.atoms)

    def hydrogen_count(self) -> int:
        return sum(a.hcount for a in self.atoms)

    def specs(self) -> tuple[list[AtomSpec], list[BondSpec]]:
        """Kekulé-form specs that reassemble into this molecule."""
        atoms = [
            AtomSpec(a.element, a.charge, a.explicit_h if a.is_bracket else None, False)
            for a in self.atoms
        ]
        bonds = [(b.begin, b.end, b.kekule) for b in self.bonds]
        return atoms, bonds

    def graph_key(self) -> tuple:
        """Order-dependent structural key, cheap equality for identical numbering."""
        return (
            tuple((a.element, a.charge, a.hcount, a.aromatic) for a in self.atoms),
            tuple(sorted((min(b.begin, b.end), max(b.begin, b.end), int(b.order)) for b in self.bonds)),
        )


def _organic_hcount(element: str, used: int, text: str) -> int:
    target = default_valence(element, 0, used)
    if target is None:
        raise ValenceError(f"{element} with {used} bond-order units exceeds its maximum valence", text)
    return target - used


def implied_hcount(element: str, aromatic: bool, sigma_sum: int) -> int | None:
    """H count an unbracketed atom would receive on reparse; None if impossible."""
    if aromatic:
        need = aromaticity.needs_pi_bond(element, 0, None, sigma_sum)
        used = sigma_sum + int(need)
    else:
        used = sigma_sum
    target = default_valence(element, 0, used)
    if target is None:
        return None
    return target - used


def assemble(atom_specs: Sequence[AtomSpec], bond_specs: Iterable[BondSpec], text: str = "") -> Molecule:
    """Validate a graph, kekulize aromatic input, assign hydrogens and perceive aromaticity."""
    n = len(atom_specs)
    for spec in atom_specs:
        if spec.element not in SUPPORTED:
            raise UnknownElement(f"element {spec.element!r} is outside the supported set", text)

    raw: list[tuple[int, int, int | None]] = []
    seen_pairs: set[tuple[int, int]] = set()
    for a, b, order in bond_specs:
        if not (0 <= a < n and 0 <= b < n) or a == b:
            raise SmilesSyntaxError(f"invalid bond endpoints ({a}, {b})", text)
        key = (min(a, b), max(a, b))
        if key in seen_pairs:
            raise SmilesSyntaxError(f"duplicate bond between atoms {key}", text)
        seen_pairs.add(key)
        raw.append((key[0], key[1], order))

    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b, _ in raw:
        adj[a].append(b)
        adj[b].append(a)
    for nbrs in adj:
        nbrs.sort()
    rings = sssr(n, adj)
    ring_atom_set = {a for r in rings for a in r}
    ring_pairs = set()
    for r in rings:
        for a, b in zip(r, r[1:] + r[:1]):
            ring_pairs.add((min(a, b), max(a, b)))

    # Resolve unspecified bonds: aromatic inside rings between aromatic atoms, else single.
    aromatic_bonds: list[tuple[int, int]] = []
    orders: dict[tuple[int, int], int] = {}
    for a, b, order in raw:
        if order is None:
            if atom_specs[a].aromatic and atom_specs[b].aromatic and (a, b) in ring_pairs:
                aromatic_bonds.append((a, b))
                orders[(a, b)] = 1
            else:
                orders[(a, b)] = 1
        else:
            orders[(a, b)] = order

    for i, spec in enumerate(atom_specs):
        if spec.aromatic and i not in ring_atom_set:
            raise KekulizationError(f"non-ring atom {i} marked aromatic", text)

    if aromatic_bonds:
        arom_atoms = {x for pair in aromatic_bonds for x in pair}
        sigma = [0] * n
        for (a, b), order in orders.items():
            sigma[a] += order
            sigma[b] += order
        need = [
            i in arom_atoms
            and atom_specs[i].aromatic
            and aromaticity.needs_pi_bond(
                atom_specs[i].element, atom_specs[i].charge, atom_specs[i].explicit_h, sigma[i]
            )
            for i in range(n)
        ]
        for pair in aromaticity.kekulize(n, aromatic_bonds, need, text):
            orders[pair] = 2

    used = [0] * n
    for (a, b), order in orders.items():
        used[a] += order
        used[b] += order
    hcounts: list[int] = []
    for i, spec in enumerate(atom_specs):
        if spec.explicit_h is None:
            if spec.charge != 0:
                raise SmilesSyntaxError("charged atoms must carry an explicit H count", text)
            hcounts.append(_organic_hcount(spec.element, used[i], text))
        else:
            total = used[i] + spec.explicit_h
            if total > max(allowed_valences(spec.element, spec.charge), default=0):
                raise ValenceError(
                    f"atom {i} ({spec.element}, charge {spec.charge}) has valence {total}", text
                )
            hcounts.append(spec.explicit_h)

    kek_nbrs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for (a, b), order in orders.items():
        kek_nbrs[a].append((b, order))
        kek_nbrs[b].append((a, order))
    arom_idx = aromaticity.aromatic_rings(
        rings,
        [s.element for s in atom_specs],
        [s.charge for s in atom_specs],
        hcounts,
        kek_nbrs,
    )
    aromatic_atoms: set[int] = set()
    aromatic_pairs: set[tuple[int, int]] = set()
    for idx in arom_idx:
        ring = rings[idx]
        aromatic_atoms.update(ring)
        for a, b in zip(ring, ring[1:] + ring[:1]):
            aromatic_pairs.add((min(a, b), max(a, b)))

    atoms = tuple(
        Atom(
            index=i,
            element=spec.element,
            charge=spec.charge,
            hcount=hcounts[i],
            aromatic=i in aromatic_atoms,
            explicit_h=spec.explicit_h,
        )
        for i, spec in enumerate(atom_specs)
    )
    bonds = []
    for a, b, _ in raw:
        kek = orders[(a, b)]
        order = BondOrder.AROMATIC if (a, b) in aromatic_pairs else BondOrder(kek)
        bonds.append(Bond(index=len(bonds), begin=a, end=b, order=order, kekule=kek))

    neighbors: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for bond in bonds:
        neighbors[bond.begin].append((bond.end, bond.index))
        neighbors[bond.end].append((bond.begin, bond.index))
    ring_count = [0] * n
    for r in rings:
        for a in r:
            ring_count[a] += 1
    ring_bond_idx = frozenset(
        bond.index for bond in bonds if (min(bond.begin, bond.end), max(bond.begin, bond.end)) in ring_pairs
    )
    return Molecule(
        atoms=atoms,
        bonds=tuple(bonds),
        rings=tuple(rings),
        source_text=text,
        n_fragments=count_components(n, adj) if n else 0,
        neighbors=tuple(tuple(sorted(nb)) for nb in neighbors),
        ring_count=tuple(ring_count),
        ring_bonds=ring_bond_idx,
    )


def connected_components(mol: Molecule, atom_subset: Iterable[int]) -> list[frozenset[int]]:
    """Maximal bond-connected pieces of ``atom_subset``, ordered by smallest member."""
    subset = list(atom_subset)
    for a in subset:
        if not 0 <= a < len(mol.atoms):
            raise IndexOutOfRange(f"atom index {a} out of range for {len(mol.atoms)} atoms")
    return components(mol.adjacency(), subset)


def unchecked_molecule(atoms: Sequence[Atom], bonds: Sequence[Bond], text: str = "") -> Molecule:
    """Molecule from explicit atoms and bonds with no chemical validation.

    Rings, neighbour lists and fragment counts are derived; valences,
    hydrogens and aromaticity are taken as given. Used to represent arbitrary
    graphs for :func:`molinterp.attribution.sanitize`.
    """
    n = len(atoms)
    adj: list[list[int]] = [[] for _ in range(n)]
    neighbors: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for bond in bonds:
        adj[bond.begin].append(bond.end)
        adj[bond.end].append(bond.begin)
        neighbors[bond.begin].append((bond.end, bond.index))
        neighbors[bond.end].append((bond.begin, bond.index))
    for nbrs in adj:
        nbrs.sort()
    rings = sssr(n, adj)
    ring_pairs = set()
    ring_count = [0] * n
    for r in rings:
        for a in r:
            ring_count[a] += 1
        for a, b in zip(r, r[1:] + r[:1]):
            ring_pairs.add((min(a, b), max(a, b)))
    return Molecule(
        atoms=tuple(atoms),
        bonds=tuple(bonds),
        rings=tuple(rings),
        source_text=text,
        n_fragments=count_components(n, adj) if n else 0,
        neighbors=tuple(tuple(sorted(nb)) for nb in neighbors),
        ring_count=tuple(ring_count),
        ring_bonds=frozenset(b.index for b in bonds if (min(b.begin, b.end), max(b.begin, b.end)) in ring_pairs),
    )
