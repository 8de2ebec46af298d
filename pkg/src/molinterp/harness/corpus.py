"""Deterministic fragment-assembly generator for synthetic drug-like corpora."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..chem import AtomSpec, Molecule, assemble, parse_smiles, write_smiles
from ..chem.errors import ChemError
from ..numkit import make_rng

# Ring cores; attachment happens at any uncharged, unbracketed atom carrying H.
CORES = (
    "c1ccccc1", "c1ccccc1", "c1ccccc1", "c1ccncc1", "c1cccnc1", "c1ccsc1", "c1ccoc1",
    "c1cnc[nH]1", "c1ncncn1", "c1ccc2ccccc2c1", "c1ccc2[nH]ccc2c1", "C1CCCCC1", "C1CCCC1",
    "C1CC1", "C1CCNCC1", "C1COCCN1", "C1CCOC1", "O=C1CCCN1", "c1cocn1", "c1cscn1",
)
# Substituents; the first atom bonds to the host.
SUBSTITUENTS = (
    "F", "F", "Cl", "Br", "C", "C", "CC", "C(C)C", "OC", "O", "N", "C(=O)O", "C(=O)N", "C(=O)NC",
    "C#N", "[N+](=O)[O-]", "S(=O)(=O)C", "OC(=O)C", "NC(=O)C", "C(F)(F)F", "CC#C", "C=C", "CC=C",
    "N(C)C", "CCN", "CCO", "C(=O)C", "CC(=O)O", "OCC", "SC", "C(C)(C)C", "CCCC", "I",
    "C[NH3+]", "CC(=O)[O-]", "C[N+](C)(C)C",
)
# Linkers between two cores: atoms placed in a chain, first and last bond to the cores.
LINKERS = ("", "C", "CC", "O", "N", "C(=O)N", "NC(=O)", "S", "OC", "CCO", "C(=O)", "NS(=O)(=O)", "C=C")


@lru_cache(maxsize=None)
def _fragment(smiles: str) -> tuple[list[AtomSpec], list[tuple[int, int, int]], tuple[int, ...]]:
    mol = parse_smiles(smiles)
    atoms, bonds = mol.specs()
    sites = tuple(a.index for a in mol.atoms if a.hcount > 0 and not a.is_bracket)
    return atoms, bonds, sites


@dataclass
class _Builder:
    atoms: list[AtomSpec]
    bonds: list[tuple[int, int, int]]
    free: dict[int, int]  # atom -> remaining attachment capacity (H count)

    @classmethod
    def start(cls, smiles: str) -> "_Builder":
        atoms, bonds, _ = _fragment(smiles)
        b = cls(list(atoms), list(bonds), {})
        b._register(smiles, 0)
        return b

    def _register(self, smiles: str, offset: int) -> None:
        mol = parse_smiles(smiles)
        for a in mol.atoms:
            if a.hcount > 0 and not a.is_bracket:
                self.free[offset + a.index] = a.hcount

    def add(self, smiles: str, host: int, at: int = 0, order: int = 1) -> int:
        """Append fragment ``smiles`` bonding its atom ``at`` to ``host``; returns its offset."""
        atoms, bonds, _ = _fragment(smiles)
        off = len(self.atoms)
        self.atoms.extend(atoms)
        self.bonds.extend((a + off, b + off, o) for a, b, o in bonds)
        self.bonds.append((host, off + at, order))
        self._register(smiles, off)
        self._use(host, order)
        self._use(off + at, order)
        return off

    def _use(self, atom: int, n: int) -> None:
        left = self.free.get(atom, 0) - n
        if left > 0:
            self.free[atom] = left
        else:
            self.free.pop(atom, None)

    def pick_site(self, rng: np.random.Generator, carbon_only: bool = False) -> int | None:
        sites = sorted(a for a in self.free if not carbon_only or self.atoms[a].element == "C")
        if not sites:
            return None
        return int(sites[rng.integers(len(sites))])


def _random_molecule(rng: np.random.Generator) -> Molecule | None:
    b = _Builder.start(CORES[rng.integers(len(CORES))])
    n_cores = 1 + int(rng.random() < 0.55) + int(rng.random() < 0.2)
    for _ in range(n_cores - 1):
        host = b.pick_site(rng)
        if host is None:
            break
        linker = LINKERS[rng.integers(len(LINKERS))]
        core = CORES[rng.integers(len(CORES))]
        if linker:
            off = b.add(linker, host)
            _, _, sites = _fragment(linker)
            tail = off + len(_fragment(linker)[0]) - 1
            # the chain end that is not the attachment atom, if it can still bond
            if tail not in b.free:
                tail = next((off + s for s in sorted(sites, reverse=True) if off + s in b.free), None)
                if tail is None:
                    continue
            host = tail
        core_sites = _fragment(core)[2]
        b.add(core, host, at=core_sites[rng.integers(len(core_sites))])
    for _ in range(int(rng.integers(0, 5))):
        host = b.pick_site(rng, carbon_only=True)
        if host is None:
            break
        b.add(SUBSTITUENTS[rng.integers(len(SUBSTITUENTS))], host)
    try:
        mol = assemble(b.atoms, b.bonds)
    except ChemError:
        return None
    return mol


def generate_corpus(n: int, seed: int = 0, max_heavy_atoms: int = 45) -> list[str]:
    """``n`` distinct SMILES built from ring cores, linkers and substituents.

    Deterministic for a given ``(n, seed)``; molecules above
    ``max_heavy_atoms`` or failing validation are skipped.
    """
    rng = make_rng(seed, "harness", "corpus")
    out: list[str] = []
    seen: set[str] = set()
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 50 * n + 1000:
            raise RuntimeError("corpus generator could not reach the requested size")
        mol = _random_molecule(rng)
        if mol is None or len(mol.atoms) > max_heavy_atoms:
            continue
        smi = write_smiles(mol)
        if smi in seen:
            continue
        try:
            parse_smiles(smi)
        except ChemError:
            continue
        seen.add(smi)
        out.append(smi)
    return out
