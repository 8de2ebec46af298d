"""Backtracking subgraph isomorphism for compiled patterns."""

from __future__ import annotations

from ..chem.molecule import Molecule
from .pattern import Pattern, atom_matches, bond_matches


def _search_order(pattern: Pattern, candidates: list[list[int]], anchor: bool) -> list[tuple[int, int | None, list]]:
    """Query visit order: most-constrained first, then always a neighbour of a placed atom.

    Each entry is (query atom, placed neighbour used to generate candidates,
    list of (placed query atom, bond expr) constraints to check).
    """
    n = len(pattern.query_atoms)
    placed: list[int] = []
    if anchor:
        first = 0
    else:
        first = min(range(n), key=lambda q: (len(candidates[q]), -len(pattern.neighbors(q)), q))
    placed.append(first)
    order = [(first, None, [])]
    remaining = set(range(n)) - {first}
    while remaining:
        frontier = [q for q in remaining if any(nb in placed for nb, _ in pattern.neighbors(q))]
        q = min(frontier, key=lambda q: (len(candidates[q]), q))
        constraints = [(nb, e) for nb, e in pattern.neighbors(q) if nb in placed]
        order.append((q, constraints[0][0], constraints))
        placed.append(q)
        remaining.discard(q)
    return order


def iter_mappings(pattern: Pattern, mol: Molecule, anchor_atom: int | None = None):
    """Yield every injective mapping (as a tuple indexed by query atom)."""
    n_q = len(pattern.query_atoms)
    n_m = len(mol.atoms)
    if n_q > n_m:
        return
    if anchor_atom is not None:
        if not atom_matches(pattern.query_atoms[0], mol, anchor_atom):
            return
        # Anchored lookups stay lazy: predicates are evaluated only on reached atoms.
        memo: dict[tuple[int, int], bool] = {}

        def allowed(q: int, m: int) -> bool:
            key = (q, m)
            if key not in memo:
                memo[key] = atom_matches(pattern.query_atoms[q], mol, m)
            return memo[key]

        candidates = [[anchor_atom]] + [[] for _ in range(n_q - 1)]
        order = _search_order(pattern, [[0]] * n_q, True)
    else:
        candidates = [
            [i for i in range(n_m) if atom_matches(expr, mol, i)] for expr in pattern.query_atoms
        ]
        if any(not c for c in candidates):
            return
        cand_sets = [set(c) for c in candidates]

        def allowed(q: int, m: int) -> bool:
            return m in cand_sets[q]

        order = _search_order(pattern, candidates, False)
    mapping = [-1] * n_q
    used = [False] * n_m

    def extend(depth: int):
        if depth == n_q:
            yield tuple(mapping)
            return
        q, via, constraints = order[depth]
        if via is None:
            pool = candidates[q]
        else:
            pool = [nb for nb, _ in mol.neighbors[mapping[via]]]
        for m in pool:
            if used[m] or not allowed(q, m):
                continue
            ok = True
            for nb_q, expr in constraints:
                bond = mol.bond_between(m, mapping[nb_q])
                if bond is None or not bond_matches(expr, mol, bond.index):
                    ok = False
                    break
            if not ok:
                continue
            mapping[q] = m
            used[m] = True
            yield from extend(depth + 1)
            mapping[q] = -1
            used[m] = False

    yield from extend(0)


def match_pattern(pattern: Pattern, mol: Molecule, unique: bool = True) -> list[tuple[int, ...]]:
    """All matches of ``pattern`` in ``mol``.

    With ``unique`` (the default) mappings covering the same atom set collapse
    to the lexicographically smallest one, and results are ordered by their
    sorted atom indices. Without it every mapping is returned, sorted.
    """
    if not unique:
        return sorted(iter_mappings(pattern, mol))
    best: dict[tuple[int, ...], tuple[int, ...]] = {}
    for m in iter_mappings(pattern, mol):
        key = tuple(sorted(m))
        if key not in best or m < best[key]:
            best[key] = m
    return [best[k] for k in sorted(best)]


def has_match(pattern: Pattern, mol: Molecule) -> bool:
    return next(iter_mappings(pattern, mol), None) is not None


def matches_at(pattern: Pattern, mol: Molecule, atom: int) -> bool:
    """True if some mapping sends query atom 0 to ``atom``."""
    return next(iter_mappings(pattern, mol, anchor_atom=atom), None) is not None
