"""Ring perception: smallest set of smallest rings and connectivity helpers.

The SSSR is built from Horton candidate cycles (shortest path from a root to
both ends of an edge) restricted to the cyclic core of the graph, sorted by
(size, sorted member indices) and filtered greedily for linear independence
over GF(2) in edge space.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

Adjacency = Sequence[Sequence[int]]


def count_components(n_atoms: int, adj: Adjacency) -> int:
    seen = [False] * n_atoms
    count = 0
    for start in range(n_atoms):
        if seen[start]:
            continue
        count += 1
        seen[start] = True
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
    return count


def components(adj: Adjacency, subset: Iterable[int]) -> list[frozenset[int]]:
    """Partition ``subset`` into maximal connected pieces of the induced graph.

    Pieces are ordered by their smallest member.
    """
    members = set(subset)
    out: list[frozenset[int]] = []
    for start in sorted(members):
        if any(start in c for c in out):
            continue
        piece = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v in members and v not in piece:
                    piece.add(v)
                    stack.append(v)
        out.append(frozenset(piece))
    return out


def _cyclic_core(n_atoms: int, adj: Adjacency) -> list[set[int]]:
    """Adjacency of the graph after repeatedly stripping degree<=1 vertices."""
    core = [set(nbrs) for nbrs in adj]
    queue = deque(i for i in range(n_atoms) if len(core[i]) <= 1)
    removed = [False] * n_atoms
    while queue:
        u = queue.popleft()
        if removed[u]:
            continue
        removed[u] = True
        for v in list(core[u]):
            core[v].discard(u)
            if not removed[v] and len(core[v]) <= 1:
                queue.append(v)
        core[u].clear()
    return core


def _bfs_tree(root: int, core: list[set[int]]) -> tuple[dict[int, int], dict[int, int]]:
    dist = {root: 0}
    parent = {root: -1}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in sorted(core[u]):
            if v not in dist:
                dist[v] = dist[u] + 1
                parent[v] = u
                queue.append(v)
    return dist, parent


def _path_to_root(v: int, parent: dict[int, int]) -> list[int]:
    path = [v]
    while parent[path[-1]] != -1:
        path.append(parent[path[-1]])
    return path


def _normalize_cycle(cycle: list[int]) -> tuple[int, ...]:
    """Rotate to start at the minimum member, walking toward its smaller neighbour."""
    k = cycle.index(min(cycle))
    rotated = cycle[k:] + cycle[:k]
    if len(rotated) > 2 and rotated[-1] < rotated[1]:
        rotated = [rotated[0]] + rotated[:0:-1]
    return tuple(rotated)


def sssr(n_atoms: int, adj: Adjacency) -> list[tuple[int, ...]]:
    """Smallest set of smallest rings as atom cycles in traversal order."""
    n_edges = sum(len(nbrs) for nbrs in adj) // 2
    needed = n_edges - n_atoms + count_components(n_atoms, adj)
    if needed <= 0:
        return []
    core = _cyclic_core(n_atoms, adj)
    edge_id: dict[tuple[int, int], int] = {}
    for u in range(n_atoms):
        for v in sorted(core[u]):
            if u < v:
                edge_id[(u, v)] = len(edge_id)

    candidates: dict[int, tuple[int, ...]] = {}
    for root in range(n_atoms):
        if not core[root]:
            continue
        dist, parent = _bfs_tree(root, core)
        for (x, y) in edge_id:
            if x not in dist or y not in dist:
                continue
            px = _path_to_root(x, parent)
            py = _path_to_root(y, parent)
            if set(px[:-1]) & set(py[:-1]) or x in py or y in px:
                continue
            cycle = px[::-1] + py[:-1]
            if len(cycle) < 3:
                continue
            mask = 0
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                mask |= 1 << edge_id[(a, b) if a < b else (b, a)]
            if mask not in candidates:
                candidates[mask] = _normalize_cycle(cycle)

    ordered = sorted(candidates.items(), key=lambda kv: (len(kv[1]), sorted(kv[1]), kv[1]))
    basis: dict[int, int] = {}  # pivot bit -> reduced vector
    rings: list[tuple[int, ...]] = []
    for mask, cycle in ordered:
        vec = mask
        while vec:
            pivot = vec.bit_length() - 1
            if pivot in basis:
                vec ^= basis[pivot]
            else:
                basis[pivot] = vec
                break
        if vec:
            rings.append(cycle)
            if len(rings) == needed:
                break
    return rings
