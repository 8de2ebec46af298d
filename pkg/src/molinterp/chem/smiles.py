"""SMILES reading and writing.

Supported: organic-subset atoms, bracket atoms with H count and charge,
branches, ring closures (digits and %nn), bond symbols ``- = # :`` and
dot-separated fragments. Stereo markers (``/ \\ @``), isotopes and atom
classes are accepted and discarded.
"""

from __future__ import annotations

import sys

from .elements import AROMATIC_SYMBOLS, ATOMIC_NUMBER, ORGANIC_SUBSET
from .errors import (
    SmilesSyntaxError,
    UnbalancedParen,
    UnclosedRing,
    UnknownElement,
)
from .molecule import AtomSpec, BondOrder, Molecule, assemble, implied_hcount

_BOND_SYMBOLS = {"-": 1, "=": 2, "#": 3, ":": None, "/": 1, "\\": 1}
_AROMATIC_BRACKET = {"b": "B", "c": "C", "n": "N", "o": "O", "p": "P", "s": "S", "se": "Se", "as": "As"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.atoms: list[AtomSpec] = []
        self.bonds: list[tuple[int, int, int | None]] = []
        self.open_rings: dict[int, tuple[int, int | None, bool, int]] = {}

    def error(self, cls, message: str, pos: int | None = None):
        return cls(message, self.text, self.pos if pos is None else pos)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> Molecule:
        text = self.text
        if not text:
            raise SmilesSyntaxError("empty SMILES", text)
        if not text.isascii():
            raise SmilesSyntaxError("SMILES must be ASCII", text)
        prev: int | None = None
        pending_bond: int | None | str = "unset"
        branch_stack: list[int | None] = []
        while self.pos < len(text):
            ch = text[self.pos]
            if ch == "(":
                if prev is None:
                    raise self.error(SmilesSyntaxError, "branch without a preceding atom")
                if pending_bond != "unset":
                    raise self.error(SmilesSyntaxError, "bond symbol before branch")
                branch_stack.append(prev)
                self.pos += 1
            elif ch == ")":
                if not branch_stack:
                    raise self.error(UnbalancedParen, "unmatched ')'")
                if pending_bond != "unset":
                    raise self.error(SmilesSyntaxError, "dangling bond before ')'")
                if self.pos > 0 and text[self.pos - 1] == "(":
                    raise self.error(SmilesSyntaxError, "empty branch")
                prev = branch_stack.pop()
                self.pos += 1
            elif ch in _BOND_SYMBOLS:
                if prev is None or pending_bond != "unset":
                    raise self.error(SmilesSyntaxError, f"misplaced bond symbol {ch!r}")
                pending_bond = _BOND_SYMBOLS[ch]
                self.pos += 1
            elif ch == "$":
                raise self.error(SmilesSyntaxError, "quadruple bonds are not supported")
            elif ch == ".":
                if prev is None or pending_bond != "unset" or branch_stack:
                    raise self.error(SmilesSyntaxError, "misplaced '.'")
                prev = None
                self.pos += 1
            elif ch.isdigit() or ch == "%":
                if prev is None:
                    raise self.error(SmilesSyntaxError, "ring closure without a preceding atom")
                start = self.pos
                num = self.ring_number()
                bond = None if pending_bond == "unset" else pending_bond
                explicit = pending_bond != "unset"
                pending_bond = "unset"
                if num in self.open_rings:
                    other, other_bond, other_explicit, _ = self.open_rings.pop(num)
                    if other == prev:
                        raise self.error(SmilesSyntaxError, "ring closure onto the same atom", start)
                    if explicit and other_explicit and bond != other_bond:
                        raise self.error(SmilesSyntaxError, "conflicting ring-closure bond orders", start)
                    order = bond if explicit else other_bond
                    self.bonds.append((other, prev, order))
                else:
                    self.open_rings[num] = (prev, bond, explicit, start)
            else:
                idx = self.atom()
                if prev is not None:
                    order = None if pending_bond == "unset" else pending_bond
                    self.bonds.append((prev, idx, order))
                elif pending_bond != "unset":
                    raise self.error(SmilesSyntaxError, "bond without a preceding atom")
                pending_bond = "unset"
                prev = idx
        if branch_stack:
            raise UnbalancedParen("unclosed '('", text, len(text))
        if self.open_rings:
            num, (_, _, _, pos) = next(iter(self.open_rings.items()))
            raise UnclosedRing(f"ring bond {num} opened but never closed", text, pos)
        if pending_bond != "unset":
            raise SmilesSyntaxError("dangling bond at end of SMILES", text, len(text))
        # Unspecified and ':' bonds arrive as None; explicit single between aromatic atoms stays 1.
        return assemble(self.atoms, self.bonds, text)

    def ring_number(self) -> int:
        text = self.text
        if text[self.pos] == "%":
            digits = text[self.pos + 1 : self.pos + 3]
            if len(digits) != 2 or not digits.isdigit():
                raise self.error(SmilesSyntaxError, "malformed %nn ring closure")
            self.pos += 3
            return int(digits)
        self.pos += 1
        return int(text[self.pos - 1])

    def atom(self) -> int:
        text = self.text
        ch = text[self.pos]
        if ch == "[":
            return self.bracket_atom()
        two = text[self.pos : self.pos + 2]
        if two in ("Cl", "Br"):
            self.pos += 2
            return self.add(AtomSpec(two))
        if ch in ORGANIC_SUBSET:
            self.pos += 1
            return self.add(AtomSpec(ch))
        if ch in AROMATIC_SYMBOLS:
            self.pos += 1
            return self.add(AtomSpec(AROMATIC_SYMBOLS[ch], aromatic=True))
        if ch == "*" or ch.isalpha():
            raise self.error(UnknownElement, f"unsupported atom {ch!r}")
        raise self.error(SmilesSyntaxError, f"unexpected character {ch!r}")

    def add(self, spec: AtomSpec) -> int:
        self.atoms.append(spec)
        return len(self.atoms) - 1

    def bracket_atom(self) -> int:
        text = self.text
        start = self.pos
        end = text.find("]", start)
        if end == -1:
            raise self.error(SmilesSyntaxError, "unterminated bracket atom")
        body = text[start + 1 : end]
        i = 0
        while i < len(body) and body[i].isdigit():
            i += 1  # isotope, discarded
        aromatic = False
        symbol = ""
        for cand in (body[i : i + 2], body[i : i + 1]):
            if cand in _AROMATIC_BRACKET:
                symbol, aromatic = _AROMATIC_BRACKET[cand], True
                break
            if cand in ATOMIC_NUMBER and cand[:1].isupper():
                symbol = cand
                break
        if not symbol:
            if body[i : i + 1] == "*" or body[i : i + 1].isalpha():
                raise self.error(UnknownElement, f"unknown element in [{body}]", start)
            raise self.error(SmilesSyntaxError, f"missing element in [{body}]", start)
        # "[Sc]" vs "[S]": prefer the two-letter match only when it is an element.
        i += len(next(k for k, v in _AROMATIC_BRACKET.items() if v == symbol)) if aromatic else len(symbol)
        if symbol not in ORGANIC_SUBSET:
            raise self.error(UnknownElement, f"element {symbol!r} is outside the supported set", start)
        while i < len(body) and body[i] == "@":
            i += 1
        for tag in ("TH", "AL", "SP", "TB", "OH"):
            if body.startswith(tag, i) and i > 0 and body[i - 1] == "@":
                i += 2
                while i < len(body) and body[i].isdigit():
                    i += 1
        hcount = 0
        if i < len(body) and body[i] == "H":
            i += 1
            hcount = 1
            if i < len(body) and body[i].isdigit():
                hcount = int(body[i])
                i += 1
        charge = 0
        if i < len(body) and body[i] in "+-":
            sign = 1 if body[i] == "+" else -1
            sym = body[i]
            i += 1
            if i < len(body) and body[i].isdigit():
                j = i
                while j < len(body) and body[j].isdigit():
                    j += 1
                charge = sign * int(body[i:j])
                i = j
            else:
                charge = sign
                while i < len(body) and body[i] == sym:
                    charge += sign
                    i += 1
        if i < len(body) and body[i] == ":":
            i += 1
            while i < len(body) and body[i].isdigit():
                i += 1
        if i != len(body):
            raise self.error(SmilesSyntaxError, f"cannot parse bracket atom [{body}]", start)
        self.pos = end + 1
        return self.add(AtomSpec(symbol, charge, hcount, aromatic))


def parse_smiles(text: str) -> Molecule:
    """Parse a SMILES string into a validated, aromaticity-perceived molecule.

    Raises:
        SmilesError: one of its subclasses (UnclosedRing, UnbalancedParen,
            UnknownElement, ValenceError, KekulizationError, SmilesSyntaxError).
    """
    return _Parser(text).parse()


def _atom_token(mol: Molecule, idx: int) -> str:
    atom = mol.atoms[idx]
    symbol = atom.element.lower() if atom.aromatic else atom.element
    sigma = 0
    for _, b in mol.neighbors[idx]:
        bond = mol.bonds[b]
        sigma += 1 if bond.order == BondOrder.AROMATIC else bond.kekule
    if atom.charge == 0 and implied_hcount(atom.element, atom.aromatic, sigma) == atom.hcount:
        return symbol
    text = "[" + symbol
    if atom.hcount:
        text += "H" if atom.hcount == 1 else f"H{atom.hcount}"
    if atom.charge:
        sign = "+" if atom.charge > 0 else "-"
        text += sign if abs(atom.charge) == 1 else f"{sign}{abs(atom.charge)}"
    return text + "]"


def _bond_token(mol: Molecule, bond_idx: int) -> str:
    bond = mol.bonds[bond_idx]
    if bond.order == BondOrder.AROMATIC:
        return ""
    if bond.order == BondOrder.SINGLE:
        both_aromatic = mol.atoms[bond.begin].aromatic and mol.atoms[bond.end].aromatic
        return "-" if both_aromatic else ""
    return {BondOrder.DOUBLE: "=", BondOrder.TRIPLE: "#"}[bond.order]


def write_smiles(mol: Molecule) -> str:
    """Serialize a molecule; the output reparses to an isomorphic graph.

    Traversal is depth-first from the lowest-index atom of each fragment,
    visiting neighbours in index order, so output depends only on atom
    numbering.
    """
    n = len(mol.atoms)
    visited = [False] * n
    order: list[int] = []
    children: dict[int, list[tuple[int, int]]] = {i: [] for i in range(n)}
    closures: dict[int, list[tuple[int, int, bool]]] = {i: [] for i in range(n)}
    used_bonds: set[int] = set()
    roots: list[int] = []

    def dfs(u: int) -> None:
        visited[u] = True
        order.append(u)
        for v, b in mol.neighbors[u]:
            if b in used_bonds:
                continue
            if visited[v]:
                used_bonds.add(b)
                closures[v].append((u, b, True))
                closures[u].append((v, b, False))
            else:
                used_bonds.add(b)
                children[u].append((v, b))
                dfs(v)

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * n + 100))
    try:
        for start in range(n):
            if not visited[start]:
                roots.append(start)
                dfs(start)
    finally:
        sys.setrecursionlimit(limit)

    # Ring digits are assigned in emission order, reusing the lowest free digit.
    digit_of_bond: dict[int, int] = {}
    free: list[int] = []
    next_digit = [1]
    out: list[str] = []

    def ring_label(d: int) -> str:
        return str(d) if d < 10 else f"%{d:02d}"

    def take_digit() -> int:
        if free:
            free.sort()
            return free.pop(0)
        d = next_digit[0]
        next_digit[0] += 1
        return d

    def emit(u: int) -> None:
        out.append(_atom_token(mol, u))
        for partner, b, opening in sorted(closures[u], key=lambda t: (t[2], t[0])):
            if b in digit_of_bond:
                d = digit_of_bond.pop(b)
                out.append(ring_label(d))
                free.append(d)
            else:
                d = take_digit()
                digit_of_bond[b] = d
                out.append(_bond_token(mol, b) + ring_label(d))
        kids = children[u]
        for i, (v, b) in enumerate(kids):
            last = i == len(kids) - 1
            if not last:
                out.append("(")
            out.append(_bond_token(mol, b))
            emit(v)
            if not last:
                out.append(")")

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * n + 100))
    try:
        for k, root in enumerate(roots):
            if k:
                out.append(".")
            emit(root)
    finally:
        sys.setrecursionlimit(limit)
    return "".join(out)
