"""SMARTS subset compiler.

Atom primitives: element symbols (upper case = aliphatic, lower case =
aromatic), ``#n``, ``*``, ``a``, ``A``, ``D<n>``, ``H<n>``, ``X<n>``,
``R``/``R<n>``, ``r<n>``, ``v<n>`` and charges ``+``/``-``/``+n``/``-n``.
Operators, by decreasing precedence: ``!``, ``&`` (or juxtaposition), ``,``,
``;``. Bond primitives: ``- = # : ~ @`` with the same operators; an omitted
bond means single-or-aromatic. Recursive SMARTS, chirality, isotopes and
disconnected queries are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from ..chem.elements import ATOMIC_NUMBER
from ..chem.molecule import BondOrder, Molecule


class SmartsError(ValueError):
    def __init__(self, message: str, text: str = "", position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position} in {text!r})"
        super().__init__(message)


class UnsupportedPrimitive(SmartsError):
    pass


class ParseError(SmartsError):
    pass


# ---------------------------------------------------------------- predicates


@dataclass(frozen=True)
class Prim:
    kind: str
    value: object = None


@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class And:
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Or:
    args: tuple["Expr", ...]


Expr = Union[Prim, Not, And, Or]


def _atom_prim(p: Prim, mol: Molecule, i: int) -> bool:
    atom = mol.atoms[i]
    kind = p.kind
    if kind == "any":
        return True
    if kind == "element":
        z, aromatic = p.value
        if ATOMIC_NUMBER[atom.element] != z:
            return False
        return aromatic is None or atom.aromatic == aromatic
    if kind == "aromatic":
        return atom.aromatic
    if kind == "aliphatic":
        return not atom.aromatic
    if kind == "charge":
        return atom.charge == p.value
    if kind == "D":
        return mol.degree(i) == p.value
    if kind == "H":
        return atom.hcount == p.value
    if kind == "X":
        return mol.degree(i) + atom.hcount == p.value
    if kind == "R":
        if p.value is None:
            return mol.ring_count[i] > 0
        return mol.ring_count[i] == p.value
    if kind == "r":
        sizes = [len(r) for r in mol.rings if i in r]
        if p.value is None:
            return bool(sizes)
        return bool(sizes) and min(sizes) == p.value
    if kind == "v":
        return mol.total_valence(i) == p.value
    raise AssertionError(kind)


def _bond_prim(p: Prim, mol: Molecule, b: int) -> bool:
    bond = mol.bonds[b]
    kind = p.kind
    if kind == "any":
        return True
    if kind == "ring":
        return b in mol.ring_bonds
    if kind == "default":
        return bond.order in (BondOrder.SINGLE, BondOrder.AROMATIC)
    if kind == "order":
        return bond.order == p.value
    raise AssertionError(kind)


def evaluate(expr: Expr, prim_fn: Callable[[Prim, Molecule, int], bool], mol: Molecule, idx: int) -> bool:
    if isinstance(expr, Prim):
        return prim_fn(expr, mol, idx)
    if isinstance(expr, Not):
        return not evaluate(expr.arg, prim_fn, mol, idx)
    if isinstance(expr, And):
        return all(evaluate(a, prim_fn, mol, idx) for a in expr.args)
    return any(evaluate(a, prim_fn, mol, idx) for a in expr.args)


def atom_matches(expr: Expr, mol: Molecule, i: int) -> bool:
    return evaluate(expr, _atom_prim, mol, i)


def bond_matches(expr: Expr, mol: Molecule, b: int) -> bool:
    return evaluate(expr, _bond_prim, mol, b)


# ---------------------------------------------------------------- pattern


@dataclass(frozen=True)
class Pattern:
    """Compiled query graph; immutable and safe to share across threads."""

    source_text: str
    query_atoms: tuple[Expr, ...]
    query_bonds: tuple[tuple[int, int, Expr], ...]

    def __len__(self) -> int:
        return len(self.query_atoms)

    def neighbors(self, q: int) -> list[tuple[int, Expr]]:
        out = []
        for a, b, e in self.query_bonds:
            if a == q:
                out.append((b, e))
            elif b == q:
                out.append((a, e))
        return out


_ORGANIC = {"B": 5, "C": 6, "N": 7, "O": 8, "P": 15, "S": 16, "F": 9, "Cl": 17, "Br": 35, "I": 53}
_AROMATIC = {"b": 5, "c": 6, "n": 7, "o": 8, "p": 15, "s": 16}
_AROMATIC_BRACKET = {**_AROMATIC, "se": 34, "as": 33}


class _ExprParser:
    """Recursive-descent parser for one bracket body or a bond expression."""

    def __init__(self, body: str, text: str, offset: int, bond: bool):
        self.s = body
        self.i = 0
        self.text = text
        self.offset = offset
        self.bond = bond

    def fail(self, cls, msg: str):
        raise cls(msg, self.text, self.offset + self.i)

    def parse(self) -> Expr:
        if not self.s:
            self.fail(ParseError, "empty expression")
        expr = self.low()
        if self.i != len(self.s):
            self.fail(ParseError, f"unexpected {self.s[self.i]!r}")
        return expr

    def low(self) -> Expr:
        args = [self.orr()]
        while self.i < len(self.s) and self.s[self.i] == ";":
            self.i += 1
            args.append(self.orr())
        return args[0] if len(args) == 1 else And(tuple(args))

    def orr(self) -> Expr:
        args = [self.high()]
        while self.i < len(self.s) and self.s[self.i] == ",":
            self.i += 1
            args.append(self.high())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def high(self) -> Expr:
        args = [self.unary()]
        while self.i < len(self.s) and self.s[self.i] not in ";,":
            if self.s[self.i] == "&":
                self.i += 1
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self) -> Expr:
        if self.i < len(self.s) and self.s[self.i] == "!":
            self.i += 1
            return Not(self.unary())
        return self.bond_primitive() if self.bond else self.atom_primitive()

    def number(self, default: int | None) -> int | None:
        j = self.i
        while j < len(self.s) and self.s[j].isdigit():
            j += 1
        if j == self.i:
            return default
        value = int(self.s[self.i : j])
        self.i = j
        return value

    def bond_primitive(self) -> Expr:
        if self.i >= len(self.s):
            self.fail(ParseError, "missing bond primitive")
        ch = self.s[self.i]
        self.i += 1
        table = {
            "-": Prim("order", BondOrder.SINGLE),
            "/": Prim("order", BondOrder.SINGLE),
            "\\": Prim("order", BondOrder.SINGLE),
            "=": Prim("order", BondOrder.DOUBLE),
            "#": Prim("order", BondOrder.TRIPLE),
            ":": Prim("order", BondOrder.AROMATIC),
            "~": Prim("any"),
            "@": Prim("ring"),
        }
        if ch not in table:
            self.i -= 1
            self.fail(ParseError, f"unknown bond primitive {ch!r}")
        return table[ch]

    def atom_primitive(self) -> Expr:
        s = self.s
        if self.i >= len(s):
            self.fail(ParseError, "missing atom primitive")
        ch = s[self.i]
        if ch == "$":
            self.fail(UnsupportedPrimitive, "recursive SMARTS is not supported")
        if ch == "@":
            self.fail(UnsupportedPrimitive, "chirality is not supported")
        if ch.isdigit():
            self.fail(UnsupportedPrimitive, "isotope primitives are not supported")
        if ch == "#":
            self.i += 1
            z = self.number(None)
            if z is None:
                self.fail(ParseError, "'#' needs an atomic number")
            return Prim("element", (z, None))
        if ch in "+-":
            sign = 1 if ch == "+" else -1
            self.i += 1
            n = self.number(None)
            if n is None:
                n = 1
                while self.i < len(s) and s[self.i] == ch:
                    n += 1
                    self.i += 1
            return Prim("charge", sign * n)
        if ch == "*":
            self.i += 1
            return Prim("any")
        two = s[self.i : self.i + 2]
        if len(two) == 2 and two in _AROMATIC_BRACKET:
            self.i += 2
            return Prim("element", (_AROMATIC_BRACKET[two], True))
        if ch in "DHXv":
            self.i += 1
            return Prim(ch, self.number(1))
        if ch == "R":
            self.i += 1
            return Prim("R", self.number(None))
        if ch == "r":
            self.i += 1
            return Prim("r", self.number(None))
        if ch == "a":
            self.i += 1
            return Prim("aromatic")
        if ch == "A":
            self.i += 1
            return Prim("aliphatic")
        if ch in _AROMATIC:
            self.i += 1
            return Prim("element", (_AROMATIC[ch], True))
        if ch.isupper():
            if two in ATOMIC_NUMBER and two[1:].islower():
                self.i += 2
                return Prim("element", (ATOMIC_NUMBER[two], False))
            if ch in ATOMIC_NUMBER:
                self.i += 1
                return Prim("element", (ATOMIC_NUMBER[ch], False))
        self.fail(ParseError, f"unknown atom primitive {ch!r}")
        raise AssertionError


def compile_pattern(text: str) -> Pattern:
    """Compile a SMARTS string from the supported subset into a :class:`Pattern`."""
    if not text:
        raise ParseError("empty SMARTS")
    if "$(" in text:
        raise UnsupportedPrimitive("recursive SMARTS is not supported", text, text.index("$("))
    atoms: list[Expr] = []
    bonds: list[tuple[int, int, Expr]] = []
    pos = 0
    prev: int | None = None
    pending: Expr | None = None
    stack: list[int] = []
    rings: dict[int, tuple[int, Expr | None]] = {}
    bond_chars = set("-=#:~@!&,;/\\")

    def add_bond(a: int, b: int, expr: Expr | None) -> None:
        key = (min(a, b), max(a, b))
        if any((min(x, y), max(x, y)) == key for x, y, _ in bonds):
            raise ParseError("duplicate query bond", text, pos)
        bonds.append((a, b, expr if expr is not None else Prim("default")))

    while pos < len(text):
        ch = text[pos]
        if ch == "(":
            if prev is None:
                raise ParseError("branch without atom", text, pos)
            stack.append(prev)
            pos += 1
        elif ch == ")":
            if not stack:
                raise ParseError("unmatched ')'", text, pos)
            prev = stack.pop()
            pos += 1
        elif ch == ".":
            raise UnsupportedPrimitive("disconnected queries are not supported", text, pos)
        elif ch in bond_chars:
            start = pos
            while pos < len(text) and text[pos] in bond_chars:
                pos += 1
            if prev is None or pending is not None:
                raise ParseError("misplaced bond", text, start)
            pending = _ExprParser(text[start:pos], text, start, bond=True).parse()
        elif ch.isdigit() or ch == "%":
            if prev is None:
                raise ParseError("ring closure without atom", text, pos)
            if ch == "%":
                digits = text[pos + 1 : pos + 3]
                if len(digits) != 2 or not digits.isdigit():
                    raise ParseError("malformed %nn", text, pos)
                num = int(digits)
                pos += 3
            else:
                num = int(ch)
                pos += 1
            if num in rings:
                other, expr = rings.pop(num)
                add_bond(other, prev, pending if pending is not None else expr)
            else:
                rings[num] = (prev, pending)
            pending = None
        else:
            if ch == "[":
                end = text.find("]", pos)
                if end == -1:
                    raise ParseError("unterminated bracket", text, pos)
                expr = _ExprParser(text[pos + 1 : end], text, pos + 1, bond=False).parse()
                pos = end + 1
            else:
                two = text[pos : pos + 2]
                if two in ("Cl", "Br"):
                    expr = Prim("element", (_ORGANIC[two], False))
                    pos += 2
                elif ch in _ORGANIC:
                    expr = Prim("element", (_ORGANIC[ch], False))
                    pos += 1
                elif ch in _AROMATIC:
                    expr = Prim("element", (_AROMATIC[ch], True))
                    pos += 1
                elif ch == "*":
                    expr, pos = Prim("any"), pos + 1
                elif ch == "a":
                    expr, pos = Prim("aromatic"), pos + 1
                elif ch == "A":
                    expr, pos = Prim("aliphatic"), pos + 1
                elif ch == "$":
                    raise UnsupportedPrimitive("recursive SMARTS is not supported", text, pos)
                else:
                    raise ParseError(f"unexpected character {ch!r}", text, pos)
            atoms.append(expr)
            idx = len(atoms) - 1
            if prev is not None:
                add_bond(prev, idx, pending)
            elif pending is not None:
                raise ParseError("bond without atom", text, pos)
            pending = None
            prev = idx
    if stack:
        raise ParseError("unclosed '('", text, len(text))
    if rings:
        raise ParseError(f"unclosed ring bond {next(iter(rings))}", text, len(text))
    if pending is not None:
        raise ParseError("dangling bond", text, len(text))
    if not atoms:
        raise ParseError("no atoms in SMARTS", text)
    return Pattern(text, tuple(atoms), tuple(bonds))
