"""Structural edit rules and their application to molecules."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..chem.elements import SUPPORTED
from ..chem.molecule import AtomSpec, Molecule, assemble
from ..smarts.matcher import iter_mappings
from ..smarts.pattern import Pattern, compile_pattern


class RuleNotApplicable(ValueError):
    pass


class RewiringImpossible(ValueError):
    pass


@dataclass(frozen=True)
class RewriteOp:
    kind: str  # "element" or "max_degree"
    query_atom: int
    value: str | int


@dataclass(frozen=True)
class TransformationRule:
    name: str
    pattern: Pattern
    ops: tuple[RewriteOp, ...]
    extension: bool = False

    @property
    def smarts(self) -> str:
        return self.pattern.source_text


def parse_ops(text: str) -> tuple[RewriteOp, ...]:
    ops = []
    for chunk in text.split(";"):
        parts = chunk.split()
        if not parts:
            continue
        if len(parts) != 3 or parts[0] not in ("element", "max_degree"):
            raise ValueError(f"bad rewrite op {chunk.strip()!r}")
        kind, q, v = parts[0], int(parts[1]), parts[2]
        if kind == "element":
            if v not in SUPPORTED:
                raise ValueError(f"unsupported element {v!r} in rewrite")
            ops.append(RewriteOp(kind, q, v))
        else:
            ops.append(RewriteOp(kind, q, int(v)))
    if not any(op.kind == "element" for op in ops):
        raise ValueError("a rule needs at least one element op")
    return tuple(ops)


def make_rule(name: str, smarts: str, ops: str, extension: bool = False) -> TransformationRule:
    pattern = compile_pattern(smarts)
    parsed = parse_ops(ops)
    for op in parsed:
        if not 0 <= op.query_atom < len(pattern.query_atoms):
            raise ValueError(f"rule {name}: op refers to query atom {op.query_atom}")
    return TransformationRule(name, pattern, parsed, extension)


def parse_rules_text(text: str) -> tuple[TransformationRule, ...]:
    rules = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = line.rstrip("\r").split("\t")
        if len(cols) not in (3, 4):
            raise ValueError(f"rules line {line_no}: expected 3 or 4 tab-separated columns")
        ext = len(cols) == 4 and cols[3].strip().lower() in ("yes", "true", "1")
        rules.append(make_rule(cols[0].strip(), cols[1].strip(), cols[2], ext))
    names = [r.name for r in rules]
    if len(set(names)) != len(names):
        raise ValueError("rule names must be unique")
    return tuple(rules)


def load_rules(path: str | Path | None = None) -> tuple[TransformationRule, ...]:
    """Rules file; ``None`` loads the shipped default set."""
    if path is None:
        text = resources.files("molinterp.attribution").joinpath("data/rules.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_rules_text(text)


def rule_sites(rule: TransformationRule, mol: Molecule) -> list[tuple[int, ...]]:
    """Distinct sites (one mapping per matched atom set), in atom-set order."""
    best: dict[tuple[int, ...], tuple[int, ...]] = {}
    for m in iter_mappings(rule.pattern, mol):
        key = tuple(sorted(m))
        if key not in best or m < best[key]:
            best[key] = m
    return [best[k] for k in sorted(best)]


def _is_mapping(rule: TransformationRule, mol: Molecule, site: tuple[int, ...]) -> bool:
    if len(site) != len(rule.pattern.query_atoms):
        return False
    return any(m == tuple(site) for m in iter_mappings(rule.pattern, mol, anchor_atom=site[0]))


def apply_rule(mol: Molecule, rule: TransformationRule, site: tuple[int, ...]) -> Molecule:
    """Rewrite ``mol`` at ``site`` (a mapping of the rule's query atoms).

    Element swaps keep the bond graph and atom numbering; hydrogens of the
    edited atoms are re-derived and aromaticity is perceived afresh. Raises
    ChemError subclasses if the product is not a valid molecule.
    """
    site = tuple(int(a) for a in site)
    if not _is_mapping(rule, mol, site):
        raise RuleNotApplicable(f"{rule.name}: {site} is not a match of {rule.smarts}")
    for op in rule.ops:
        if op.kind == "max_degree" and mol.degree(site[op.query_atom]) > int(op.value):
            raise RewiringImpossible(
                f"{rule.name}: atom {site[op.query_atom]} has {mol.degree(site[op.query_atom])} heavy "
                f"neighbours, the rewrite allows {op.value}"
            )
    atoms, bonds = mol.specs()
    for op in rule.ops:
        if op.kind == "element":
            a = site[op.query_atom]
            atoms[a] = AtomSpec(str(op.value), 0, None, False)
    return assemble(atoms, bonds, mol.source_text)
