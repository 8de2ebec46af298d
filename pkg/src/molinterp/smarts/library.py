"""Motif libraries and binary motif labels."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from ..chem.molecule import Molecule
from .matcher import has_match
from .pattern import Pattern, compile_pattern


class EmptyCorpus(ValueError):
    pass


@dataclass(frozen=True)
class MotifLibrary:
    """Ordered (name, pattern) entries."""

    names: tuple[str, ...]
    patterns: tuple[Pattern, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("motif names must be unique")
        if len(self.names) != len(self.patterns):
            raise ValueError("names and patterns differ in length")

    def __len__(self) -> int:
        return len(self.names)

    def __getitem__(self, key: int | str) -> Pattern:
        if isinstance(key, str):
            key = self.names.index(key)
        return self.patterns[key]

    def index(self, name: str) -> int:
        return self.names.index(name)

    def subset(self, names: Sequence[str]) -> "MotifLibrary":
        return MotifLibrary(tuple(names), tuple(self[n] for n in names))

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[str, str]]) -> "MotifLibrary":
        return cls(tuple(n for n, _ in pairs), tuple(compile_pattern(s) for _, s in pairs))

    def to_text(self) -> str:
        return "".join(f"{n}\t{p.source_text}\n" for n, p in zip(self.names, self.patterns))


def parse_library_text(text: str) -> MotifLibrary:
    pairs = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"motif library line {line_no}: expected 'name<TAB>SMARTS'")
        pairs.append((parts[0].strip(), parts[1].strip()))
    return MotifLibrary.from_pairs(pairs)


def load_library(path: str | Path | None = None) -> MotifLibrary:
    """Load a motif library file; ``None`` loads the shipped 40-motif default."""
    if path is None:
        text = resources.files("molinterp.smarts").joinpath("data/motifs.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_library_text(text)


def motif_labels(mol: Molecule, lib: MotifLibrary) -> np.ndarray:
    """Binary presence vector, one entry per library motif."""
    return np.array([1 if has_match(p, mol) else 0 for p in lib.patterns], dtype=np.int8)


def label_matrix(corpus: Sequence[Molecule], lib: MotifLibrary) -> np.ndarray:
    return np.array([motif_labels(m, lib) for m in corpus], dtype=np.int8).reshape(len(corpus), len(lib))


def motif_prevalence(corpus: Sequence[Molecule], lib: MotifLibrary) -> np.ndarray:
    """Fraction of corpus molecules containing each motif."""
    if not corpus:
        raise EmptyCorpus("motif prevalence needs at least one molecule")
    return label_matrix(corpus, lib).mean(axis=0)
