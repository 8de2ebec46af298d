"""Loaders for the packaged contribution tables."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..smarts.pattern import Pattern, compile_pattern


def _rows(name: str) -> list[list[str]]:
    text = resources.files("molinterp.descriptors").joinpath(f"data/{name}").read_text("utf-8")
    return [line.split("\t") for line in text.splitlines() if line.strip() and not line.startswith("#")]


@dataclass(frozen=True)
class TpsaRow:
    group: str
    element: str
    # nbrs, h, charge, single, double, triple, arom, ring3; None = wildcard
    keys: tuple[int | None, ...]
    value: float

    def matches(self, values: tuple[int, ...]) -> bool:
        return all(k is None or k == v for k, v in zip(self.keys, values))


@lru_cache(maxsize=None)
def tpsa_table() -> tuple[TpsaRow, ...]:
    out = []
    for row in _rows("tpsa.tsv"):
        keys = tuple(None if c == "*" else int(c) for c in row[2:10])
        out.append(TpsaRow(row[0], row[1], keys, float(row[10])))
    return tuple(out)


@dataclass(frozen=True)
class CrippenType:
    label: str
    pattern: Pattern
    logp: float
    mr: float


@lru_cache(maxsize=None)
def crippen_table() -> tuple[CrippenType, ...]:
    out = []
    for row in _rows("crippen.tsv"):
        label, smarts, logp = row[0], row[1], float(row[2])
        mr = float(row[3]) if len(row) > 3 and row[3].strip() else 0.0
        out.append(CrippenType(label, compile_pattern(smarts), logp, mr))
    return tuple(out)


@dataclass(frozen=True)
class AdsParameter:
    A: float
    B: float
    C: float
    D: float
    E: float
    F: float
    DMAX: float


@lru_cache(maxsize=None)
def qed_parameters() -> tuple[tuple[str, AdsParameter, float, float], ...]:
    """(property, ADS parameters, mean weight, max weight) in canonical order."""
    out = []
    for row in _rows("qed_ads.tsv"):
        vals = [float(x) for x in row[1:]]
        out.append((row[0], AdsParameter(*vals[:7]), vals[7], vals[8]))
    return tuple(out)
