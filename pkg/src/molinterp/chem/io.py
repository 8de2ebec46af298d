"""Reading SMILES record files."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator


@dataclass(frozen=True)
class SmilesRecord:
    line_no: int
    smiles: str
    name: str


def iter_smiles_file(path: str | Path) -> Iterator[SmilesRecord]:
    """Yield one record per non-blank, non-comment line.

    Lines hold a SMILES optionally followed by a tab and a name; lines that
    start with ``#`` are skipped. LF and CRLF endings are both accepted.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            smiles, _, name = line.partition("\t")
            smiles = smiles.strip()
            yield SmilesRecord(line_no, smiles, name.strip() or f"mol_{line_no}")


def write_smiles_file(path: str | Path, records: list[tuple[str, str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for smiles, name in records:
            fh.write(f"{smiles}\t{name}\n")
