"""Descriptor records, the six-signal reward matrix and descriptor CSV files."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..chem.molecule import Molecule
from ..smarts.library import EmptyCorpus
from ..smarts.pattern import Pattern
from .physchem import complexity, crippen_logp, lipinski_hba, lipinski_hbd, molecular_weight, rotatable_bonds, tpsa
from .qed import QedInputs, qed, qed_inputs

SIGNALS = ("drug_likeness", "complexity", "lipophilicity", "size", "polarity", "flexibility")
CSV_HEADER = ("name", "smiles") + SIGNALS


@dataclass(frozen=True)
class DescriptorRecord:
    """The six reward signals plus the inputs QED was computed from.

    ``hbd``/``hba`` follow the Lipinski convention (H on N/O; N+O atoms);
    ``qed_inputs`` holds the acceptor/donor counts of the QED definition.
    """

    drug_likeness: float
    complexity: float
    lipophilicity: float
    size: float
    polarity: float
    flexibility: int
    hbd: int
    hba: int
    qed_inputs: QedInputs

    def signals(self) -> tuple[float, ...]:
        return tuple(float(getattr(self, s)) for s in SIGNALS)


def compute_descriptors(
    mol: Molecule,
    weights: str | Sequence[float] = "mean",
    alerts: Sequence[Pattern] = (),
    tpsa_sp: bool = False,
) -> DescriptorRecord:
    inputs = qed_inputs(mol, alerts)
    return DescriptorRecord(
        drug_likeness=qed(inputs, weights),
        complexity=complexity(mol),
        lipophilicity=inputs.alogp,
        size=molecular_weight(mol),
        polarity=tpsa(mol, include_sp=True) if tpsa_sp else inputs.psa,
        flexibility=inputs.rotb,
        hbd=lipinski_hbd(mol),
        hba=lipinski_hba(mol),
        qed_inputs=inputs,
    )


@dataclass(frozen=True)
class RewardMatrix:
    values: np.ndarray  # (N, 6), columns in SIGNALS order
    mean: np.ndarray
    std: np.ndarray
    names: tuple[str, ...] = SIGNALS


def _matrix(rows: np.ndarray) -> RewardMatrix:
    if rows.shape[0] == 0:
        raise EmptyCorpus("reward matrix needs at least one molecule")
    return RewardMatrix(rows, rows.mean(axis=0), rows.std(axis=0))


def reward_matrix(corpus: Sequence[Molecule], **kwargs) -> RewardMatrix:
    if not corpus:
        raise EmptyCorpus("reward matrix needs at least one molecule")
    rows = np.array([compute_descriptors(m, **kwargs).signals() for m in corpus], dtype=np.float64)
    return _matrix(rows)


def records_to_matrix(records: Sequence[DescriptorRecord]) -> RewardMatrix:
    return _matrix(np.array([r.signals() for r in records], dtype=np.float64).reshape(len(records), len(SIGNALS)))


def write_descriptor_csv(
    path: str | Path, names: Sequence[str], smiles: Sequence[str], values: np.ndarray, comment: str = ""
) -> None:
    """Write the descriptor table; ``comment`` becomes a leading ``# `` line."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for name, smi, row in zip(names, smiles, values):
            w.writerow([name, smi] + [repr(float(v)) for v in row])


def read_descriptor_csv(path: str | Path) -> tuple[list[str], list[str], np.ndarray]:
    """Read a precomputed descriptor table (same header as the writer)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise ValueError(f"descriptor CSV header must be {','.join(CSV_HEADER)}")
        names, smiles, rows = [], [], []
        for row in reader:
            if not row:
                continue
            names.append(row[0])
            smiles.append(row[1])
            rows.append([float(x) for x in row[2:]])
    return names, smiles, np.array(rows, dtype=np.float64).reshape(len(rows), len(SIGNALS))
