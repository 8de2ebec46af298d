"""Synthetic embeddings with planted, ledgered signal directions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..numkit import make_rng


class SpecInvalid(ValueError):
    pass


DEFAULT_DESCRIPTOR_GAINS = (
    ("drug_likeness", 4.0),
    ("complexity", 8.0),
    ("lipophilicity", 8.0),
    ("size", 8.0),
    ("polarity", 8.0),
    ("flexibility", 8.0),
)
MOTIF_GAIN = 8.0
DEFAULT_MOTIFS = (
    "halogen_F",
    "halogen_Cl",
    "nitrile",
    "aromatic_N",
    "ether",
    "amide",
    "carboxylic_acid",
    "thiophene",
)


@dataclass(frozen=True)
class PlantedSignal:
    name: str
    source: str  # "descriptor" or "motif"
    gain: float


@dataclass(frozen=True)
class PlantedSpec:
    d: int = 256
    signals: tuple[PlantedSignal, ...] = field(
        default_factory=lambda: tuple(PlantedSignal(n, "descriptor", g) for n, g in DEFAULT_DESCRIPTOR_GAINS)
        + tuple(PlantedSignal(n, "motif", MOTIF_GAIN) for n in DEFAULT_MOTIFS)
    )
    sigma: float = 0.5
    nonlinear: bool = False
    seed: int = 0
    carriers: np.ndarray | None = None  # optional (n_signals, d) override

    def validate(self) -> None:
        if self.d < 1:
            raise SpecInvalid("embedding dimension must be positive")
        if self.sigma < 0:
            raise SpecInvalid("noise std must be non-negative")
        names = [s.name for s in self.signals]
        if len(set(names)) != len(names):
            raise SpecInvalid("planted signal names must be unique")
        for s in self.signals:
            if s.gain < 0:
                raise SpecInvalid(f"gain of {s.name} is negative")
            if s.source not in ("descriptor", "motif"):
                raise SpecInvalid(f"unknown signal source {s.source!r}")
        if len(self.signals) > self.d:
            raise SpecInvalid("more planted signals than embedding dimensions")


def carrier_matrix(spec: PlantedSpec) -> np.ndarray:
    """Unit carrier directions, one row per signal (orthonormal unless overridden)."""
    n = len(spec.signals)
    if spec.carriers is not None:
        c = np.asarray(spec.carriers, dtype=np.float64)
        if c.shape != (n, spec.d):
            raise SpecInvalid(f"carriers must have shape ({n}, {spec.d})")
        if n and np.linalg.matrix_rank(c) < n:
            raise SpecInvalid("carrier directions are linearly dependent")
        return c
    g = make_rng(spec.seed, "harness", "carriers").standard_normal((spec.d, n))
    q, r = np.linalg.qr(g)
    # fix QR sign ambiguity so carriers are a deterministic function of the seed
    q = q * np.where(np.diag(r) < 0, -1.0, 1.0)
    return q.T.copy()


def standardize(x: np.ndarray) -> tuple[np.ndarray, float, float]:
    mu = float(x.mean())
    sd = float(x.std())
    if sd == 0.0:
        return np.zeros_like(x), mu, 0.0
    return (x - mu) / sd, mu, sd


def generate_embeddings(
    sources: dict[str, np.ndarray], spec: PlantedSpec = PlantedSpec()
) -> tuple[np.ndarray, dict]:
    """Embedding matrix ``H`` (N x d) and a JSON-ready ledger.

    ``H = sum_s gain_s * standardized(signal_s) carrier_s^T [+ mix] + N(0, sigma^2)``.
    The optional mix adds ``0.5 * tanh(H_lin @ Q)`` for a fixed random
    orthogonal ``Q``; noise is added last.
    """
    spec.validate()
    n_rows = None
    cols = []
    ledger_signals = []
    carriers = carrier_matrix(spec)
    for i, s in enumerate(spec.signals):
        if s.name not in sources:
            raise SpecInvalid(f"no source values for planted signal {s.name!r}")
        v = np.asarray(sources[s.name], dtype=np.float64).ravel()
        if n_rows is None:
            n_rows = v.size
        elif v.size != n_rows:
            raise SpecInvalid("planted sources differ in length")
        z, mu, sd = standardize(v)
        cols.append(z * s.gain)
        ledger_signals.append(
            {
                "name": s.name,
                "source": s.source,
                "gain": s.gain,
                "carrier_index": i,
                "source_mean": mu,
                "source_std": sd,
                "constant_source": sd == 0.0,
                "carrier": [float(c) for c in carriers[i]],
            }
        )
    if n_rows is None:
        raise SpecInvalid("at least one planted signal is required")
    S = np.stack(cols, axis=1)
    H = S @ carriers
    if spec.nonlinear:
        q, _ = np.linalg.qr(make_rng(spec.seed, "harness", "mix").standard_normal((spec.d, spec.d)))
        H = H + 0.5 * np.tanh(H @ q)
    if spec.sigma > 0:
        H = H + spec.sigma * make_rng(spec.seed, "harness", "noise").standard_normal(H.shape)
    ledger = {
        "d": spec.d,
        "n": int(n_rows),
        "sigma": spec.sigma,
        "nonlinear": spec.nonlinear,
        "seed": spec.seed,
        "signals": ledger_signals,
    }
    return H, ledger


def planted_sources(
    rewards: np.ndarray, reward_names: Sequence[str], labels: np.ndarray, motif_names: Sequence[str]
) -> dict[str, np.ndarray]:
    """Name -> column mapping over descriptor signals and motif labels."""
    out = {n: rewards[:, j] for j, n in enumerate(reward_names)}
    out.update({n: labels[:, j].astype(np.float64) for j, n in enumerate(motif_names)})
    return out
