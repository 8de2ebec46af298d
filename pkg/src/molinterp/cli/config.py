"""Run configuration: typed sections loaded from an INI-style file.

Precedence, lowest to highest: built-in defaults, the ``--config`` file,
``--set section.key=value`` overrides, then dedicated flags such as
``--seed`` or ``--out``.

The config hash covers every section except ``[paths]``; input files
enter the hash through a digest of their bytes instead of their location,
so moving a corpus does not change the hash while editing it does.
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PathsSection:
    corpus: str = ""  # SMILES file; empty means generate the harness corpus
    embeddings: str = ""  # embedding file; empty means plant signals
    library: str = ""  # motif library TSV; empty means the bundled one
    rules: str = ""  # transformation rules TSV; empty means bundled
    alerts: str = ""  # structural alert SMARTS list; empty means none
    surrogate: str = ""  # surrogate checkpoint; empty means train one
    sae: str = ""  # SAE checkpoint for sae-analyze
    output: str = "out"


@dataclass(frozen=True)
class RunSection:
    seed: int = 0
    n_molecules: int = 2000
    test_fraction: float = 0.1
    threads: int = 1


@dataclass(frozen=True)
class HarnessSection:
    d: int = 256
    sigma: float = 0.5
    nonlinear: bool = False
    descriptor_gain: float = 8.0
    drug_likeness_gain: float = 4.0
    motif_gain: float = 8.0


@dataclass(frozen=True)
class SaeSection:
    k: int = 128
    l1: float = 0.01
    epochs: int = 200
    batch_size: int = 128
    lr: float = 1e-3
    dropout: float = 0.1
    kl_weight: float = 0.0
    target_sparsity: float = 0.05
    unit_decoder: bool = True
    threshold: float = 0.1
    top_pairs: int = 20


@dataclass(frozen=True)
class PredictorSection:
    kind: str = "mlp"
    hidden: str = "64"
    epochs: int = 100
    batch_size: int = 128
    lr: float = 1e-3
    dropout: float = 0.2


@dataclass(frozen=True)
class ProbeSection:
    epochs: int = 50
    batch_size: int = 128
    lr: float = 1e-3
    dropout: float = 0.2
    motifs: str = "all"  # "all", "planted", or a comma-separated list


@dataclass(frozen=True)
class SaliencySection:
    steps: int = 64
    baseline: str = "zero"
    percentile: float = 75.0
    k: int = 3
    ring_boost: float = 1.1
    sample: int = 5
    qed_weights: str = "mean"
    surrogate_epochs: int = 150
    surrogate_lr: float = 3e-3


@dataclass(frozen=True)
class RunConfig:
    paths: PathsSection = field(default_factory=PathsSection)
    run: RunSection = field(default_factory=RunSection)
    harness: HarnessSection = field(default_factory=HarnessSection)
    sae: SaeSection = field(default_factory=SaeSection)
    predictor: PredictorSection = field(default_factory=PredictorSection)
    probe: ProbeSection = field(default_factory=ProbeSection)
    saliency: SaliencySection = field(default_factory=SaliencySection)

    def to_dict(self) -> dict:
        return asdict(self)

    def with_value(self, section: str, key: str, raw: str) -> "RunConfig":
        sec = getattr(self, section, None)
        if sec is None or section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        types = {f.name: f.type for f in fields(sec)}
        if key not in types:
            raise ConfigError(f"unknown key {key!r} in [{section}]")
        value = _coerce(raw, type(getattr(sec, key)), f"{section}.{key}")
        return replace(self, **{section: replace(sec, **{key: value})})

    def input_files(self) -> list[str]:
        p = self.paths
        return [x for x in (p.corpus, p.embeddings, p.library, p.rules, p.alerts, p.surrogate, p.sae) if x]

    def validate(self) -> None:
        for path in self.input_files():
            if not Path(path).is_file():
                raise ConfigError(f"input file not found: {path}")
        if not 0.0 < self.run.test_fraction < 1.0:
            raise ConfigError("run.test_fraction must lie in (0, 1)")
        if self.run.threads < 1:
            raise ConfigError("run.threads must be at least 1")
        if self.saliency.baseline not in ("zero", "mean"):
            raise ConfigError("saliency.baseline must be 'zero' or 'mean'")

    def config_hash(self) -> str:
        body = self.to_dict()
        body.pop("paths")
        digests = {}
        for key in ("corpus", "embeddings", "library", "rules", "alerts", "surrogate", "sae"):
            path = getattr(self.paths, key)
            digests[key] = _file_digest(path) if path and Path(path).is_file() else ""
        body["inputs"] = digests
        text = json.dumps(body, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


_SECTIONS = ("paths", "run", "harness", "sae", "predictor", "probe", "saliency")


def _file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _coerce(raw: Any, kind: type, where: str) -> Any:
    if isinstance(raw, kind) and not (kind is int and isinstance(raw, bool)):
        return raw
    text = str(raw).strip()
    try:
        if kind is bool:
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
    except ValueError:
        raise ConfigError(f"{where}: cannot read {text!r} as {kind.__name__}") from None
    return text


def load_config(path: str | Path | None = None, overrides: list[str] | None = None) -> RunConfig:
    """Defaults, then the file at ``path``, then ``section.key=value`` overrides."""
    cfg = RunConfig()
    if path:
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        for section in parser.sections():
            for key, raw in parser.items(section):
                cfg = cfg.with_value(section, key, raw)
    for item in overrides or []:
        dotted, sep, raw = item.partition("=")
        section, dot, key = dotted.strip().partition(".")
        if not sep or not dot:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        cfg = cfg.with_value(section, key.strip(), raw)
    return cfg


def dump_config(cfg: RunConfig) -> str:
    """INI text that ``load_config`` reads back to an equal config."""
    out = []
    for section, values in cfg.to_dict().items():
        out.append(f"[{section}]")
        out.extend(f"{k} = {v}" for k, v in values.items())
        out.append("")
    return "\n".join(out)
