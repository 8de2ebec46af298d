"""Pipeline stages behind the subcommands.

Every randomized stage draws from its own seed, derived from the master
seed and the stage name (``derive_seed(master, name)``, which keys a numpy
``SeedSequence`` by a CRC32 of the name). Stages therefore do not shift
each other's streams when one of them is skipped or reconfigured.

All artifacts carry the config hash: JSON files as a ``config_hash`` key,
CSV files as a leading ``# config_hash=...`` comment line.
"""

from __future__ import annotations

import csv
import io
import json
import math
import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .. import __version__
from ..attribution import (
    EmptyMolecule,
    counterfactual_scan,
    extract_motifs,
    integrated_gradients,
    load_rules,
)
from ..chem import ChemError, Molecule, iter_smiles_file, parse_smiles, write_smiles
from ..descriptors import SIGNALS, compute_descriptors, load_alerts, write_descriptor_csv
from ..embedfile import read_embeddings, write_embeddings
from ..harness import (
    DEFAULT_MOTIFS,
    PlantedSignal,
    PlantedSpec,
    SurrogateConfig,
    featurize_atoms,
    generate_corpus,
    generate_embeddings,
    planted_sources,
    surrogate_from_arrays,
    surrogate_to_arrays,
    train_surrogate,
)
from ..numkit import ShapeMismatch, derive_seed, load_arrays, make_rng, save_arrays, split_indices
from ..probes import ProbeConfig, motif_cooccurrence_correlation, probe_suite
from ..sae import (
    PredictorConfig,
    SaeConfig,
    encode,
    factor_reward_correlations,
    sae_from_arrays,
    sae_to_arrays,
    sparsity_report,
    train_reward_predictor,
    train_sae,
)
from ..smarts import label_matrix, load_library
from .config import RunConfig


class InputError(ValueError):
    """Unusable input: exit code 2."""


# ---------------------------------------------------------------- writers


def _fmt(v: Any) -> Any:
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if math.isfinite(v) else ("nan" if math.isnan(v) else repr(v))
    return v


def write_json(path: Path, payload: dict, config_hash: str) -> None:
    body = {"config_hash": config_hash, **payload}
    text = json.dumps(body, indent=2, sort_keys=True, allow_nan=True, default=_json_default)
    path.write_text(text + "\n", encoding="utf-8")


def _json_default(o: Any) -> Any:
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]], config_hash: str) -> None:
    buf = io.StringIO()
    buf.write(f"# config_hash={config_hash}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(line for line in fh if not line.startswith("#")))
    return rows[0], rows[1:]


# ---------------------------------------------------------------- corpus


@dataclass
class Corpus:
    names: list[str]
    smiles: list[str]
    mols: list[Molecule]
    errors: list[dict] = field(default_factory=list)
    n_input: int = 0


def load_corpus(cfg: RunConfig) -> Corpus:
    """Parse the configured corpus, or generate the harness corpus.

    Raises:
        InputError: unreadable file or no parseable molecule.
    """
    names, smiles, mols, errors = [], [], [], []
    if cfg.paths.corpus:
        try:
            records = list(iter_smiles_file(cfg.paths.corpus))
        except (OSError, UnicodeDecodeError) as exc:
            raise InputError(f"cannot read corpus {cfg.paths.corpus}: {exc}") from None
        for rec in records:
            try:
                mol = parse_smiles(rec.smiles)
            except ChemError as exc:
                errors.append({"line": rec.line_no, "smiles": rec.smiles, "error": type(exc).__name__, "detail": str(exc)})
                continue
            names.append(rec.name)
            smiles.append(rec.smiles)
            mols.append(mol)
        n_input = len(records)
    else:
        generated = generate_corpus(cfg.run.n_molecules, seed=derive_seed(cfg.run.seed, "corpus"))
        for i, smi in enumerate(generated):
            names.append(f"mol_{i + 1}")
            smiles.append(smi)
            mols.append(parse_smiles(smi))
        n_input = len(generated)
    if not mols:
        raise InputError("corpus contains no parseable molecule")
    return Corpus(names, smiles, mols, errors, n_input)


def write_error_sidecar(out: Path, stem: str, corpus: Corpus, config_hash: str) -> Path:
    path = out / f"{stem}.errors.json"
    write_json(
        path,
        {"input_lines": corpus.n_input, "rows": len(corpus.mols), "errors": corpus.errors},
        config_hash,
    )
    return path


# ---------------------------------------------------------------- stages


def _alerts(cfg: RunConfig):
    return load_alerts(cfg.paths.alerts) if cfg.paths.alerts else ()


def descriptor_matrix(cfg: RunConfig, corpus: Corpus) -> np.ndarray:
    alerts = _alerts(cfg)
    weights = cfg.saliency.qed_weights
    rows = [compute_descriptors(m, weights, alerts).signals() for m in corpus.mols]
    return np.asarray(rows, dtype=np.float64).reshape(len(rows), len(SIGNALS))


def stage_parse(cfg: RunConfig, corpus: Corpus, out: Path, h: str) -> list[str]:
    rows = [(n, s, write_smiles(m), len(m.atoms)) for n, s, m in zip(corpus.names, corpus.smiles, corpus.mols)]
    write_csv(out / "parsed.csv", ("name", "input_smiles", "smiles", "heavy_atoms"), rows, h)
    return ["parsed.csv"]


def stage_descriptors(cfg: RunConfig, corpus: Corpus, out: Path, h: str) -> tuple[np.ndarray, list[str]]:
    R = descriptor_matrix(cfg, corpus)
    write_descriptor_csv(out / "descriptors.csv", corpus.names, corpus.smiles, R, comment=f"config_hash={h}")
    return R, ["descriptors.csv"]


def planted_spec(cfg: RunConfig, motif_names: Sequence[str]) -> PlantedSpec:
    hc = cfg.harness
    signals = [
        PlantedSignal(n, "descriptor", hc.drug_likeness_gain if n == "drug_likeness" else hc.descriptor_gain)
        for n in SIGNALS
    ]
    signals += [PlantedSignal(n, "motif", hc.motif_gain) for n in DEFAULT_MOTIFS if n in motif_names]
    return PlantedSpec(
        d=hc.d, signals=tuple(signals), sigma=hc.sigma, nonlinear=hc.nonlinear, seed=derive_seed(cfg.run.seed, "harness")
    )


def stage_embed(
    cfg: RunConfig, corpus: Corpus, R: np.ndarray, labels: np.ndarray, motif_names: Sequence[str], out: Path, h: str
) -> tuple[np.ndarray, list[str]]:
    """Load embeddings from file, or plant signals and write them with a ledger."""
    n = len(corpus.mols)
    if cfg.paths.embeddings:
        H = read_embeddings(cfg.paths.embeddings)
        if H.shape[0] != n:
            raise ShapeMismatch(f"embedding file has {H.shape[0]} rows for {n} molecules")
        if H.shape[1] != cfg.harness.d:
            raise ShapeMismatch(f"embedding width {H.shape[1]} differs from configured d={cfg.harness.d}")
        return H, []
    spec = planted_spec(cfg, motif_names)
    H, ledger = generate_embeddings(planted_sources(R, SIGNALS, labels, motif_names), spec)
    write_embeddings(out / "embeddings.bin", H)
    write_json(out / "ledger.json", ledger, h)
    return H, ["embeddings.bin", "ledger.json"]


def sae_config(cfg: RunConfig) -> SaeConfig:
    s = cfg.sae
    return SaeConfig(
        k=s.k, l1=s.l1, epochs=s.epochs, batch_size=s.batch_size, lr=s.lr, dropout=s.dropout,
        kl_weight=s.kl_weight, target_sparsity=s.target_sparsity, unit_decoder=s.unit_decoder,
        seed=derive_seed(cfg.run.seed, "sae"),
    )


def stage_sae_train(cfg: RunConfig, H: np.ndarray, out: Path, h: str):
    model, curve = train_sae(H, sae_config(cfg))
    meta, arrays = sae_to_arrays(model)
    save_arrays(out / "sae.ckpt", {**meta, "config_hash": h}, arrays)
    write_csv(out / "sae_loss.csv", ("epoch", "loss"), list(enumerate(curve, start=1)), h)
    return model, ["sae.ckpt", "sae_loss.csv"]


def load_sae(path: str):
    meta, arrays = load_arrays(path)
    return sae_from_arrays(meta, arrays)


def shared_split(cfg: RunConfig, n: int) -> tuple[np.ndarray, np.ndarray]:
    return split_indices(n, cfg.run.test_fraction, cfg.run.seed, "split")


def stage_sae_analyze(cfg: RunConfig, model, H: np.ndarray, R: np.ndarray, out: Path, h: str) -> tuple[dict, list[str]]:
    if H.shape[1] != model.d:
        raise ShapeMismatch(f"SAE expects width {model.d}, embeddings have {H.shape[1]}")
    Z = encode(model, H)
    sp = sparsity_report(Z, cfg.sae.threshold)
    write_json(out / "sparsity.json", {"k": Z.shape[1], "n": Z.shape[0], **sp.to_dict()}, h)

    fc = factor_reward_correlations(Z, R, top=cfg.sae.top_pairs)
    rows = [(f"factor_{i}",) + tuple(fc.r[i]) for i in range(fc.r.shape[0])]
    write_csv(out / "factor_correlations.csv", ("factor",) + SIGNALS, rows, h)
    write_csv(
        out / "top_pairs.csv",
        ("factor", "signal", "r"),
        [(f"factor_{i}", SIGNALS[j], r) for i, j, r in fc.top_pairs],
        h,
    )

    p = cfg.predictor
    hidden = tuple(int(x) for x in p.hidden.split(",") if x.strip())
    pcfg = PredictorConfig(
        kind=p.kind, hidden=hidden, epochs=p.epochs, batch_size=p.batch_size, lr=p.lr, dropout=p.dropout,
        seed=derive_seed(cfg.run.seed, "predictor"),
    )
    train_idx, test_idx = shared_split(cfg, H.shape[0])
    results = train_reward_predictor(Z, R, train_idx, test_idx, SIGNALS, pcfg)
    write_csv(
        out / "predictor_r2.csv",
        ("signal", "train_r2", "test_r2"),
        [(r.signal, r.train_r2, r.test_r2) for r in results],
        h,
    )
    best = np.abs(fc.r).max(axis=0)
    summary = {
        "sparsity_mean": sp.mean,
        "best_abs_r": {s: float(b) for s, b in zip(SIGNALS, best)},
        "test_r2": {r.signal: r.test_r2 for r in results},
    }
    return summary, ["sparsity.json", "factor_correlations.csv", "top_pairs.csv", "predictor_r2.csv"]


def probe_motif_indices(cfg: RunConfig, names: Sequence[str]) -> list[int]:
    choice = cfg.probe.motifs.strip()
    if choice == "all":
        return list(range(len(names)))
    wanted = list(DEFAULT_MOTIFS) if choice == "planted" else [x.strip() for x in choice.split(",") if x.strip()]
    missing = [w for w in wanted if w not in names]
    if missing:
        raise InputError(f"probe motifs not in library: {', '.join(missing)}")
    return [names.index(w) for w in wanted]


def stage_probes(
    cfg: RunConfig, H: np.ndarray, labels: np.ndarray, names: Sequence[str], out: Path, h: str
) -> tuple[dict, list[str]]:
    idx = probe_motif_indices(cfg, names)
    pc = cfg.probe
    config = ProbeConfig(
        epochs=pc.epochs, batch_size=pc.batch_size, lr=pc.lr, dropout=pc.dropout,
        test_fraction=cfg.run.test_fraction, seed=derive_seed(cfg.run.seed, "probe"),
    )
    split = shared_split(cfg, H.shape[0])
    report = probe_suite(H, labels[:, idx], [names[i] for i in idx], config, split=split)
    write_csv(
        out / "probe_report.csv",
        ("motif", "prevalence", "auroc", "ap", "n_train", "n_test", "epochs", "scaler_digest", "single_class_test", "skipped"),
        [
            (r.motif, r.prevalence, "" if r.auroc is None else r.auroc, "" if r.ap is None else r.ap,
             r.n_train, r.n_test, r.epochs, r.scaler_digest, int(r.single_class_test), r.skipped)
            for r in report.rows
        ],
        h,
    )
    co = motif_cooccurrence_correlation(labels, names)
    write_csv(
        out / "cooccurrence.csv",
        ("motif",) + tuple(names),
        [(names[i],) + tuple(co.r[i]) for i in range(len(names))],
        h,
    )
    return {"mean_auroc": report.mean_auroc, "evaluated": len(report.evaluated)}, ["probe_report.csv", "cooccurrence.csv"]


def get_surrogate(cfg: RunConfig, corpus: Corpus, R: np.ndarray | None, out: Path, h: str):
    """Load the configured surrogate checkpoint, or train one on ``corpus``."""
    if cfg.paths.surrogate:
        meta, arrays = load_arrays(cfg.paths.surrogate)
        return surrogate_from_arrays(meta, arrays), []
    if R is None:
        R = descriptor_matrix(cfg, corpus)
    feats = [featurize_atoms(m) for m in corpus.mols]
    scfg = SurrogateConfig(
        epochs=cfg.saliency.surrogate_epochs, lr=cfg.saliency.surrogate_lr,
        test_fraction=cfg.run.test_fraction, seed=derive_seed(cfg.run.seed, "surrogate"),
    )
    model, report = train_surrogate(feats, R[:, SIGNALS.index("drug_likeness")], scfg)
    meta, arrays = surrogate_to_arrays(model)
    meta.update({"config_hash": h, "train_r2": report.train_r2, "test_r2": report.test_r2})
    save_arrays(out / "surrogate.ckpt", meta, arrays)
    return model, ["surrogate.ckpt"]


def mean_feature_vector(corpus: Corpus) -> np.ndarray:
    return np.vstack([featurize_atoms(m) for m in corpus.mols]).mean(axis=0)


def explain_molecule(cfg: RunConfig, model, mol: Molecule, rules, mean_vec: np.ndarray | None) -> tuple[dict, dict]:
    """Saliency record and counterfactual record for one molecule."""
    sc = cfg.saliency
    x = featurize_atoms(mol)
    amap = integrated_gradients(model, x, sc.baseline, sc.steps, mean_vector=mean_vec, target="surrogate QED")
    scores = amap.atom_scores()
    try:
        motifs = extract_motifs(mol, scores, sc.percentile, sc.k, sc.ring_boost)
    except EmptyMolecule:
        motifs = []
    sal = {
        "smiles": write_smiles(mol),
        "baseline": amap.baseline_kind,
        "steps": amap.steps,
        "f_input": amap.f_input,
        "f_baseline": amap.f_baseline,
        "completeness_residual": amap.completeness_residual,
        "atom_scores": [float(s) for s in scores],
        "motifs": [{"atoms": m.sorted_atoms, "score": m.score, "origin": m.origin} for m in motifs],
    }
    results, best = counterfactual_scan(mol, motifs, rules, sc.qed_weights)
    cf = {
        "smiles": write_smiles(mol),
        "scan": [
            {
                "motif": r.motif_index, "rule": r.rule, "site": list(r.site), "product": r.product_smiles,
                "qed_before": r.qed_before, "qed_after": r.qed_after, "delta_qed": r.delta_qed,
                "valid": r.valid, "reason": r.reason,
            }
            for r in results
        ],
        "best": {
            str(mi): {"rule": r.rule, "site": list(r.site), "product": r.product_smiles, "delta_qed": r.delta_qed}
            for mi, r in sorted(best.items())
        },
    }
    return sal, cf


def sample_indices(cfg: RunConfig, n: int) -> list[int]:
    k = min(cfg.saliency.sample, n)
    rng = make_rng(cfg.run.seed, "saliency-sample")
    return sorted(int(i) for i in rng.choice(n, size=k, replace=False))


def stage_saliency(cfg: RunConfig, corpus: Corpus, R: np.ndarray | None, out: Path, h: str) -> tuple[dict, list[str]]:
    model, files = get_surrogate(cfg, corpus, R, out, h)
    rules = load_rules(cfg.paths.rules or None)
    mean_vec = mean_feature_vector(corpus) if cfg.saliency.baseline == "mean" else None
    sal_rows, cf_rows = [], []
    for i in sample_indices(cfg, len(corpus.mols)):
        sal, cf = explain_molecule(cfg, model, corpus.mols[i], rules, mean_vec)
        sal_rows.append({"name": corpus.names[i], **sal})
        cf_rows.append({"name": corpus.names[i], **cf})
    write_json(out / "saliency.json", {"molecules": sal_rows}, h)
    write_json(out / "counterfactual.json", {"molecules": cf_rows}, h)
    worst = max((r["completeness_residual"] for r in sal_rows), default=0.0)
    return {"molecules": len(sal_rows), "max_completeness_residual": worst}, files + ["saliency.json", "counterfactual.json"]


# ---------------------------------------------------------------- manifest


ANALYZE_ARTIFACTS = (
    "sparsity.json",
    "factor_correlations.csv",
    "predictor_r2.csv",
    "probe_report.csv",
    "cooccurrence.csv",
    "saliency.json",
    "counterfactual.json",
)


def versions() -> dict:
    import scipy

    return {"molinterp": __version__, "numpy": np.__version__, "scipy": scipy.__version__, "python": platform.python_version()}


def seeds(cfg: RunConfig) -> dict:
    master = cfg.run.seed
    names = ("corpus", "harness", "sae", "predictor", "probe", "surrogate")
    out = {name: derive_seed(master, name) for name in names}
    out["master"] = master
    return out
