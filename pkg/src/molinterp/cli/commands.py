"""Subcommand handlers. Each takes the resolved config and parsed args and
returns an exit code."""

from __future__ import annotations

import argparse
import hashlib
import json
from dataclasses import replace
from pathlib import Path

from ..attribution import MotifCandidate, counterfactual_scan
from ..chem import ChemError, parse_smiles
from ..smarts import label_matrix, load_library
from . import pipeline as pl
from .config import RunConfig, dump_config
from .pipeline import InputError

__all__ = ["InputError"]

EXIT_OK, EXIT_STAGE, EXIT_INPUT = 0, 1, 2


def _out(cfg: RunConfig) -> Path:
    out = Path(cfg.paths.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _library(cfg: RunConfig):
    return load_library(cfg.paths.library or None)


def _report_errors(out: Path, stem: str, corpus: pl.Corpus, h: str) -> None:
    pl.write_error_sidecar(out, stem, corpus, h)
    if corpus.errors:
        print(f"{len(corpus.errors)} of {corpus.n_input} input lines failed to parse; see {stem}.errors.json")


def cmd_parse(cfg: RunConfig, args: argparse.Namespace) -> int:
    out, h = _out(cfg), cfg.config_hash()
    corpus = pl.load_corpus(cfg)
    pl.stage_parse(cfg, corpus, out, h)
    _report_errors(out, "parse", corpus, h)
    print(f"parsed {len(corpus.mols)} molecules -> {out / 'parsed.csv'}")
    return EXIT_OK


def cmd_descriptors(cfg: RunConfig, args: argparse.Namespace) -> int:
    out, h = _out(cfg), cfg.config_hash()
    corpus = pl.load_corpus(cfg)
    pl.stage_descriptors(cfg, corpus, out, h)
    _report_errors(out, "descriptors", corpus, h)
    print(f"wrote {len(corpus.mols)} descriptor rows -> {out / 'descriptors.csv'}")
    return EXIT_OK


def _embeddings(cfg: RunConfig, out: Path, h: str):
    corpus = pl.load_corpus(cfg)
    lib = _library(cfg)
    R = pl.descriptor_matrix(cfg, corpus)
    L = label_matrix(corpus.mols, lib)
    H, files = pl.stage_embed(cfg, corpus, R, L, lib.names, out, h)
    return corpus, lib, R, L, H, files


def cmd_embed(cfg: RunConfig, args: argparse.Namespace) -> int:
    out, h = _out(cfg), cfg.config_hash()
    _, _, _, _, H, files = _embeddings(cfg, out, h)
    print(f"embeddings {H.shape[0]} x {H.shape[1]}; wrote {', '.join(files) or 'nothing (loaded from file)'}")
    return EXIT_OK


def cmd_sae_train(cfg: RunConfig, args: argparse.Namespace) -> int:
    out, h = _out(cfg), cfg.config_hash()
    _, _, _, _, H, _ = _embeddings(cfg, out, h)
    _, files = pl.stage_sae_train(cfg, H, out, h)
    print(f"trained SAE on {H.shape[0]} embeddings; wrote {', '.join(files)}")
    return EXIT_OK


def cmd_sae_analyze(cfg: RunConfig, args: argparse.Namespace) -> int:
    out, h = _out(cfg), cfg.config_hash()
    _, _, R, _, H, _ = _embeddings(cfg, out, h)
    if cfg.paths.sae:
        model = pl.load_sae(cfg.paths.sae)
    else:
        model, _ = pl.stage_sae_train(cfg, H, out, h)
    summary, files = pl.stage_sae_analyze(cfg, model, H, R, out, h)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_probe(cfg: RunConfig, args: argparse.Namespace) -> int:
    out, h = _out(cfg), cfg.config_hash()
    _, lib, _, L, H, _ = _embeddings(cfg, out, h)
    summary, files = pl.stage_probes(cfg, H, L, lib.names, out, h)
    print(f"probes: mean AUROC {summary['mean_auroc']} over {summary['evaluated']} motifs; wrote {', '.join(files)}")
    return EXIT_OK


def cmd_saliency(cfg: RunConfig, args: argparse.Namespace) -> int:
    out, h = _out(cfg), cfg.config_hash()
    corpus = pl.load_corpus(cfg)
    summary, files = pl.stage_saliency(cfg, corpus, None, out, h)
    print(f"saliency for {summary['molecules']} molecules; wrote {', '.join(files)}")
    return EXIT_OK


def cmd_counterfactual(cfg: RunConfig, args: argparse.Namespace) -> int:
    out, h = _out(cfg), cfg.config_hash()
    try:
        mol = parse_smiles(args.smiles)
    except ChemError as exc:
        raise InputError(f"cannot parse {args.smiles!r}: {exc}") from None
    if cfg.paths.surrogate:
        model, _ = pl.get_surrogate(cfg, None, None, out, h)
        mean_vec = None
    else:
        corpus = pl.load_corpus(cfg)
        model, _ = pl.get_surrogate(cfg, corpus, None, out, h)
        mean_vec = pl.mean_feature_vector(corpus) if cfg.saliency.baseline == "mean" else None
    if cfg.saliency.baseline == "mean" and mean_vec is None:
        raise InputError("the mean baseline needs a corpus; pass --corpus or use the zero baseline")
    rules = pl.load_rules(cfg.paths.rules or None)
    sal, cf = pl.explain_molecule(cfg, model, mol, rules, mean_vec)
    # every applicable edit, whatever the saliency says, for reference
    whole = [MotifCandidate(frozenset(range(len(mol.atoms))), 0.0, "molecule")] if mol.atoms else []
    results, _ = counterfactual_scan(mol, whole, rules, cfg.saliency.qed_weights)
    cf["whole_molecule"] = [
        {"rule": r.rule, "site": list(r.site), "product": r.product_smiles, "delta_qed": r.delta_qed, "valid": r.valid, "reason": r.reason}
        for r in results
    ]
    digest = hashlib.sha256(args.smiles.encode("utf-8")).hexdigest()[:10]
    path = out / f"counterfactual_{digest}.json"
    pl.write_json(path, {"input": args.smiles, "saliency": sal, "counterfactual": cf}, h)
    print(f"{sal['smiles']}: surrogate {sal['f_input']:.4f}, {len(sal['motifs'])} motifs, {len(cf['scan'])} edits")
    for row in cf["scan"]:
        status = f"dQED {row['delta_qed']:+.5f}" if row["valid"] else f"rejected ({row['reason']})"
        print(f"  motif {row['motif']} {row['rule']} at {row['site']} -> {row['product']} {status}")
    for row in cf["whole_molecule"]:
        status = f"dQED {row['delta_qed']:+.5f}" if row["valid"] else f"rejected ({row['reason']})"
        print(f"  any-site {row['rule']} at {row['site']} -> {row['product']} {status}")
    print(f"wrote {path}")
    return EXIT_OK


STAGES = ("descriptors", "embeddings", "sae", "probes", "saliency")


def cmd_analyze(cfg: RunConfig, args: argparse.Namespace) -> int:
    """Run every stage; failures are recorded per stage in the manifest.

    Exit code is 0 if at least one stage succeeded, 1 if all failed, 2 if the
    corpus itself is unusable.
    """
    out, h = _out(cfg), cfg.config_hash()
    # the output location is left out so bundles written to different
    # directories stay byte-identical
    (out / "run_config.ini").write_text(dump_config(replace(cfg, paths=replace(cfg.paths, output=""))), encoding="utf-8")
    corpus = pl.load_corpus(cfg)
    _report_errors(out, "corpus", corpus, h)
    lib = _library(cfg)
    status: dict[str, dict] = {}
    files: list[str] = ["run_config.ini", "corpus.errors.json"]
    summaries: dict[str, dict] = {}
    R = L = H = None

    def attempt(stage: str, needs: tuple[str, ...], fn):
        blocked = [s for s in needs if status.get(s, {}).get("status") != "ok"]
        if blocked:
            status[stage] = {"status": "skipped", "error": "UpstreamFailed", "detail": ", ".join(blocked)}
            return None
        try:
            result = fn()
        except Exception as exc:  # noqa: BLE001 - recorded in the manifest
            status[stage] = {"status": "error", "error": type(exc).__name__, "detail": str(exc)}
            return None
        status[stage] = {"status": "ok"}
        return result

    def descriptors():
        R, written = pl.stage_descriptors(cfg, corpus, out, h)
        files.extend(written)
        return R, label_matrix(corpus.mols, lib)

    res = attempt("descriptors", (), descriptors)
    if res is not None:
        R, L = res

    def embeddings():
        H, written = pl.stage_embed(cfg, corpus, R, L, lib.names, out, h)
        files.extend(written)
        return H

    H = attempt("embeddings", ("descriptors",), embeddings)

    def sae():
        model, written = pl.stage_sae_train(cfg, H, out, h)
        summary, more = pl.stage_sae_analyze(cfg, model, H, R, out, h)
        files.extend(written + more)
        return summary

    summaries["sae"] = attempt("sae", ("embeddings",), sae)

    def probes():
        summary, written = pl.stage_probes(cfg, H, L, lib.names, out, h)
        files.extend(written)
        return summary

    summaries["probes"] = attempt("probes", ("embeddings",), probes)

    def saliency():
        summary, written = pl.stage_saliency(cfg, corpus, R, out, h)
        files.extend(written)
        return summary

    summaries["saliency"] = attempt("saliency", ("descriptors",), saliency)

    manifest = {
        "config_hash": h,
        "seeds": pl.seeds(cfg),
        "versions": pl.versions(),
        "corpus": {"input_lines": corpus.n_input, "molecules": len(corpus.mols), "parse_errors": len(corpus.errors)},
        "stages": status,
        "summaries": {k: v for k, v in summaries.items() if v is not None},
        "artifacts": {name: (out / name).is_file() for name in pl.ANALYZE_ARTIFACTS},
        "files": {name: _sha(out / name) for name in sorted(set(files)) if (out / name).is_file()},
    }
    pl.write_json(out / "manifest.json", manifest, h)
    failed = [s for s, v in status.items() if v["status"] != "ok"]
    for stage in STAGES:
        v = status[stage]
        print(f"{stage:12s} {v['status']}" + (f" ({v['error']}: {v['detail']})" if v["status"] != "ok" else ""))
    print(f"manifest -> {out / 'manifest.json'} (config {h})")
    return EXIT_STAGE if len(failed) == len(STAGES) else EXIT_OK


def _sha(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def cmd_report(cfg: RunConfig, args: argparse.Namespace) -> int:
    """Markdown summary of an analyze output directory."""
    out = Path(cfg.paths.output)
    manifest_path = out / "manifest.json"
    if not manifest_path.is_file():
        raise InputError(f"no manifest.json in {out}; run analyze first")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    lines = [f"# Analysis report", "", f"config hash: `{manifest['config_hash']}`", ""]
    lines += ["## Stages", "", "| stage | status |", "|---|---|"]
    for stage, v in manifest["stages"].items():
        lines.append(f"| {stage} | {v['status']}{' (' + v.get('error', '') + ')' if v['status'] != 'ok' else ''} |")
    if (out / "predictor_r2.csv").is_file():
        _, rows = pl.read_csv(out / "predictor_r2.csv")
        lines += ["", "## Reward prediction from SAE factors", "", "| signal | train R2 | test R2 |", "|---|---|---|"]
        lines += [f"| {r[0]} | {float(r[1]):.3f} | {float(r[2]):.3f} |" for r in rows]
    if (out / "top_pairs.csv").is_file():
        _, rows = pl.read_csv(out / "top_pairs.csv")
        lines += ["", "## Strongest factor-signal correlations", "", "| factor | signal | r |", "|---|---|---|"]
        lines += [f"| {r[0]} | {r[1]} | {float(r[2]):+.3f} |" for r in rows[:10]]
    if (out / "sparsity.json").is_file():
        sp = json.loads((out / "sparsity.json").read_text(encoding="utf-8"))
        lines += ["", f"Mean activation frequency: {sp['mean']:.3f} (threshold {sp['threshold']})"]
    if (out / "probe_report.csv").is_file():
        _, rows = pl.read_csv(out / "probe_report.csv")
        lines += ["", "## Motif probes", "", "| motif | prevalence | AUROC | AP |", "|---|---|---|---|"]
        for r in rows:
            auc = f"{float(r[2]):.4f}" if r[2] else "n/a"
            ap = f"{float(r[3]):.4f}" if r[3] else "n/a"
            lines.append(f"| {r[0]} | {float(r[1]):.4f} | {auc} | {ap} |")
    if (out / "counterfactual.json").is_file():
        cf = json.loads((out / "counterfactual.json").read_text(encoding="utf-8"))
        lines += ["", "## Best counterfactual edits", "", "| molecule | rule | product | dQED |", "|---|---|---|---|"]
        for mol in cf["molecules"]:
            for best in mol["best"].values():
                lines.append(f"| {mol['name']} | {best['rule']} | {best['product']} | {best['delta_qed']:+.4f} |")
    text = "\n".join(lines) + "\n"
    (out / "report.md").write_text(text, encoding="utf-8")
    print(text, end="")
    return EXIT_OK
