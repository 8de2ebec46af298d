from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from molinterp.cli import main
from molinterp.cli.config import ConfigError, RunConfig, dump_config, load_config
from molinterp.embedfile import EmbeddingFormatError, read_embeddings, write_embeddings

SMALL = """\
[run]
n_molecules = 150
[sae]
epochs = 10
[predictor]
epochs = 10
[probe]
epochs = 3
motifs = planted
[saliency]
sample = 3
surrogate_epochs = 5
"""


@pytest.fixture()
def small_cfg(tmp_path) -> Path:
    path = tmp_path / "small.ini"
    path.write_text(SMALL, encoding="utf-8")
    return path


# embedding files


@pytest.mark.parametrize("name, dtype", [("h.bin", "float64"), ("h.bin", "float32"), ("h.csv", "float64")])
def test_embedding_round_trip(tmp_path, name, dtype):
    H = np.random.default_rng(0).normal(size=(7, 5))
    write_embeddings(tmp_path / name, H, dtype)
    got = read_embeddings(tmp_path / name)
    assert got.dtype == np.float64 and got.shape == (7, 5)
    np.testing.assert_allclose(got, H, rtol=1e-6 if dtype == "float32" else 0)


def test_embedding_format_errors(tmp_path):
    path = tmp_path / "h.bin"
    write_embeddings(path, np.ones((3, 4)))
    raw = path.read_bytes()
    for bad in (raw[:10], raw[:-8], b"XXXXXXXX" + raw[8:], raw[:8] + b"\x09" + raw[9:]):
        path.write_bytes(bad)
        with pytest.raises(EmbeddingFormatError):
            read_embeddings(path)
    with pytest.raises(EmbeddingFormatError):
        write_embeddings(path, np.ones((0, 3)))
    csv = tmp_path / "h.csv"
    csv.write_text("e0,e1\n1,2\n3\n", encoding="utf-8")
    with pytest.raises(EmbeddingFormatError):
        read_embeddings(csv)


# configuration


def test_config_precedence(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("[run]\nseed = 5\nthreads = 2\n[sae]\nepochs = 7\n", encoding="utf-8")
    cfg = load_config(path, ["run.seed=9"])
    assert (cfg.run.seed, cfg.run.threads, cfg.sae.epochs) == (9, 2, 7)
    assert RunConfig().sae.epochs == 200 and RunConfig().sae.l1 == 0.01
    again = tmp_path / "again.ini"
    again.write_text(dump_config(cfg), encoding="utf-8")
    assert load_config(again) == cfg


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(None, ["run.seed=abc"])
    with pytest.raises(ConfigError):
        load_config(None, ["nosuch.key=1"])
    with pytest.raises(ConfigError):
        load_config(None, ["run.nokey=1"])
    with pytest.raises(ConfigError):
        load_config(None, ["justtext"])
    with pytest.raises(ConfigError):
        load_config(None, [f"paths.corpus={tmp_path / 'missing.smi'}"]).validate()


def test_config_hash_tracks_settings_and_inputs(tmp_path):
    corpus = tmp_path / "c.smi"
    corpus.write_text("CCO\n", encoding="utf-8")
    base = load_config(None, [f"paths.corpus={corpus}"])
    assert base.config_hash() == load_config(None, [f"paths.corpus={corpus}", "paths.output=elsewhere"]).config_hash()
    assert base.config_hash() != load_config(None, [f"paths.corpus={corpus}", "run.seed=1"]).config_hash()
    before = base.config_hash()
    corpus.write_text("CCN\n", encoding="utf-8")
    assert base.config_hash() != before


# commands


def test_descriptors_with_one_bad_line(tmp_path, capsys):
    corpus = tmp_path / "c.smi"
    corpus.write_text("CCO\nC1CC\nc1ccccc1\n", encoding="utf-8")
    out = tmp_path / "out"
    assert main(["descriptors", "--corpus", str(corpus), "--out", str(out)]) == 0
    lines = [ln for ln in (out / "descriptors.csv").read_text(encoding="utf-8").splitlines() if not ln.startswith("#")]
    assert len(lines) == 3  # header + 2 rows
    errors = json.loads((out / "descriptors.errors.json").read_text(encoding="utf-8"))
    assert len(errors["errors"]) == 1 and errors["errors"][0]["line"] == 2
    first = (out / "descriptors.csv").read_bytes()
    assert main(["descriptors", "--corpus", str(corpus), "--out", str(out)]) == 0
    assert (out / "descriptors.csv").read_bytes() == first


def test_empty_corpus_is_an_input_error(tmp_path):
    corpus = tmp_path / "empty.smi"
    corpus.write_text("", encoding="utf-8")
    assert main(["descriptors", "--corpus", str(corpus), "--out", str(tmp_path / "o")]) == 2
    assert main(["descriptors", "--corpus", str(tmp_path / "missing.smi"), "--out", str(tmp_path / "o")]) == 2


def test_parse_command(tmp_path):
    corpus = tmp_path / "c.smi"
    corpus.write_text("OCC\tethanol\nC(\n", encoding="utf-8")
    out = tmp_path / "out"
    assert main(["parse", "--corpus", str(corpus), "--out", str(out)]) == 0
    assert "ethanol" in (out / "parsed.csv").read_text(encoding="utf-8")


def test_counterfactual_command(tmp_path, small_cfg, oracle, capsys):
    out = tmp_path / "out"
    assert main(["counterfactual", "Clc1ccccc1", "--config", str(small_cfg), "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "chloro_to_bromo" in printed
    report = json.loads(next(out.glob("counterfactual_*.json")).read_text(encoding="utf-8"))
    rows = [r for r in report["counterfactual"]["whole_molecule"] if r["rule"] == "chloro_to_bromo"]
    assert len(rows) == 1 and rows[0]["valid"]
    qed_ref = {m["name"]: m["qed_mean"] for m in oracle["molecules"]}
    assert rows[0]["delta_qed"] == pytest.approx(qed_ref["bromobenzene"] - qed_ref["chlorobenzene"], abs=1e-9)
    assert "config_hash" in report

    ckpt = out / "surrogate.ckpt"
    assert ckpt.is_file()
    assert main(["counterfactual", "C", "--surrogate", str(ckpt), "--out", str(out)]) == 0
    assert main(["counterfactual", "C1CC", "--surrogate", str(ckpt), "--out", str(out)]) == 2


def test_stagewise_commands(tmp_path, small_cfg):
    out = tmp_path / "out"
    common = ["--config", str(small_cfg), "--out", str(out)]
    assert main(["embed"] + common) == 0
    assert (out / "embeddings.bin").is_file() and (out / "ledger.json").is_file()
    assert main(["sae-train"] + common) == 0
    assert main(["sae-analyze", "--sae", str(out / "sae.ckpt"), "--embeddings", str(out / "embeddings.bin")] + common) == 0
    assert (out / "factor_correlations.csv").is_file() and (out / "predictor_r2.csv").is_file()
    assert main(["probe", "--embeddings", str(out / "embeddings.bin")] + common) == 0
    assert (out / "probe_report.csv").is_file() and (out / "cooccurrence.csv").is_file()
    assert main(["saliency"] + common) == 0
    assert (out / "saliency.json").is_file() and (out / "counterfactual.json").is_file()


def test_analyze_and_report(tmp_path, small_cfg):
    out = tmp_path / "run"
    assert main(["analyze", "--config", str(small_cfg), "--out", str(out), "--threads", "1"]) == 0
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert all(v["status"] == "ok" for v in manifest["stages"].values())
    assert all(manifest["artifacts"].values()) and len(manifest["artifacts"]) == 7
    h = manifest["config_hash"]
    for name in manifest["files"]:
        if name.endswith(".json"):
            assert json.loads((out / name).read_text(encoding="utf-8")).get("config_hash") == h, name
        elif name.endswith(".csv"):
            assert (out / name).read_text(encoding="utf-8").startswith(f"# config_hash={h}"), name
    c = manifest["corpus"]
    assert c["input_lines"] == c["molecules"] + c["parse_errors"]
    assert main(["report", "--out", str(out)]) == 0
    assert (out / "report.md").read_text(encoding="utf-8").startswith("# Analysis report")


def test_analyze_records_shape_mismatch(tmp_path, small_cfg):
    emb = tmp_path / "wrong.bin"
    write_embeddings(emb, np.zeros((150, 7)))
    out = tmp_path / "run"
    assert main(["analyze", "--config", str(small_cfg), "--out", str(out), "--embeddings", str(emb)]) == 0
    stages = json.loads((out / "manifest.json").read_text(encoding="utf-8"))["stages"]
    assert stages["embeddings"] == {"status": "error", "error": "ShapeMismatch", "detail": stages["embeddings"]["detail"]}
    assert stages["sae"]["status"] == "skipped" and stages["probes"]["status"] == "skipped"
    assert stages["descriptors"]["status"] == "ok"


def test_analyze_on_standard_corpus_lists_all_artifacts(tmp_path):
    """Full-size harness corpus, short training budgets."""
    overrides = [
        "sae.epochs=2", "predictor.epochs=2", "probe.epochs=1", "probe.motifs=planted",
        "saliency.sample=2", "saliency.surrogate_epochs=2",
    ]
    argv = ["analyze", "--out", str(tmp_path / "run"), "--threads", "1"]
    for o in overrides:
        argv += ["--set", o]
    assert main(argv) == 0
    manifest = json.loads((tmp_path / "run" / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["corpus"]["molecules"] == 2000
    assert sorted(k for k, v in manifest["artifacts"].items() if v) == sorted(manifest["artifacts"])
    assert len(manifest["artifacts"]) == 7


def test_unknown_override_exit_code(tmp_path):
    assert main(["descriptors", "--set", "run.bogus=1", "--out", str(tmp_path)]) == 2
