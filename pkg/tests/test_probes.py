from __future__ import annotations

import json
import math

import numpy as np
import pytest

from molinterp.chem import parse_smiles
from molinterp.numkit import SingleClass, auroc, fit_scaler, split_indices
from molinterp.probes import (
    ProbeConfig,
    ProbeModel,
    evaluate_probe,
    motif_cooccurrence_correlation,
    probe_suite,
    random_label_control,
    train_probe,
)
from molinterp.smarts import label_matrix

FAST = ProbeConfig(hidden=(32, 16), epochs=15)


def sign_data(n=600, d=12, seed=0):
    rng = np.random.default_rng(seed)
    H = rng.normal(size=(n, d))
    return H, (H[:, 3] > 0).astype(float)


def test_sign_coordinate_probe():
    H, y = sign_data()
    train, test = split_indices(len(y), 0.1, 0)
    model = train_probe(H[train], y[train], ProbeConfig(), motif="sign")
    row = evaluate_probe(model, H[test], y[test], len(train), 50, float(y.mean()))
    assert row.auroc >= 0.99
    assert 0.0 <= row.ap <= 1.0 and row.motif == "sign"
    assert model.logits(H[:5]).shape == (5,)


def test_random_label_control_is_near_chance():
    H, _ = sign_data(n=800, d=16, seed=1)
    scores = random_label_control(H, config=FAST)
    assert len(scores) == 5
    assert 0.4 <= np.mean(scores) <= 0.6


class FixedScores:
    """Stand-in probe whose logits are supplied directly."""

    def __init__(self, scores):
        self.scores = np.asarray(scores, dtype=float)
        self.motif = "fixed"
        self.scaler = fit_scaler(np.zeros((2, 1)))

    def logits(self, H):
        return self.scores


def test_evaluate_perfect_and_constant_scores():
    y = np.array([0, 1, 0, 1, 1], dtype=float)
    row = evaluate_probe(FixedScores(y * 3 - 1), np.zeros((5, 1)), y)
    assert row.auroc == 1.0 and row.ap == 1.0
    row = evaluate_probe(FixedScores(np.zeros(5)), np.zeros((5, 1)), y)
    assert row.auroc == 0.5


def test_single_class_test_split_keeps_ap():
    y = np.ones(4)
    row = evaluate_probe(FixedScores([0.1, 0.2, 0.3, 0.4]), np.zeros((4, 1)), y)
    assert row.single_class_test and row.auroc is None and row.ap == 1.0
    json.dumps(row.to_dict())


def test_train_probe_needs_both_classes():
    with pytest.raises(SingleClass):
        train_probe(np.zeros((6, 2)), np.zeros(6), FAST)


def test_cooccurrence_examples(library):
    mols = [parse_smiles(s) for s in ("c1ccccc1", "CCO", "Clc1ccccc1", "CC#N")]
    L = label_matrix(mols, library)
    co = motif_cooccurrence_correlation(L, library.names)
    i, j = library.index("aromatic_ring"), library.index("halogen_Cl")
    assert co.r[i, j] == pytest.approx(1.0 / math.sqrt(3.0))
    assert co.r[i, j] == co.r[j, i]
    assert co.r[i, i] == 1.0
    k = library.index("halogen_F")
    assert co.constant[k] and np.isnan(co.r[k]).all()

    x = np.array([1, 0, 1, 1, 0])
    co = motif_cooccurrence_correlation(np.c_[x, x, 1 - x])
    np.testing.assert_allclose(co.r, [[1, 1, -1], [1, 1, -1], [-1, -1, 1]])


def test_suite_single_motif_library():
    H, y = sign_data(n=300)
    H[:, 3] += np.where(y > 0, 1.0, -1.0)  # clear margin between the classes
    report = probe_suite(H, y[:, None], ["only"], ProbeConfig())
    assert len(report.rows) == 1 and report.rows[0].auroc == 1.0
    assert report.mean_auroc == 1.0


def test_suite_skips_single_class_motifs():
    H, y = sign_data(n=300)
    L = np.c_[y, np.zeros(300), np.ones(300)]
    report = probe_suite(H, L, ["sign", "never", "always"], FAST)
    assert [r.motif for r in report.rows] == ["sign", "never", "always"]
    assert report.rows[1].skipped and report.rows[2].skipped
    assert [r.motif for r in report.evaluated] == ["sign"]


def test_scaler_is_fit_on_training_rows_only():
    H, y = sign_data(n=300)
    H = H + 5.0 * (np.arange(300) >= 270)[:, None]  # shifted tail
    train, test = split_indices(300, 0.1, 0)
    report = probe_suite(H, y[:, None], ["sign"], FAST, split=(train, test))
    assert report.rows[0].scaler_digest == fit_scaler(H[train]).digest()
    assert report.rows[0].scaler_digest != fit_scaler(H).digest()


def test_suite_report_is_deterministic():
    H, y = sign_data(n=300)
    a = json.dumps(probe_suite(H, y[:, None], ["sign"], FAST).to_dict(), sort_keys=True)
    b = json.dumps(probe_suite(H, y[:, None], ["sign"], FAST).to_dict(), sort_keys=True)
    assert a == b


def test_logits_monotone_transform_keeps_auroc():
    H, y = sign_data(n=300)
    model = train_probe(H, y, FAST)
    z = model.logits(H)
    assert auroc(z, y) == pytest.approx(auroc(1.0 / (1.0 + np.exp(-z)), y))
    assert isinstance(model, ProbeModel)
