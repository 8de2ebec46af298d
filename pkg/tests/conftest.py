from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

from molinterp.chem import parse_smiles
from molinterp.descriptors import SIGNALS, reward_matrix
from molinterp.harness import PlantedSpec, generate_corpus, generate_embeddings, planted_sources
from molinterp.smarts import label_matrix, load_library

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def oracle() -> dict:
    return json.loads((FIXTURES / "descriptor_oracle.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def oracle_mols(oracle):
    return [(m, parse_smiles(m["smiles"])) for m in oracle["molecules"]]


@pytest.fixture(scope="session")
def library():
    return load_library()


@dataclass
class HarnessData:
    smiles: list
    mols: list
    R: np.ndarray
    L: np.ndarray
    names: tuple

    def embeddings(self, spec: PlantedSpec = PlantedSpec()):
        return generate_embeddings(planted_sources(self.R, SIGNALS, self.L, self.names), spec)


@pytest.fixture(scope="session")
def harness_data(library) -> HarnessData:
    """The standard 2,000-molecule harness corpus with descriptors and labels."""
    smiles = generate_corpus(2000, seed=0)
    mols = [parse_smiles(s) for s in smiles]
    return HarnessData(smiles, mols, reward_matrix(mols).values, label_matrix(mols, library), library.names)


@pytest.fixture(scope="session")
def small_harness(library) -> HarnessData:
    smiles = generate_corpus(300, seed=1)
    mols = [parse_smiles(s) for s in smiles]
    return HarnessData(smiles, mols, reward_matrix(mols).values, label_matrix(mols, library), library.names)


@dataclass
class TrainedSurrogate:
    model: object
    report: object
    features: list
    qed: np.ndarray


@pytest.fixture(scope="session")
def trained_surrogate(harness_data) -> TrainedSurrogate:
    """Surrogate trained on the standard harness corpus with default settings."""
    from molinterp.harness import featurize_atoms, train_surrogate

    feats = [featurize_atoms(m) for m in harness_data.mols]
    qed = harness_data.R[:, list(SIGNALS).index("drug_likeness")]
    model, report = train_surrogate(feats, qed)
    return TrainedSurrogate(model, report, feats, qed)


# acceptance reporting: one PASS/FAIL line per criterion at the end of the run

_CRITERIA: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    number, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    if rep.failed and not detail:
        detail = rep.longrepr.reprcrash.message if hasattr(rep.longrepr, "reprcrash") else "error"
    _CRITERIA[number] = (title, "PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d} {status}  {title}: {detail}")
