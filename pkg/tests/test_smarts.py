from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from molinterp.chem import parse_smiles
from molinterp.smarts import (
    EmptyCorpus,
    MotifLibrary,
    ParseError,
    UnsupportedPrimitive,
    compile_pattern,
    has_match,
    iter_mappings,
    load_library,
    match_pattern,
    matches_at,
    motif_labels,
    motif_prevalence,
)
from molinterp.smarts.library import parse_library_text
from molinterp.smarts.pattern import atom_matches, bond_matches


def brute_force(pattern, mol) -> set[frozenset[int]]:
    """Every injective map of query atoms to molecule atoms, checked directly."""
    found = set()
    for image in itertools.permutations(range(len(mol.atoms)), len(pattern.query_atoms)):
        if not all(atom_matches(q, mol, m) for q, m in zip(pattern.query_atoms, image)):
            continue
        ok = True
        for a, b, expr in pattern.query_bonds:
            bond = mol.bond_between(image[a], image[b])
            if bond is None or not bond_matches(expr, mol, bond.index):
                ok = False
                break
        if ok:
            found.add(frozenset(image))
    return found


def test_compile_examples():
    p = compile_pattern("[F]")
    assert len(p) == 1 and p.query_bonds == ()
    p = compile_pattern("C#N")
    assert len(p) == 2 and len(p.query_bonds) == 1
    with pytest.raises(UnsupportedPrimitive):
        compile_pattern("[$(CC)]")
    for bad in ("", "C(", "[C", "C)"):
        with pytest.raises((ParseError, UnsupportedPrimitive)):
            compile_pattern(bad)


def test_match_examples():
    assert len(match_pattern(compile_pattern("[F]"), parse_smiles("FC(F)F"))) == 3
    assert match_pattern(compile_pattern("C#N"), parse_smiles("CC#N")) == [(1, 2)]
    assert len(match_pattern(compile_pattern("c1ccccc1"), parse_smiles("Cc1ccccc1"))) == 1
    assert len(match_pattern(compile_pattern("c1ccccc1"), parse_smiles("Cc1ccccc1"), unique=False)) == 12


@pytest.mark.parametrize(
    "smarts, smiles, expected",
    [
        ("[C,N;!H0]", "CN(C)C", {0, 2, 3}),  # ';' binds looser than ','
        ("[C,N&H0]", "CN(C)C", {0, 1, 2, 3}),  # '&' binds tighter than ','
        ("[!C]", "CCO", {2}),
        ("[CH3]", "CCC", {0, 2}),
        ("[D3]", "CC(C)C", {1}),
        ("[X4]", "CC", {0, 1}),
        ("[R]", "C1CC1C", {0, 1, 2}),
        ("[R0]", "C1CC1C", {3}),
        ("[a]", "c1ccccc1C", {0, 1, 2, 3, 4, 5}),
        ("[A]", "c1ccccc1C", {6}),
        ("[#7+]", "C[NH3+]", {1}),
        ("[O-]", "CC(=O)[O-]", {3}),
        ("[#6]", "CO", {0}),
    ],
)
def test_atom_primitives(smarts, smiles, expected):
    mol = parse_smiles(smiles)
    hits = {m[0] for m in match_pattern(compile_pattern(smarts), mol)}
    assert hits == expected


@pytest.mark.parametrize(
    "smarts, smiles, count",
    [
        ("C-C", "CC=C", 1),
        ("C=C", "CC=C", 1),
        ("C~C", "CC=C", 2),
        ("c:c", "c1ccccc1", 6),
        ("[#6]@[#6]", "C1CC1CC", 3),
        ("[#6]!@[#6]", "C1CC1CC", 2),
        ("CC", "c1ccccc1", 0),
        ("cc", "c1ccccc1", 6),
    ],
)
def test_bond_primitives(smarts, smiles, count):
    assert len(match_pattern(compile_pattern(smarts), parse_smiles(smiles))) == count


def test_matches_are_sound(oracle_mols, library):
    for _, mol in oracle_mols[:30]:
        for pattern in library.patterns:
            for image in iter_mappings(pattern, mol):
                assert len(set(image)) == len(image)
                assert all(atom_matches(q, mol, m) for q, m in zip(pattern.query_atoms, image))
                for a, b, expr in pattern.query_bonds:
                    bond = mol.bond_between(image[a], image[b])
                    assert bond is not None and bond_matches(expr, mol, bond.index)


def test_matches_equal_reference_toolkit(oracle_mols, library):
    """Match sets agree with the reference toolkit on every fixture molecule."""
    for record, mol in oracle_mols:
        for name, pattern in zip(library.names, library.patterns):
            ours = sorted(sorted(m) for m in match_pattern(pattern, mol))
            assert ours == record["motif_matches"][name], (record["name"], name)


def test_brute_force_small_examples():
    mol = parse_smiles("CC(=O)OCC")
    for smarts in ("[#6]~[#8]", "C(=O)O", "[CX4]", "O"):
        p = compile_pattern(smarts)
        assert {frozenset(m) for m in match_pattern(p, mol)} == brute_force(p, mol)


def test_matches_at_anchor():
    p = compile_pattern("[CH3][#6]")
    mol = parse_smiles("CCO")
    assert matches_at(p, mol, 0)
    assert not matches_at(p, mol, 1)


def test_library_shape(library):
    assert len(library) == 40
    assert library.names[0] == "positive_ionizable"
    assert library.names[-1] == "ketone"
    assert len(set(library.names)) == 40


def test_motif_label_examples(library):
    def labels(smiles):
        return dict(zip(library.names, motif_labels(parse_smiles(smiles), library)))

    benzene = labels("c1ccccc1")
    assert benzene["aromatic_ring"] == 1 and benzene["halogen_F"] == 0
    chloro = labels("Clc1ccccc1")
    assert chloro["halogen_Cl"] == 1 and chloro["phenyl"] == 1
    ethanol = labels("CCO")
    assert ethanol["alcohol"] == 1 and ethanol["aromatic_ring"] == 0


def test_prevalence(library):
    idx = library.index("aromatic_ring")
    prev = motif_prevalence([parse_smiles("c1ccccc1"), parse_smiles("CCO")], library)
    assert prev[idx] == 0.5
    same = motif_prevalence([parse_smiles("CC(=O)O")] * 5, library)
    assert set(np.unique(same)) <= {0.0, 1.0}
    with pytest.raises(EmptyCorpus):
        motif_prevalence([], library)


def test_library_text_round_trip(library):
    again = parse_library_text(library.to_text())
    assert again.names == library.names
    assert [p.source_text for p in again.patterns] == [p.source_text for p in library.patterns]
    with pytest.raises(ValueError):
        MotifLibrary.from_pairs([("a", "C"), ("a", "N")])


def test_custom_library_file(tmp_path):
    path = tmp_path / "lib.tsv"
    path.write_text("# custom\nnitrile\tC#N\nfluoro\t[F]\n", encoding="utf-8")
    lib = load_library(path)
    assert lib.names == ("nitrile", "fluoro")
    assert list(motif_labels(parse_smiles("FCC#N"), lib)) == [1, 1]


LIBRARY = load_library()
SMALL = ["CCO", "CC(=O)O", "c1ccccc1", "Clc1ccccc1", "CC#N", "CN(C)C", "C1CC1", "OC(=O)c1ccco1", "CC(=O)NC", "C=CCBr"]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SMALL), st.sampled_from(SMALL))
def test_adding_fragment_keeps_matches(a, b):
    base = parse_smiles(a)
    joined = parse_smiles(f"{a}.{b}")
    for pattern in LIBRARY.patterns:
        before = {frozenset(m) for m in match_pattern(pattern, base)}
        after = {frozenset(m) for m in match_pattern(pattern, joined)}
        assert before <= after
