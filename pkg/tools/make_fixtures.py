"""Regenerate descriptor oracle fixtures from a reference cheminformatics toolkit.

Run once, offline, with an interpreter that has RDKit installed:

    python tools/make_fixtures.py

The package itself never imports RDKit; tests compare against the JSON this
script writes to tests/fixtures/descriptor_oracle.json.
"""

from __future__ import annotations

import json
from pathlib import Path

from rdkit import Chem, rdBase
from rdkit.Chem import Crippen, Descriptors, QED, rdMolDescriptors

CORPUS = [
    ("benzene", "c1ccccc1"),
    ("ethanol", "CCO"),
    ("chlorobenzene", "Clc1ccccc1"),
    ("bromobenzene", "Brc1ccccc1"),
    ("aspirin", "CC(=O)Oc1ccccc1C(=O)O"),
    ("caffeine", "Cn1cnc2c1c(=O)n(C)c(=O)n2C"),
    ("paracetamol", "CC(=O)Nc1ccc(O)cc1"),
    ("ibuprofen", "CC(C)Cc1ccc(C(C)C(=O)O)cc1"),
    ("naproxen", "COc1ccc2cc(C(C)C(=O)O)ccc2c1"),
    ("diclofenac", "OC(=O)Cc1ccccc1Nc1c(Cl)cccc1Cl"),
    ("metformin", "CN(C)C(=N)NC(=N)N"),
    ("nicotine", "CN1CCCC1c1cccnc1"),
    ("lidocaine", "CCN(CC)CC(=O)Nc1c(C)cccc1C"),
    ("procaine", "CCN(CC)CCOC(=O)c1ccc(N)cc1"),
    ("sulfamethoxazole", "Cc1cc(NS(=O)(=O)c2ccc(N)cc2)no1"),
    ("fluoxetine", "CNCCC(Oc1ccc(C(F)(F)F)cc1)c1ccccc1"),
    ("haloperidol", "OC1(CCN(CCCC(=O)c2ccc(F)cc2)CC1)c1ccc(Cl)cc1"),
    ("diazepam", "CN1C(=O)CN=C(c2ccccc2)c2cc(Cl)ccc21"),
    ("nitrobenzene", "O=[N+]([O-])c1ccccc1"),
    ("metronidazole", "Cc1ncc([N+](=O)[O-])n1CCO"),
    ("indole", "c1ccc2[nH]ccc2c1"),
    ("tryptamine", "NCCc1c[nH]c2ccccc12"),
    ("thiophene_acid", "OC(=O)c1cccs1"),
    ("furfural", "O=Cc1ccco1"),
    ("pyridine", "c1ccncc1"),
    ("imidazole", "c1c[nH]cn1"),
    ("quinoline", "c1ccc2ncccc2c1"),
    ("acetonitrile", "CC#N"),
    ("phenylacetylene", "C#Cc1ccccc1"),
    ("cyclohexanol", "OC1CCCCC1"),
    ("cyclopropylamine", "NC1CC1"),
    ("morpholine", "C1COCCN1"),
    ("piperazine_amide", "CC(=O)N1CCNCC1"),
    ("ethyl_acetate", "CCOC(=O)C"),
    ("benzyl_acetate", "CC(=O)OCc1ccccc1"),
    ("dmpa", "CCC(=O)N(C)C"),
    ("trifluorobutane", "CCCC(F)(F)F"),
    ("trichloropropane", "CCC(Cl)(Cl)Cl"),
    ("tert_butylbenzene", "CC(C)(C)c1ccccc1"),
    ("dimethyl_sulfone", "CS(C)(=O)=O"),
    ("thioanisole", "CSc1ccccc1"),
    ("thiophenol", "Sc1ccccc1"),
    ("tetramethylammonium", "C[N+](C)(C)C"),
    ("acetate", "CC(=O)[O-]"),
    ("methylammonium", "C[NH3+]"),
    ("triphenylphosphine", "c1ccc(P(c2ccccc2)c2ccccc2)cc1"),
    ("trimethyl_phosphate", "COP(=O)(OC)OC"),
    ("aziridine", "C1CN1"),
    ("oxirane_methanol", "OCC1CO1"),
    ("methyl_azide", "CN=[N+]=[N-]"),
    ("isocyanic_acid", "N=C=O"),
    ("allyl_alcohol", "C=CCO"),
    ("styrene", "C=Cc1ccccc1"),
    ("hydroxylamine", "CNO"),
    ("peroxide", "CCOO"),
    ("benzamide", "NC(=O)c1ccccc1"),
    ("urea", "NC(N)=O"),
    ("guanidinium", "NC(N)=[NH2+]"),
    ("pyrrolidone", "O=C1CCCN1"),
    ("iodobenzene", "Ic1ccccc1"),
    ("boronic_acid", "OB(O)c1ccccc1"),
    ("biphenyl", "c1ccc(-c2ccccc2)cc1"),
    ("tetralin", "c1ccc2c(c1)CCCC2"),
    ("oxazole", "c1cocn1"),
    ("thiazole_amine", "Nc1nccs1"),
    ("pyridone", "O=c1cccc[nH]1"),
    ("ketone", "CCC(=O)CC"),
    ("acetophenone", "CC(=O)c1ccccc1"),
    ("pentane", "CCCCC"),
    ("neopentane", "CC(C)(C)C"),
]


def fingerprint(mol) -> dict:
    props = QED.properties(mol)
    props0 = props._replace(ALERTS=0)
    return {
        "mw": Descriptors.MolWt(mol),
        "tpsa": rdMolDescriptors.CalcTPSA(mol),
        "tpsa_sp": rdMolDescriptors.CalcTPSA(mol, includeSandP=True),
        "logp": Crippen.MolLogP(mol),
        "lipinski_hbd": rdMolDescriptors.CalcNumLipinskiHBD(mol),
        "lipinski_hba": rdMolDescriptors.CalcNumLipinskiHBA(mol),
        "rotb": rdMolDescriptors.CalcNumRotatableBonds(mol, rdMolDescriptors.NumRotatableBondsOptions.Strict),
        "rings": rdMolDescriptors.CalcNumRings(mol),
        "aromatic_atoms": [a.GetIsAromatic() for a in mol.GetAtoms()],
        "h_counts": [a.GetTotalNumHs() for a in mol.GetAtoms()],
        "qed_props": list(props0),
        "qed_mean": QED.qed(mol, qedProperties=props0),
        "qed_unit": QED.qed(mol, w=QED.WEIGHT_NONE, qedProperties=props0),
    }


MOTIF_FILE = Path(__file__).resolve().parents[1] / "src" / "molinterp" / "smarts" / "data" / "motifs.tsv"


def motif_queries() -> list[tuple[str, object]]:
    out = []
    for line in MOTIF_FILE.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        name, smarts = line.split("\t")[:2]
        q = Chem.MolFromSmarts(smarts)
        assert q is not None, smarts
        out.append((name, q))
    return out


def motif_matches(mol, queries) -> dict:
    """Unique atom sets per motif, each sorted, list sorted."""
    return {name: sorted(sorted(m) for m in mol.GetSubstructMatches(q, uniquify=True, maxMatches=100000)) for name, q in queries}


def main() -> None:
    out = {"toolkit_version": rdBase.rdkitVersion, "molecules": []}
    queries = motif_queries()
    for name, smi in CORPUS:
        mol = Chem.MolFromSmiles(smi)
        assert mol is not None, smi
        out["molecules"].append({"name": name, "smiles": smi, **fingerprint(mol), "motif_matches": motif_matches(mol, queries)})
    dest = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "descriptor_oracle.json"
    dest.write_text(json.dumps(out, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {len(out['molecules'])} molecules to {dest}")


if __name__ == "__main__":
    main()
