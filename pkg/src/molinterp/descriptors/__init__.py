"""Reward signals and QED computed from molecular graphs."""

from .physchem import (
    complexity,
    crippen_contributions,
    crippen_logp,
    crippen_types,
    is_rotatable,
    lipinski_hba,
    lipinski_hbd,
    molecular_weight,
    ring_count,
    rotatable_bonds,
    tpsa,
    tpsa_contributions,
)
from .qed import (
    DegenerateDesirability,
    QedInputs,
    ads,
    desirabilities,
    load_alerts,
    qed,
    qed_from_desirabilities,
    qed_inputs,
    weight_set,
)
from .record import (
    SIGNALS,
    DescriptorRecord,
    RewardMatrix,
    compute_descriptors,
    read_descriptor_csv,
    records_to_matrix,
    reward_matrix,
    write_descriptor_csv,
)

__all__ = [
    "SIGNALS",
    "DegenerateDesirability",
    "DescriptorRecord",
    "QedInputs",
    "RewardMatrix",
    "ads",
    "complexity",
    "compute_descriptors",
    "crippen_contributions",
    "crippen_logp",
    "crippen_types",
    "desirabilities",
    "is_rotatable",
    "lipinski_hba",
    "lipinski_hbd",
    "load_alerts",
    "molecular_weight",
    "qed",
    "qed_from_desirabilities",
    "qed_inputs",
    "read_descriptor_csv",
    "records_to_matrix",
    "reward_matrix",
    "ring_count",
    "rotatable_bonds",
    "tpsa",
    "tpsa_contributions",
    "weight_set",
]
