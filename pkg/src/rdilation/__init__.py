"""Random purification and random dilation constructions over dense Schur-Weyl machinery."""

__version__ = "0.1.0"

from .combinatorics import Partition, character, dimension_table, partitions, standard_tableaux, sym_dim, unitary_dim
from .symrep import Permutation, permutation_action, qft_sn, young_orthogonal_rep
from .schur import SchurTransform, generalized_phase_estimation, schur_transform, unitary_irrep_block, young_projector
from .kronecker import (
    KroneckerTransform,
    cg_coefficient_relation_check,
    controlled_kronecker_gate,
    kronecker_coefficient,
    kronecker_transform,
)
from .channels import (
    Comb,
    DensityOperator,
    Isometry,
    QuantumChannel,
    choi_purification_to_isometry,
    comb_from_channels,
    comb_purify,
    fidelity,
    link_product,
    petz_recovery,
    trace_distance,
)
from .haar_oracle import dilation_average_oracle, purification_average_oracle, twirl_exact, weingarten_table
from .circuits import (
    CircuitReport,
    ParallelSuperchannel,
    lift_isometry_superchannel,
    random_dilation_kronecker,
    random_dilation_superchannel,
    random_dilation_supersuperchannel,
    random_purification_channel,
    verify,
)

__all__ = [
    "CircuitReport",
    "Comb",
    "DensityOperator",
    "Isometry",
    "KroneckerTransform",
    "ParallelSuperchannel",
    "Partition",
    "Permutation",
    "QuantumChannel",
    "SchurTransform",
    "cg_coefficient_relation_check",
    "character",
    "choi_purification_to_isometry",
    "comb_from_channels",
    "comb_purify",
    "controlled_kronecker_gate",
    "dilation_average_oracle",
    "dimension_table",
    "fidelity",
    "generalized_phase_estimation",
    "kronecker_coefficient",
    "kronecker_transform",
    "lift_isometry_superchannel",
    "link_product",
    "partitions",
    "permutation_action",
    "petz_recovery",
    "purification_average_oracle",
    "qft_sn",
    "random_dilation_kronecker",
    "random_dilation_superchannel",
    "random_dilation_supersuperchannel",
    "random_purification_channel",
    "schur_transform",
    "standard_tableaux",
    "sym_dim",
    "trace_distance",
    "twirl_exact",
    "unitary_dim",
    "unitary_irrep_block",
    "verify",
    "weingarten_table",
    "young_orthogonal_rep",
    "young_projector",
]
