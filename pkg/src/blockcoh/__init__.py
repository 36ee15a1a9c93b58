"""Coherence with respect to block structures: measures, conversions, gates and powers."""

from .channels import (
    KrausChannel,
    apply,
    block_dephasing_channel,
    classify_block_incoherent,
    is_dephasing_covariant,
    kraus_channel,
    unitary_channel,
    validate_cptp,
)
from .conversion import build_conversion_channel, majorizes, necessity_certificate, solve_gammas, verify_conversion
from .core import (
    BlockStructure,
    PureBlockState,
    block_dephase,
    block_state,
    contiguous_structure,
    decompose,
    haar_random_unitary,
    make_block_structure,
    maximally_coherent_state,
    product_structure,
    uniform_structure,
)
from .gates import block_hadamard, block_rotation, build_gate_protocol, run_gate_protocol
from .kcoherence import ck_certificate, conjecture_probe, enumerate_structures, restricted_bell
from .measures import c_entropy, c_l1, coherence_rank
from .optimize import OptimizerOptions
from .powers import bcp, bcp_random_unitary, bcp_unitary, bdp, bdp_unitary, random_unitary_channel

__version__ = "0.1.0"
