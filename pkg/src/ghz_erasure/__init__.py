"""Dense state-vector simulation of a GHZ-block quantum erasure-correcting code."""

from .channel import (
    CorruptionModel,
    ErasureEvent,
    apply_erasure,
    erasure_flags,
    parse_model,
    random_leak_unitary,
)
from .codec import (
    CodeLayout,
    ErasureFlags,
    build_hadamard_layer,
    build_u_dec,
    build_u_enc,
    build_u_ghz,
    build_u_rec,
    build_u_red,
    circuit_from_text,
    circuit_to_text,
    encode,
    extract_message,
    restore,
)
from .errors import (
    BudgetError,
    CapacityError,
    DimensionMismatchError,
    GHZErasureError,
    InvalidFlagsError,
    InvalidGateError,
    InvalidPatternError,
    InvalidSubsetError,
)
from .oracle import (
    Report,
    analytic_encoded_state,
    enumerate_patterns,
    sweep_all_patterns,
    verify_encoding_table,
)
from .statevector import (
    CNOT,
    CZ,
    TOFFOLI,
    DensityMatrix,
    Gate,
    GateSequence,
    H,
    State,
    apply_gate,
    apply_sequence,
    basis_state,
    fidelity,
    inner_product,
    new_zero_state,
    random_state,
    reduced_density_matrix,
    tensor,
)

__version__ = "0.1.0"
