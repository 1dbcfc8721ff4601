"""Measurement-only implementation of quantum market tactics.

A dense state-vector simulator (statevec), the phase-tracked Pauli/tactics
algebra (algebra), the measurement gadgets that realize H, T, G, CNOT and
random Pauli tactics (gadgets), classical byproduct bookkeeping and the
correction random walk (pauliframe), a circuit-to-measurement-program
compiler with executor and equivalence checker (compiler), the dealer
dense-coding demonstration (densecoding), and a CLI (cli).
"""

from .algebra import PauliString, Strategy, bloch_vector, conjugate_by, named_gate, pauli_mul, u_z_alpha
from .statevec import (
    MeasurementOutcome,
    StateVector,
    apply_gate,
    equal_up_to_global_phase,
    measure_pauli,
    new_basis_state,
)
from .gadgets import (
    GadgetResult,
    gadget_cnot,
    gadget_sigma,
    gadget_sigma_g,
    gadget_sigma_h,
    gadget_sigma_t,
    measure_g_via_hghgh,
    measure_parity_conjugated,
    measure_xprime_derived,
    predicted_byproduct,
)
from .pauliframe import PauliFrame, WalkRecord, frame_update, push_through, random_walk_cleanup, reduce_word
from .compiler import (
    Circuit,
    MeasurementProgram,
    RunRecord,
    check_equivalence,
    compile_to_measurements,
    execute,
    parse_circuit,
)

__all__ = [
    "PauliString", "Strategy", "bloch_vector", "conjugate_by", "named_gate",
    "pauli_mul", "u_z_alpha", "MeasurementOutcome", "StateVector", "apply_gate",
    "equal_up_to_global_phase", "measure_pauli", "new_basis_state",
    "GadgetResult", "gadget_cnot", "gadget_sigma", "gadget_sigma_g",
    "gadget_sigma_h", "gadget_sigma_t", "measure_g_via_hghgh",
    "measure_parity_conjugated", "measure_xprime_derived", "predicted_byproduct",
    "PauliFrame", "WalkRecord", "frame_update", "push_through",
    "random_walk_cleanup", "reduce_word", "Circuit", "MeasurementProgram",
    "RunRecord", "check_equivalence", "compile_to_measurements", "execute",
    "parse_circuit",
]

__version__ = "0.1.0"
