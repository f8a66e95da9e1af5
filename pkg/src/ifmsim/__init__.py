"""State-vector simulation of interaction-free-measurement gates on dual-rail qubits."""

from .circuits import (
    BellLabel,
    ProtocolOutcome,
    bell_generation,
    bell_measure,
    bell_permutation_operator,
    chi_preparation,
    gc_cnot,
    ghz_generation,
    photon_pair_bell,
)
from .ifm_gate import GateMode, IfmGateConfig, apply_ifm, truth_table
from .interferometer import (
    CascadeParams,
    required_splitters,
    success_probability_approx,
    success_probability_exact,
    sweep,
    transfer_amplitude_exact,
)
from .state_core import (
    AbsorbedRecord,
    OneQubitUnitary,
    QubitDescriptor,
    Species,
    StateVector,
    absorb,
    apply_rotation,
    apply_unitary,
    fidelity,
    measure,
    new_state,
)

__all__ = [
    "absorb",
    "AbsorbedRecord",
    "apply_ifm",
    "apply_rotation",
    "apply_unitary",
    "bell_generation",
    "bell_measure",
    "bell_permutation_operator",
    "BellLabel",
    "CascadeParams",
    "chi_preparation",
    "fidelity",
    "GateMode",
    "gc_cnot",
    "ghz_generation",
    "IfmGateConfig",
    "measure",
    "new_state",
    "OneQubitUnitary",
    "photon_pair_bell",
    "ProtocolOutcome",
    "QubitDescriptor",
    "required_splitters",
    "Species",
    "StateVector",
    "success_probability_approx",
    "success_probability_exact",
    "sweep",
    "transfer_amplitude_exact",
    "truth_table",
]

__version__ = "0.1.0"
