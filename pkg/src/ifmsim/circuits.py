"""Entangling protocols built from beam splitters and IFM gates.

Qubit roles per circuit:

* ``bell_generation``: (positron, electron)
* ``ghz_generation``: (positron, electron, positron)
* ``photon_pair_bell``: (atom, photon, photon) before the atom is measured
* ``chi_preparation``: (positron, electron, positron, electron)
* ``gc_cnot``: input (electron = control, positron = target)

Where a circuit needs the target held when the control's logical value is
0, the gate is wired with ``control_rail=0`` (the control's second rail runs
through the interferometer).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Sequence

import numpy as np

from .ifm_gate import IfmGateConfig, apply_ifm
from .state_core import (
    HADAMARD,
    IDENTITY,
    PAULI_X,
    PAULI_Z,
    OneQubitUnitary,
    QubitDescriptor,
    Species,
    StateVector,
    apply_unitary,
    drop_qubit,
    from_amplitudes,
    measure,
    new_state,
    reorder,
    rotation,
    tensor,
)

_R = 1 / math.sqrt(2)


class BellLabel(str, Enum):
    PHI_PLUS = "PhiPlus"
    PHI_MINUS = "PhiMinus"
    PSI_PLUS = "PsiPlus"
    PSI_MINUS = "PsiMinus"

    @property
    def bits(self) -> tuple[int, int]:
        """Classical ``(x, z)`` bits used by the teleportation corrections."""
        return _BELL_BITS[self]

    @property
    def is_psi(self) -> bool:
        return self in (BellLabel.PSI_PLUS, BellLabel.PSI_MINUS)


_BELL_BITS = {
    BellLabel.PHI_PLUS: (0, 0),
    BellLabel.PHI_MINUS: (0, 1),
    BellLabel.PSI_PLUS: (1, 0),
    BellLabel.PSI_MINUS: (1, 1),
}

# amplitudes on |00>, |01>, |10>, |11>
BELL_VECTORS = {
    BellLabel.PHI_PLUS: (_R, 0, 0, _R),
    BellLabel.PHI_MINUS: (_R, 0, 0, -_R),
    BellLabel.PSI_PLUS: (0, _R, _R, 0),
    BellLabel.PSI_MINUS: (0, _R, -_R, 0),
}

PAIR_REGISTER = (QubitDescriptor(Species.POSITRON, "e+"), QubitDescriptor(Species.ELECTRON, "e-"))
CNOT_INPUT_REGISTER = (
    QubitDescriptor(Species.ELECTRON, "in-control"),
    QubitDescriptor(Species.POSITRON, "in-target"),
)


def bell_state(label: BellLabel, register: Sequence[QubitDescriptor] = PAIR_REGISTER) -> StateVector:
    v = BELL_VECTORS[BellLabel(label)]
    return from_amplitudes(register, {(0, 0): v[0], (0, 1): v[1], (1, 0): v[2], (1, 1): v[3]})


@dataclass
class ProtocolOutcome:
    """Classical record of one protocol run.

    ``success`` is only meaningful when the simulation knows the ground
    truth; it is ``None`` otherwise.
    """

    label: BellLabel | None = None
    classical_bits: tuple[int, ...] = ()
    heralds: list[str] = field(default_factory=list)
    corrections: list[str] = field(default_factory=list)
    success: bool | None = None
    guessed: bool = False
    truth: BellLabel | None = None
    posterior: StateVector | None = None
    measurements: tuple["ProtocolOutcome", ...] = ()


# --------------------------------------------------------------------------
# state generation


def bell_generation(config: IfmGateConfig = IfmGateConfig(), label: BellLabel = BellLabel.PHI_PLUS) -> StateVector:
    """Entangle a positron and an electron with one IFM gate.

    The circuit produces ``Phi+``; the other Bell states are reached with
    local rail swaps and phase shifts afterwards.
    """
    state = new_state(PAIR_REGISTER, (0, 0))
    state = apply_unitary(state, 0, HADAMARD)
    state = apply_ifm(state, 0, 1, config, control_rail=0)
    label = BellLabel(label)
    if label in (BellLabel.PHI_MINUS, BellLabel.PSI_MINUS):
        state = apply_unitary(state, 0, PAULI_Z)
    if label.is_psi:
        state = apply_unitary(state, 1, PAULI_X)
    return state


GHZ_REGISTER = (
    QubitDescriptor(Species.POSITRON, "e+1"),
    QubitDescriptor(Species.ELECTRON, "e-"),
    QubitDescriptor(Species.POSITRON, "e+2"),
)


def ghz_generation(config: IfmGateConfig = IfmGateConfig()) -> StateVector:
    """Three-particle GHZ state (positron, electron, positron).

    The second gate uses the electron as the absorbing object for the
    second positron, since only an electron can annihilate a positron.
    """
    state = new_state(GHZ_REGISTER, (0, 0, 0))
    state = apply_unitary(state, 0, HADAMARD)
    state = apply_ifm(state, 0, 1, config, control_rail=0)
    return apply_ifm(state, 1, 2, config, control_rail=0)


def ghz_state() -> StateVector:
    return from_amplitudes(GHZ_REGISTER, {(0, 0, 0): _R, (1, 1, 1): _R})


PHOTON_REGISTER = (
    QubitDescriptor(Species.ATOM, "atom"),
    QubitDescriptor(Species.PHOTON, "photon-1"),
    QubitDescriptor(Species.PHOTON, "photon-2"),
)

# the atom's level rotation is modeled by the same matrix as the rail Hadamard
ATOM_HADAMARD = HADAMARD


def photon_pair_bell(config: IfmGateConfig, rng: np.random.Generator):
    """Entangle two photons through a three-level atom, then measure the atom.

    Atom logical 0 is the transparent excited level, 1 the absorbing ground
    level. Returns ``(label, photons)``: ``Phi+`` for atom outcome 0,
    ``Phi-`` for outcome 1, and ``None`` if the measurement found a photon
    absorbed (``photons`` then carries only the absorption record).
    """
    state = new_state(PHOTON_REGISTER, (0, 0, 0))
    state = apply_unitary(state, 0, ATOM_HADAMARD)
    state = apply_ifm(state, 0, 1, config, control_rail=1)
    state = apply_ifm(state, 0, 2, config, control_rail=1)
    state = apply_unitary(state, 0, ATOM_HADAMARD)
    outcome, post = measure(state, 0, rng)
    if outcome not in (0, 1):
        return None, StateVector(PHOTON_REGISTER[1:], {}, post.absorbed)
    photons = drop_qubit(post, 0)
    return (BellLabel.PHI_PLUS if outcome == 0 else BellLabel.PHI_MINUS), photons


CHI_REGISTER = (
    QubitDescriptor(Species.POSITRON, "chi1"),
    QubitDescriptor(Species.ELECTRON, "chi2"),
    QubitDescriptor(Species.POSITRON, "chi3"),
    QubitDescriptor(Species.ELECTRON, "chi4"),
)


def chi_state() -> StateVector:
    """``(1/2)[(|00>+|11>)|00> + (|01>+|10>)|11>]``."""
    return from_amplitudes(
        CHI_REGISTER,
        {(0, 0, 0, 0): 0.5, (1, 1, 0, 0): 0.5, (0, 1, 1, 1): 0.5, (1, 0, 1, 1): 0.5},
    )


@lru_cache(maxsize=32)
def chi_preparation(config: IfmGateConfig = IfmGateConfig()) -> StateVector:
    """Four-qubit resource state for the teleported CNOT.

    GHZ, a Hadamard on each of its three qubits, then a fresh electron in
    ``|0>`` that an IFM gate flips whenever the third qubit reads 1.
    """
    state = ghz_generation(config)
    for q in range(3):
        state = apply_unitary(state, q, HADAMARD)
    state = StateVector(CHI_REGISTER[:3], state.amplitudes, state.absorbed)
    state = tensor(state, new_state(CHI_REGISTER[3:], (0,)))
    return apply_ifm(state, 2, 3, config, control_rail=0)


# --------------------------------------------------------------------------
# Bell measurement


@dataclass(frozen=True)
class LocalOperator:
    """Product ``first (x) second`` of one-qubit unitaries."""

    first: OneQubitUnitary
    second: OneQubitUnitary

    @property
    def matrix(self) -> np.ndarray:
        return np.kron(self.first.matrix, self.second.matrix)

    def __matmul__(self, other: "LocalOperator") -> "LocalOperator":
        return LocalOperator(self.first @ other.first, self.second @ other.second)

    def apply(self, state: StateVector, i: int, j: int) -> StateVector:
        state = apply_unitary(state, i, self.first)
        return apply_unitary(state, j, self.second)


_OP_A = LocalOperator(rotation("y", math.pi), IDENTITY)
_OP_B = LocalOperator(rotation("y", math.pi / 2), rotation("y", math.pi / 2))
_OP_C = LocalOperator(rotation("x", math.pi / 2), rotation("x", math.pi / 2))

_PERMUTATION_OPERATORS = {
    1: LocalOperator(IDENTITY, IDENTITY),
    2: _OP_A,
    3: _OP_B,
    4: _OP_C,
    5: _OP_B @ _OP_A,
    6: _OP_C @ _OP_A,
}

_P, _M, _S, _T = BellLabel.PHI_PLUS, BellLabel.PHI_MINUS, BellLabel.PSI_PLUS, BellLabel.PSI_MINUS
# image of (Phi+, Phi-, Psi+, Psi-) under each operator, phases dropped
PERMUTATION_TABLE = {
    1: (_P, _M, _S, _T),
    2: (_T, _S, _M, _P),
    3: (_P, _S, _M, _T),
    4: (_S, _M, _P, _T),
    5: (_T, _M, _S, _P),
    6: (_T, _P, _M, _S),
}
_ORDER = (_P, _M, _S, _T)


def bell_permutation_operator(k: int) -> LocalOperator:
    if k not in _PERMUTATION_OPERATORS:
        raise ValueError(f"permutation index must be in 1..6, got {k}")
    return _PERMUTATION_OPERATORS[k]


def permuted_label(k: int, label: BellLabel) -> BellLabel:
    return PERMUTATION_TABLE[k][_ORDER.index(label)]


def unpermuted_label(k: int, label: BellLabel) -> BellLabel:
    return _ORDER[PERMUTATION_TABLE[k].index(label)]


def _check_pair(state: StateVector, positron_index: int, electron_index: int) -> None:
    n = state.n_qubits
    if not (0 <= positron_index < n and 0 <= electron_index < n) or positron_index == electron_index:
        raise ValueError(f"invalid pair ({positron_index}, {electron_index}) for {n} qubits")
    if state.register[positron_index].species is not Species.POSITRON:
        raise ValueError(f"qubit {positron_index} is a {state.register[positron_index].species.value}, not a positron")
    if state.register[electron_index].species is not Species.ELECTRON:
        raise ValueError(f"qubit {electron_index} is a {state.register[electron_index].species.value}, not an electron")


def _survives(state: StateVector, rng: np.random.Generator):
    """Decide whether earlier absorption already destroyed this run.

    Returns ``(normalized coherent state or None, heralds)``.
    """
    lost = state.absorbed_mass()
    if lost == 0.0:
        return state, []
    u = rng.random() * state.total_probability()
    acc = 0.0
    for rec in state.absorbed:
        acc += rec.mass
        if u < acc:
            return None, [f"{rec.tag.value}:{rec.event}"]
    scale = 1 / math.sqrt(state.coherent_norm())
    amps = {c: a * scale for c, a in state.amplitudes.items()}
    return StateVector(state.register, amps), []


def bell_projection(state: StateVector, positron_index: int, electron_index: int):
    """Split ``state`` by the Bell label of one pair.

    Returns ``{label: (probability, rest)}`` where ``rest`` is the normalized
    state of the remaining qubits (``None`` when nothing remains or the
    label has zero weight).
    """
    keep = [q for q in range(state.n_qubits) if q not in (positron_index, electron_index)]
    pieces: dict[BellLabel, dict] = {lab: {} for lab in BellLabel}
    for cfg, a in state.amplitudes.items():
        pair = (cfg[positron_index], cfg[electron_index])
        rest = tuple(cfg[q] for q in keep)
        for lab, vec in BELL_VECTORS.items():
            coeff = vec[2 * pair[0] + pair[1]]
            if coeff:
                d = pieces[lab]
                d[rest] = d.get(rest, 0j) + coeff * a
    register = tuple(state.register[q] for q in keep)
    result = {}
    for lab, amps in pieces.items():
        p = math.fsum(abs(a) ** 2 for a in amps.values())
        rest = None
        if p > 0.0 and keep:
            scale = 1 / math.sqrt(p)
            rest = StateVector(register, {c: a * scale for c, a in amps.items() if abs(a) > 0.0})
        result[lab] = (p, rest)
    return result


def discriminate(
    pair: StateVector, config: IfmGateConfig, rng: np.random.Generator
) -> tuple[BellLabel, bool, list[str]]:
    """Run the IFM Bell-measurement circuit on a (positron, electron) pair.

    The electron enters the gate's ``|1>`` port next to the positron's
    object rail. An electron found at the ``|0>`` output rules out
    annihilation, so the pair was a Psi state and a Hadamard on the positron
    tells the sign. Anything else (electron on ``|1>`` or annihilated) means
    Phi, and the sign is a coin toss.

    Returns ``(label, guessed, heralds)``.
    """
    state = apply_ifm(pair, 0, 1, config, control_rail=1)
    b_out, state = measure(state, 1, rng)
    if b_out == 0:
        state = apply_unitary(state, 0, HADAMARD)
        sign, _ = measure(state, 0, rng)
        # the empty-object cascade maps |1> -> -|0>, which sends Psi+ to positron |1>
        return (BellLabel.PSI_PLUS if sign == 1 else BellLabel.PSI_MINUS), False, []
    heralds = [] if b_out == 1 else [f"{state.absorbed[0].tag.value}:{b_out}"]
    heralds.append("guessed")
    label = BellLabel.PHI_PLUS if rng.random() < 0.5 else BellLabel.PHI_MINUS
    return label, True, heralds


def bell_measure(
    state: StateVector,
    positron_index: int,
    electron_index: int,
    config: IfmGateConfig = IfmGateConfig(),
    rng: np.random.Generator | None = None,
    permutation: int | None = None,
) -> ProtocolOutcome:
    """Bell measurement of one (positron, electron) pair with the IFM gate.

    The simulator first resolves which Bell state the pair is in (the ground
    truth, drawn from the Born rule), then runs the physical discrimination
    circuit on that Bell state after the optional Bell-basis permutation
    ``permutation`` (1..6). The reported label is mapped back through the
    permutation. ``posterior`` holds the remaining qubits, conditioned on the
    true label.
    """
    _check_pair(state, positron_index, electron_index)
    rng = np.random.default_rng() if rng is None else rng
    if permutation is not None:
        bell_permutation_operator(permutation)

    state, heralds = _survives(state, rng)
    if state is None:
        return ProtocolOutcome(heralds=heralds, success=False)

    split = bell_projection(state, positron_index, electron_index)
    labels = list(BellLabel)
    weights = np.array([split[lab][0] for lab in labels])
    truth = labels[int(rng.choice(4, p=weights / weights.sum()))]

    pair = bell_state(truth, (state.register[positron_index], state.register[electron_index]))
    if permutation is not None:
        pair = bell_permutation_operator(permutation).apply(pair, 0, 1)
    seen, guessed, circuit_heralds = discriminate(pair, config, rng)
    label = unpermuted_label(permutation, seen) if permutation is not None else seen

    return ProtocolOutcome(
        label=label,
        classical_bits=label.bits,
        heralds=heralds + circuit_heralds,
        success=label is truth,
        guessed=guessed,
        truth=truth,
        posterior=split[truth][1],
    )


# --------------------------------------------------------------------------
# teleported CNOT


def cnot_reference(state: StateVector) -> StateVector:
    """Exact CNOT on a two-qubit state (qubit 0 controls qubit 1)."""
    amps = {(c, t ^ c): a for (c, t), a in state.amplitudes.items()}
    return StateVector(state.register, amps)


def _apply_pauli_frame(state: StateVector, x1: int, z1: int, x2: int, z2: int):
    """Undo the Pauli errors that the two teleportations push through the CNOT."""
    corrections = []
    for qubit, x, z, name in ((0, x1, z1 ^ z2, "c"), (1, x1 ^ x2, z2, "t")):
        if x:
            state = apply_unitary(state, qubit, PAULI_X)
            corrections.append(f"X_{name}")
        if z:
            state = apply_unitary(state, qubit, PAULI_Z)
            corrections.append(f"Z_{name}")
    return state, corrections


def gc_cnot(
    input_state: StateVector,
    config: IfmGateConfig = IfmGateConfig(),
    rng: np.random.Generator | None = None,
    permutations: tuple[int | None, int | None] | None = None,
):
    """CNOT by gate teleportation through the chi resource state.

    The control input (an electron) is Bell-measured with chi's third qubit
    and the target input (a positron) with chi's second; chi's fourth and
    first qubits carry the control and target outputs. Each Bell measurement
    uses a permutation drawn uniformly from 1..6 unless ``permutations``
    fixes them.

    Returns ``(output, outcome)``. ``output`` is ``None`` when absorption
    during the chi preparation destroyed the resource.
    """
    if input_state.species != tuple(q.species for q in CNOT_INPUT_REGISTER):
        raise ValueError("gc_cnot input must be an (electron, positron) register")
    if input_state.absorbed:
        raise ValueError("gc_cnot input must be a pure state")
    rng = np.random.default_rng() if rng is None else rng
    if permutations is None:
        permutations = (int(rng.integers(1, 7)), int(rng.integers(1, 7)))

    chi, heralds = _survives(chi_preparation(config), rng)
    if chi is None:
        return None, ProtocolOutcome(heralds=heralds, success=False)

    # 0 in_c, 1 in_t, 2 chi1, 3 chi2, 4 chi3, 5 chi4
    joint = tensor(input_state, chi)
    first = bell_measure(joint, 4, 0, config, rng, permutations[0])
    # remaining: in_t, chi1, chi2, chi4
    second = bell_measure(first.posterior, 0, 2, config, rng, permutations[1])
    # remaining: chi1, chi4 -> reorder to (control, target)
    out = reorder(second.posterior, (1, 0))
    x1, z1 = first.label.bits
    x2, z2 = second.label.bits
    out, corrections = _apply_pauli_frame(out, x1, z1, x2, z2)

    outcome = ProtocolOutcome(
        classical_bits=(x1, z1, x2, z2),
        heralds=first.heralds + second.heralds,
        corrections=corrections,
        success=bool(first.success and second.success),
        guessed=first.guessed or second.guessed,
        measurements=(first, second),
        posterior=out,
    )
    return out, outcome


def random_pure_state(register: Sequence[QubitDescriptor], rng: np.random.Generator) -> StateVector:
    """Haar-random pure state on ``register``."""
    n = len(register)
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    v /= np.linalg.norm(v)
    amps = {tuple(int(b) for b in np.binary_repr(i, n)): complex(v[i]) for i in range(2**n)}
    return from_amplitudes(register, amps)
