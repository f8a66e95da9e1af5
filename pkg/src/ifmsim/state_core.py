"""Sparse state vectors over dual-rail qubits with an absorption ledger.

A dual-rail qubit is one particle sitting on exactly one of two rails, so a
register of ``n`` qubits is described by amplitudes over ``n``-bit logical
configurations. Amplitude that leaves the logical subspace because a particle
was absorbed (or annihilated) is booked as classical probability mass in the
``absorbed`` ledger and never interferes again.

All operations return new :class:`StateVector` values; nothing is mutated.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

# Accumulated round-off allowed before a state is considered unnormalized.
NORM_TOL = 1e-9
UNITARY_TOL = 1e-9
# Amplitudes whose squared modulus falls below this are dropped.
_PRUNE = 1e-30

Config = tuple[int, ...]


class Species(str, Enum):
    POSITRON = "positron"
    ELECTRON = "electron"
    PHOTON = "photon"
    ATOM = "atom"


class AbsorptionTag(str, Enum):
    GAMMA = "gamma"
    PHOTON_ABSORBED = "photon_absorbed"


@dataclass(frozen=True)
class QubitDescriptor:
    species: Species
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "species", Species(self.species))


@dataclass(frozen=True)
class AbsorbedRecord:
    """Probability mass that left the coherent state at one gate application."""

    mass: float
    event: str
    tag: AbsorptionTag = AbsorptionTag.GAMMA

    def __post_init__(self):
        if not self.mass >= 0.0:
            raise ValueError(f"absorbed mass must be non-negative, got {self.mass}")
        object.__setattr__(self, "tag", AbsorptionTag(self.tag))


@dataclass(frozen=True)
class OneQubitUnitary:
    """A 2x2 unitary acting across the two rails of one qubit.

    Entries are stored as Python complex numbers (row-major) because the
    sparse update loop is faster with scalars than with numpy indexing.
    """

    u00: complex
    u01: complex
    u10: complex
    u11: complex

    def __post_init__(self):
        m = self.matrix
        dev = np.max(np.abs(m.conj().T @ m - np.eye(2)))
        if not dev <= UNITARY_TOL:
            raise ValueError(f"matrix is not unitary (max |U^dag U - I| = {dev:.3g})")

    @classmethod
    def from_matrix(cls, matrix) -> "OneQubitUnitary":
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.u00, self.u01], [self.u10, self.u11]], dtype=complex)

    def __matmul__(self, other: "OneQubitUnitary") -> "OneQubitUnitary":
        return OneQubitUnitary.from_matrix(self.matrix @ other.matrix)


def beam_splitter(theta: float) -> OneQubitUnitary:
    """Real beam splitter: |0> -> cos|0> + sin|1>, |1> -> -sin|0> + cos|1>."""
    c, s = math.cos(theta), math.sin(theta)
    return OneQubitUnitary(c, -s, s, c)


def rotation(axis: str, theta: float) -> OneQubitUnitary:
    """``exp(-i theta/2 sigma_axis)`` for ``axis`` in x, y, z.

    ``theta`` must lie in ``[0, 4*pi)``.
    """
    if not 0.0 <= theta < 4.0 * math.pi:
        raise ValueError(f"rotation angle must lie in [0, 4pi), got {theta}")
    try:
        sigma = PAULI[axis]
    except KeyError:
        raise ValueError(f"unknown rotation axis {axis!r}; expected x, y or z") from None
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return OneQubitUnitary(
        c - 1j * s * sigma.u00,
        -1j * s * sigma.u01,
        -1j * s * sigma.u10,
        c - 1j * s * sigma.u11,
    )


IDENTITY = OneQubitUnitary(1, 0, 0, 1)
PAULI_X = OneQubitUnitary(0, 1, 1, 0)
PAULI_Y = OneQubitUnitary(0, -1j, 1j, 0)
PAULI_Z = OneQubitUnitary(1, 0, 0, -1)
PAULI = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}
_R = 1 / math.sqrt(2)
HADAMARD = OneQubitUnitary(_R, _R, _R, -_R)


@dataclass(frozen=True)
class StateVector:
    register: tuple[QubitDescriptor, ...]
    amplitudes: Mapping[Config, complex]
    absorbed: tuple[AbsorbedRecord, ...] = field(default=())

    @property
    def n_qubits(self) -> int:
        return len(self.register)

    @property
    def species(self) -> tuple[Species, ...]:
        return tuple(q.species for q in self.register)

    def coherent_norm(self) -> float:
        """Squared norm of the coherent (non-absorbed) part."""
        return math.fsum(abs(a) ** 2 for a in self.amplitudes.values())

    def absorbed_mass(self) -> float:
        return math.fsum(r.mass for r in self.absorbed)

    def total_probability(self) -> float:
        return self.coherent_norm() + self.absorbed_mass()

    def amplitude(self, *bits: int) -> complex:
        return self.amplitudes.get(tuple(bits), 0j)

    def probabilities(self) -> dict[Config, float]:
        return {c: abs(a) ** 2 for c, a in self.amplitudes.items()}

    def to_dense(self) -> np.ndarray:
        """Amplitude vector of length 2**n, qubit 0 as the most significant bit."""
        vec = np.zeros(2 ** self.n_qubits, dtype=complex)
        for cfg, a in self.amplitudes.items():
            vec[_index(cfg)] = a
        return vec

    def __str__(self) -> str:
        terms = [
            f"({a.real:+.6f}{a.imag:+.6f}j)|{''.join(map(str, c))}>"
            for c, a in sorted(self.amplitudes.items())
        ]
        ledger = f" + absorbed {self.absorbed_mass():.6f}" if self.absorbed else ""
        return " ".join(terms) + ledger


def _index(cfg: Config) -> int:
    i = 0
    for b in cfg:
        i = (i << 1) | b
    return i


def _check_index(state: StateVector, qubit_index: int) -> None:
    if not 0 <= qubit_index < state.n_qubits:
        raise IndexError(f"qubit index {qubit_index} out of range for {state.n_qubits} qubits")


def _pruned(amps: dict[Config, complex]) -> dict[Config, complex]:
    return {c: a for c, a in amps.items() if abs(a) ** 2 > _PRUNE}


def with_amplitudes(
    state: StateVector,
    amplitudes: Mapping[Config, complex],
    new_records: Iterable[AbsorbedRecord] = (),
) -> StateVector:
    """Copy of ``state`` with new coherent amplitudes and extra ledger records."""
    return StateVector(state.register, _pruned(dict(amplitudes)), state.absorbed + tuple(new_records))


def new_state(descriptors: Sequence[QubitDescriptor], bits: Sequence[int]) -> StateVector:
    """Basis state with amplitude one on ``bits``."""
    if len(descriptors) == 0:
        raise ValueError("a register needs at least one qubit")
    if len(bits) != len(descriptors):
        raise ValueError(f"got {len(bits)} bits for {len(descriptors)} qubits")
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"logical bits must be 0 or 1, got {tuple(bits)}")
    return StateVector(tuple(descriptors), {tuple(int(b) for b in bits): 1 + 0j})


def from_amplitudes(
    descriptors: Sequence[QubitDescriptor], amplitudes: Mapping[Sequence[int], complex]
) -> StateVector:
    """Build a normalized pure state from explicit amplitudes."""
    n = len(descriptors)
    amps = {}
    for bits, a in amplitudes.items():
        cfg = tuple(int(b) for b in bits)
        if len(cfg) != n or any(b not in (0, 1) for b in cfg):
            raise ValueError(f"configuration {bits} does not fit a {n}-qubit register")
        amps[cfg] = amps.get(cfg, 0j) + complex(a)
    state = StateVector(tuple(descriptors), _pruned(amps))
    if abs(state.coherent_norm() - 1.0) > NORM_TOL:
        raise ValueError(f"amplitudes are not normalized (norm^2 = {state.coherent_norm()})")
    return state


def apply_unitary(state: StateVector, qubit_index: int, u) -> StateVector:
    """Apply a one-qubit unitary across the two rails of ``qubit_index``."""
    _check_index(state, qubit_index)
    if not isinstance(u, OneQubitUnitary):
        u = OneQubitUnitary.from_matrix(u)
    q = qubit_index
    # column b of u gives the image of logical |b>
    cols = ((u.u00, u.u10), (u.u01, u.u11))
    out: dict[Config, complex] = {}
    for cfg, a in state.amplitudes.items():
        c0, c1 = cols[cfg[q]]
        k0 = cfg[:q] + (0,) + cfg[q + 1 :]
        k1 = cfg[:q] + (1,) + cfg[q + 1 :]
        out[k0] = out.get(k0, 0j) + c0 * a
        out[k1] = out.get(k1, 0j) + c1 * a
    return with_amplitudes(state, out)


def apply_rotation(state: StateVector, qubit_index: int, axis: str, theta: float) -> StateVector:
    return apply_unitary(state, qubit_index, rotation(axis, theta))


def absorb(
    state: StateVector,
    qubit_index: int,
    survival_amplitude: float,
    event: str,
    tag: AbsorptionTag | str = AbsorptionTag.GAMMA,
) -> StateVector:
    """Attenuate every branch with the particle on rail |1> of ``qubit_index``.

    The squared amplitude that is lost goes to a single new ledger record, so
    the total probability is unchanged.
    """
    _check_index(state, qubit_index)
    if not 0.0 <= survival_amplitude <= 1.0:
        raise ValueError(f"survival amplitude must lie in [0, 1], got {survival_amplitude}")
    if survival_amplitude == 1.0:
        return state
    q = qubit_index
    lost = 1.0 - survival_amplitude**2
    out: dict[Config, complex] = {}
    parts = []
    for cfg, a in state.amplitudes.items():
        if cfg[q] == 1:
            parts.append(abs(a) ** 2 * lost)
            out[cfg] = a * survival_amplitude
        else:
            out[cfg] = a
    mass = math.fsum(parts)
    records = (AbsorbedRecord(mass, event, tag),) if mass > 0.0 else ()
    return with_amplitudes(state, out, records)


def measure(state: StateVector, qubit_index: int, rng: np.random.Generator):
    """Measure which rail of ``qubit_index`` holds the particle.

    Absorbed ledger records compete as outcomes too: the return value is
    ``(outcome, posterior)`` where ``outcome`` is 0, 1 or the ``event`` string
    of the ledger record that was drawn. A coherent outcome leaves the
    renormalized surviving branch with an empty ledger; an absorbed outcome
    leaves no coherent amplitude and a single record of unit mass.
    """
    _check_index(state, qubit_index)
    total = state.total_probability()
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalized (total probability {total})")
    if state.coherent_norm() <= _PRUNE:
        raise ValueError("cannot measure a fully absorbed state")

    q = qubit_index
    p = [0.0, 0.0]
    for cfg, a in state.amplitudes.items():
        p[cfg[q]] += abs(a) ** 2
    weights = p + [r.mass for r in state.absorbed]

    u = rng.random() * math.fsum(weights)
    acc = 0.0
    pick = len(weights) - 1
    for i, w in enumerate(weights):
        acc += w
        if u < acc:
            pick = i
            break
    # never land on a zero-weight outcome through round-off at the boundary
    while weights[pick] == 0.0:
        pick -= 1

    if pick < 2:
        scale = 1.0 / math.sqrt(p[pick])
        amps = {c: a * scale for c, a in state.amplitudes.items() if c[q] == pick}
        return pick, StateVector(state.register, amps)
    rec = state.absorbed[pick - 2]
    return rec.event, StateVector(state.register, {}, (AbsorbedRecord(1.0, rec.event, rec.tag),))


def fidelity(state: StateVector, reference: StateVector) -> float:
    """``|<reference|state>|^2`` using only the coherent part of ``state``."""
    if state.species != reference.species:
        raise ValueError(f"register mismatch: {state.species} vs {reference.species}")
    if reference.absorbed:
        raise ValueError("reference state must have an empty absorbed ledger")
    overlap = sum(
        (reference.amplitudes[c].conjugate() * a for c, a in state.amplitudes.items() if c in reference.amplitudes),
        0j,
    )
    return min(1.0, abs(overlap) ** 2)


def tensor(first: StateVector, second: StateVector) -> StateVector:
    """Join two registers; ``second``'s qubits come after ``first``'s."""
    if first.absorbed and second.absorbed:
        raise ValueError("cannot join two states that both carry absorption records")
    amps = {
        c1 + c2: a1 * a2
        for c1, a1 in first.amplitudes.items()
        for c2, a2 in second.amplitudes.items()
    }
    # ledger mass of one factor is weighted by the full norm of the other
    n1, n2 = first.coherent_norm(), second.coherent_norm()
    records = tuple(AbsorbedRecord(r.mass * n2, r.event, r.tag) for r in first.absorbed)
    records += tuple(AbsorbedRecord(r.mass * n1, r.event, r.tag) for r in second.absorbed)
    return StateVector(first.register + second.register, _pruned(amps), records)


def reorder(state: StateVector, order: Sequence[int]) -> StateVector:
    """Permute qubits so that new qubit ``i`` is old qubit ``order[i]``."""
    if sorted(order) != list(range(state.n_qubits)):
        raise ValueError(f"{order} is not a permutation of {state.n_qubits} qubits")
    amps = {tuple(c[i] for i in order): a for c, a in state.amplitudes.items()}
    return StateVector(tuple(state.register[i] for i in order), amps, state.absorbed)


def drop_qubit(state: StateVector, qubit_index: int) -> StateVector:
    """Remove a qubit that is in a definite logical value (e.g. just measured)."""
    _check_index(state, qubit_index)
    q = qubit_index
    values = {c[q] for c in state.amplitudes}
    if len(values) > 1:
        raise ValueError(f"qubit {q} is entangled or in superposition; measure it first")
    amps = {c[:q] + c[q + 1 :]: a for c, a in state.amplitudes.items()}
    return StateVector(state.register[:q] + state.register[q + 1 :], amps, state.absorbed)


def global_phase_between(state: StateVector, reference: StateVector) -> complex:
    """Phase ``e^{i phi}`` with ``state ~ e^{i phi} reference`` (largest overlap term)."""
    overlap = sum(
        (reference.amplitudes[c].conjugate() * a for c, a in state.amplitudes.items() if c in reference.amplitudes),
        0j,
    )
    if abs(overlap) == 0:
        raise ValueError("states are orthogonal")
    return cmath.exp(1j * cmath.phase(overlap))
