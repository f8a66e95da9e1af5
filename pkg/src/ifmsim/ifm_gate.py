"""The interaction-free-measurement (IFM) gate.

A control particle (the absorbing object) either occupies the rail that runs
through the interferometer or it does not. A target particle sent into the
``|0>`` port is rotated by the splitter cascade into ``|1>`` when the object
is absent, and is held in ``|0>`` by the Zeno effect when it is present.

``ideal`` mode is the ``N -> oo``, perfect-absorber limit. ``finite`` mode
steps the actual cascade: absorb, then ``N`` times (split, absorb), where
absorption only happens on branches in which the object is present.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

from .state_core import (
    AbsorptionTag,
    Species,
    StateVector,
    AbsorbedRecord,
    new_state,
    QubitDescriptor,
    with_amplitudes,
)

# which species can absorb (or annihilate with) which
ABSORBS = {
    Species.POSITRON: {Species.ELECTRON},
    Species.ELECTRON: {Species.POSITRON},
    Species.ATOM: {Species.PHOTON},
}


class GateMode(str, Enum):
    IDEAL = "ideal"
    FINITE = "finite"


@dataclass(frozen=True)
class IfmGateConfig:
    mode: GateMode = GateMode.IDEAL
    n_splitters: int | None = None
    eta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mode", GateMode(self.mode))
        if self.mode is GateMode.FINITE:
            if self.n_splitters is None or int(self.n_splitters) != self.n_splitters or self.n_splitters < 1:
                raise ValueError(f"finite mode needs a positive n_splitters, got {self.n_splitters}")
            object.__setattr__(self, "n_splitters", int(self.n_splitters))
        if not 0.0 <= self.eta < 1.0:
            raise ValueError(f"eta must lie in [0, 1), got {self.eta}")

    @classmethod
    def ideal(cls) -> "IfmGateConfig":
        return cls(GateMode.IDEAL)

    @classmethod
    def finite(cls, n_splitters: int, eta: float = 0.0) -> "IfmGateConfig":
        return cls(GateMode.FINITE, n_splitters, eta)


_IDEAL_PRESENT = ((1.0, 0.0), (0.0, 0.0))
_IDEAL_ABSENT = ((0.0, -1.0), (1.0, 0.0))


@lru_cache(maxsize=64)
def cascade_operators(n_splitters: int, eta: float):
    """Target-rail transfer matrices ``(present, absent)`` of the finite cascade.

    Built by pushing both basis vectors through the step sequence one
    splitter at a time, not by matrix powers. ``present`` is non-unitary;
    the norm it removes is the absorbed probability.
    """
    theta = math.pi / (2 * n_splitters)
    c, s = math.cos(theta), math.sin(theta)
    r = math.sqrt(eta)

    def run(v0: float, v1: float, with_object: bool):
        if with_object:
            v1 *= r
        for _ in range(n_splitters):
            v0, v1 = c * v0 - s * v1, s * v0 + c * v1
            if with_object:
                v1 *= r
        return v0, v1

    def columns(with_object: bool):
        a = run(1.0, 0.0, with_object)
        b = run(0.0, 1.0, with_object)
        return ((a[0], b[0]), (a[1], b[1]))

    return columns(True), columns(False)


def _absorption_tag(control: Species) -> AbsorptionTag:
    return AbsorptionTag.PHOTON_ABSORBED if control is Species.ATOM else AbsorptionTag.GAMMA


def check_wiring(state: StateVector, control_index: int, target_index: int) -> None:
    n = state.n_qubits
    for name, i in (("control", control_index), ("target", target_index)):
        if not 0 <= i < n:
            raise IndexError(f"{name} index {i} out of range for {n} qubits")
    if control_index == target_index:
        raise ValueError("control and target must be different qubits")
    control = state.register[control_index].species
    target = state.register[target_index].species
    if target not in ABSORBS.get(control, ()):
        raise ValueError(f"a {control.value} cannot act as the absorbing object for a {target.value}")


def apply_ifm(
    state: StateVector,
    control_index: int,
    target_index: int,
    config: IfmGateConfig = IfmGateConfig(),
    control_rail: int = 1,
    event: str | None = None,
) -> StateVector:
    """Apply the IFM gate.

    ``control_rail`` selects which rail of the control qubit is routed
    through the interferometer: the object counts as present on branches
    where the control's logical value equals ``control_rail``. Branches with
    the object present and the target already on ``|1>`` are absorbed
    outright in ideal mode.

    All absorption from one call lands in a single ledger record.
    """
    check_wiring(state, control_index, target_index)
    if control_rail not in (0, 1):
        raise ValueError(f"control_rail must be 0 or 1, got {control_rail}")
    if config.mode is GateMode.IDEAL:
        present_op, absent_op = _IDEAL_PRESENT, _IDEAL_ABSENT
    else:
        present_op, absent_op = cascade_operators(config.n_splitters, config.eta)

    t = target_index
    out: dict = {}
    norm_in = norm_out = 0.0
    for cfg, a in state.amplitudes.items():
        present = cfg[control_index] == control_rail
        op = present_op if present else absent_op
        b = cfg[t]
        for new_bit in (0, 1):
            coeff = op[new_bit][b]
            if coeff == 0.0:
                continue
            key = cfg[:t] + (new_bit,) + cfg[t + 1 :]
            out[key] = out.get(key, 0j) + coeff * a
        if present:
            norm_in += abs(a) ** 2

    for cfg, a in out.items():
        if cfg[control_index] == control_rail:
            norm_out += abs(a) ** 2
    lost = max(0.0, norm_in - norm_out)

    records = []
    if lost > 0.0:
        if event is None:
            event = f"ifm:{control_index}->{target_index}#{len(state.absorbed)}"
        tag = _absorption_tag(state.register[control_index].species)
        records.append(AbsorbedRecord(lost, event, tag))
    return with_amplitudes(state, out, records)


@dataclass(frozen=True)
class TruthRow:
    """Action of the gate on one two-qubit basis input."""

    control_in: int
    target_in: int
    outputs: dict = field(default_factory=dict)
    absorbed: float = 0.0
    control_rail: int = 1

    @staticmethod
    def rails(bit: int) -> tuple[int, int]:
        # first rail (x or a) is occupied for logical 1
        return (bit, 1 - bit)

    @property
    def rails_in(self) -> tuple[int, int, int, int]:
        return self.rails(self.control_in) + self.rails(self.target_in)

    def rails_out(self) -> list[tuple[tuple, float]]:
        """Rail occupations ``(x, y, a, b)`` of each output with its probability.

        An absorbed output shows ``"gamma"`` on the control rail that carried
        the object and zeros elsewhere.
        """
        rows = [
            (self.rails(c) + self.rails(t), abs(amp) ** 2)
            for (c, t), amp in sorted(self.outputs.items())
        ]
        if self.absorbed > 0.0:
            # the object rides on rail x when control_rail == 1, rail y otherwise
            occ = ("gamma", 0) if self.control_rail == 1 else (0, "gamma")
            rows.append((occ + (0, 0), self.absorbed))
        return rows


def truth_table(
    config: IfmGateConfig = IfmGateConfig(),
    control_rail: int = 1,
    species: tuple[Species, Species] = (Species.POSITRON, Species.ELECTRON),
) -> list[TruthRow]:
    """Enumerate the gate on the four basis inputs ``|control, target>``."""
    register = (QubitDescriptor(species[0], "control"), QubitDescriptor(species[1], "target"))
    rows = []
    for c in (0, 1):
        for t in (0, 1):
            out = apply_ifm(new_state(register, (c, t)), 0, 1, config, control_rail)
            rows.append(TruthRow(c, t, dict(out.amplitudes), out.absorbed_mass(), control_rail))
    return rows


def survival_probability(config: IfmGateConfig) -> float:
    """Probability that a target sent into ``|0>`` stays there with the object present."""
    if config.mode is GateMode.IDEAL:
        return 1.0
    present, _ = cascade_operators(config.n_splitters, config.eta)
    return present[0][0] ** 2
