"""Seeded Monte Carlo batches for the randomized protocols.

Every trial draws from its own stream derived from ``(seed, trial)``, so
results do not depend on how trials are split across worker processes.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .circuits import (
    CNOT_INPUT_REGISTER,
    BellLabel,
    bell_measure,
    bell_state,
    gc_cnot,
    photon_pair_bell,
    random_pure_state,
)
from .ifm_gate import IfmGateConfig
from .state_core import fidelity

MAX_SEED = 2**64 - 1


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit value, got {seed}")
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


@dataclass(frozen=True)
class BellMeasureRow:
    trial: int
    true_label: str
    reported_label: str
    guessed: bool
    correct: bool


@dataclass(frozen=True)
class CnotRow:
    trial: int
    b1: str
    b2: str
    success: bool


@dataclass(frozen=True)
class PhotonBellRow:
    trial: int
    label: str
    fidelity: float


_LABELS = list(BellLabel)


def bell_measure_trial(seed: int, trial: int, config: IfmGateConfig) -> BellMeasureRow:
    """Uniformly random Bell input, uniformly random permutation."""
    rng = trial_rng(seed, trial)
    truth = _LABELS[int(rng.integers(4))]
    k = int(rng.integers(1, 7))
    out = bell_measure(bell_state(truth), 0, 1, config, rng, permutation=k)
    reported = out.label.value if out.label is not None else ""
    return BellMeasureRow(trial, truth.value, reported, out.guessed, out.label is truth)


def cnot_trial(seed: int, trial: int, config: IfmGateConfig) -> CnotRow:
    """Haar-random two-qubit input through the teleported CNOT."""
    rng = trial_rng(seed, trial)
    inp = random_pure_state(CNOT_INPUT_REGISTER, rng)
    _, out = gc_cnot(inp, config, rng)
    labels = [m.label.value if m.label is not None else "" for m in out.measurements] or ["", ""]
    return CnotRow(trial, labels[0], labels[1], bool(out.success))


def photon_bell_trial(seed: int, trial: int, config: IfmGateConfig) -> PhotonBellRow:
    rng = trial_rng(seed, trial)
    label, photons = photon_pair_bell(config, rng)
    if label is None:
        return PhotonBellRow(trial, "", 0.0)
    return PhotonBellRow(trial, label.value, fidelity(photons, bell_state(label, photons.register)))


def _chunk(job):
    fn, seed, start, stop, config = job
    return [fn(seed, t, config) for t in range(start, stop)]


def run_trials(
    fn: Callable[[int, int, IfmGateConfig], object],
    trials: int,
    seed: int,
    config: IfmGateConfig = IfmGateConfig(),
    jobs: int = 1,
) -> list:
    """Run ``fn(seed, trial, config)`` for ``trial = 0 .. trials-1`` in order."""
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if jobs <= 1:
        return [fn(seed, t, config) for t in range(trials)]
    size = -(-trials // (jobs * 4))
    work = [(fn, seed, s, min(s + size, trials), config) for s in range(0, trials, size)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return [row for part in pool.map(_chunk, work) for row in part]
