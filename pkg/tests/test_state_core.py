import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from ifmsim.state_core import (
    HADAMARD,
    IDENTITY,
    PAULI,
    AbsorbedRecord,
    OneQubitUnitary,
    QubitDescriptor,
    Species,
    StateVector,
    absorb,
    apply_rotation,
    apply_unitary,
    beam_splitter,
    drop_qubit,
    fidelity,
    from_amplitudes,
    measure,
    new_state,
    reorder,
    rotation,
    tensor,
)

E = QubitDescriptor(Species.ELECTRON, "e")
P = QubitDescriptor(Species.POSITRON, "p")
R = 1 / math.sqrt(2)


def plus():
    return from_amplitudes([E], {(0,): R, (1,): R})


def dense_apply(state, q, u):
    """Oracle: full Kronecker-product matrix on the dense vector."""
    n = state.n_qubits
    ops = [np.eye(2)] * n
    ops[q] = u.matrix
    full = ops[0]
    for m in ops[1:]:
        full = np.kron(full, m)
    return full @ state.to_dense()


class TestNewState:
    def test_basis(self):
        s = new_state([E, P], (0, 0))
        assert s.amplitudes == {(0, 0): 1}
        assert s.absorbed == ()

    def test_three_qubit_ghz_input(self):
        s = new_state([P, E, P], (0, 0, 0))
        assert s.n_qubits == 3
        assert s.amplitude(0, 0, 0) == 1

    def test_empty_register_rejected(self):
        with pytest.raises(ValueError):
            new_state([], ())

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            new_state([E, P], (0,))

    def test_non_binary_bits(self):
        with pytest.raises(ValueError):
            new_state([E], (2,))


class TestUnitaries:
    def test_hadamard_on_zero(self):
        s = apply_unitary(new_state([E], (0,)), 0, HADAMARD)
        assert s.amplitude(0) == pytest.approx(R)
        assert s.amplitude(1) == pytest.approx(R)

    def test_beam_splitter_quarter_turn(self):
        s = apply_unitary(new_state([E], (0,)), 0, beam_splitter(math.pi / 2))
        assert abs(s.amplitude(1)) == pytest.approx(1.0, abs=1e-15)
        assert abs(s.amplitude(0)) < 1e-15

    def test_identity(self):
        s = plus()
        assert apply_unitary(s, 0, IDENTITY).amplitudes == pytest.approx(s.amplitudes)

    def test_non_unitary_rejected(self):
        with pytest.raises(ValueError):
            apply_unitary(plus(), 0, [[1, 0], [0, 0.5]])
        with pytest.raises(ValueError):
            OneQubitUnitary(1, 0, 0, 1 + 1e-6)

    def test_small_deviation_accepted(self):
        apply_unitary(plus(), 0, [[1, 0], [0, 1 + 1e-11]])

    def test_bad_index(self):
        with pytest.raises(IndexError):
            apply_unitary(plus(), 1, HADAMARD)

    @pytest.mark.parametrize("q", [0, 1, 2])
    def test_matches_dense_kron(self, q):
        rng = np.random.default_rng(q)
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        v /= np.linalg.norm(v)
        s = from_amplitudes([E, P, E], {tuple(int(b) for b in np.binary_repr(i, 3)): v[i] for i in range(8)})
        u = rotation("y", 0.7) @ rotation("z", 1.3)
        np.testing.assert_allclose(apply_unitary(s, q, u).to_dense(), dense_apply(s, q, u), atol=1e-14)


class TestRotation:
    @pytest.mark.parametrize("axis", "xyz")
    @pytest.mark.parametrize("theta", [0.0, 0.3, math.pi / 2, math.pi, 2.5, 3 * math.pi])
    def test_matches_matrix_exponential(self, axis, theta):
        expected = expm(-0.5j * theta * PAULI[axis].matrix)
        np.testing.assert_allclose(rotation(axis, theta).matrix, expected, atol=1e-14)

    @pytest.mark.parametrize("axis", "xyz")
    def test_pi_is_minus_i_pauli(self, axis):
        np.testing.assert_allclose(rotation(axis, math.pi).matrix, -1j * PAULI[axis].matrix, atol=1e-12)

    @pytest.mark.parametrize("axis", "xyz")
    def test_half_pi(self, axis):
        expected = (np.eye(2) - 1j * PAULI[axis].matrix) / math.sqrt(2)
        np.testing.assert_allclose(rotation(axis, math.pi / 2).matrix, expected, atol=1e-15)

    def test_ry_pi_on_zero(self):
        s = apply_rotation(new_state([E], (0,)), 0, "y", math.pi)
        assert abs(s.amplitude(1)) == pytest.approx(1.0)
        assert s.amplitude(0) == 0

    def test_rz_zero_is_identity(self):
        s = plus()
        assert apply_rotation(s, 0, "z", 0.0).amplitudes == pytest.approx(s.amplitudes)

    @pytest.mark.parametrize("theta", [-0.1, 4 * math.pi])
    def test_angle_range(self, theta):
        with pytest.raises(ValueError):
            rotation("x", theta)

    def test_unknown_axis(self):
        with pytest.raises(ValueError):
            rotation("w", 1.0)


class TestAbsorb:
    def test_unit_survival_is_noop(self):
        s = plus()
        out = absorb(s, 0, 1.0, "ev")
        assert out.amplitudes == s.amplitudes
        assert out.absorbed == ()

    def test_perfect_absorber(self):
        out = absorb(new_state([E], (1,)), 0, 0.0, "ev")
        assert out.amplitudes == {}
        assert out.absorbed == (AbsorbedRecord(1.0, "ev"),)

    def test_partial(self):
        out = absorb(plus(), 0, math.sqrt(0.25), "ev", "photon_absorbed")
        assert out.amplitude(0) == pytest.approx(R)
        assert out.amplitude(1) == pytest.approx(0.5 * R)
        (rec,) = out.absorbed
        assert rec.mass == pytest.approx(0.375, abs=1e-15)
        assert rec.tag.value == "photon_absorbed"
        assert out.total_probability() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("bad", [-0.01, 1.01])
    def test_range(self, bad):
        with pytest.raises(ValueError):
            absorb(plus(), 0, bad, "ev")


class TestMeasure:
    def test_deterministic_zero(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            outcome, post = measure(new_state([E], (0,)), 0, rng)
            assert outcome == 0
            assert post.amplitude(0) == 1

    def test_plus_frequency(self):
        rng = np.random.default_rng(11)
        s = plus()
        zeros = sum(measure(s, 0, rng)[0] == 0 for _ in range(100_000))
        assert 0.495 <= zeros / 100_000 <= 0.505

    def test_posterior_renormalized(self):
        s = from_amplitudes([E, P], {(0, 0): 0.6, (1, 1): 0.8j})
        outcome, post = measure(s, 1, np.random.default_rng(3))
        assert post.total_probability() == pytest.approx(1.0)
        assert set(post.amplitudes) == {(outcome, outcome)}

    def test_absorbed_outcome(self):
        s = absorb(plus(), 0, 0.0, "gate7")
        results = [measure(s, 0, np.random.default_rng(seed)) for seed in range(50)]
        assert {outcome for outcome, _ in results} == {0, "gate7"}
        post = next(post for outcome, post in results if outcome == "gate7")
        assert post.amplitudes == {}
        assert post.absorbed_mass() == 1.0

    def test_fully_absorbed_rejected(self):
        s = absorb(new_state([E], (1,)), 0, 0.0, "ev")
        with pytest.raises(ValueError):
            measure(s, 0, np.random.default_rng(0))

    def test_unnormalized_rejected(self):
        s = StateVector((E,), {(0,): 0.5})
        with pytest.raises(ValueError):
            measure(s, 0, np.random.default_rng(0))

    def test_seed_reproducible(self):
        s = from_amplitudes([E, P], {(0, 0): 0.5, (0, 1): 0.5, (1, 0): 0.5, (1, 1): 0.5})
        seq = lambda seed: [measure(s, i % 2, rng)[0] for rng in [np.random.default_rng(seed)] for i in range(200)]
        assert seq(5) == seq(5)
        assert seq(5) != seq(6)

    @pytest.mark.parametrize("seed", [1, 2])
    def test_marginal_statistics_three_sigma(self, seed):
        rng = np.random.default_rng(seed)
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v /= np.linalg.norm(v)
        s = from_amplitudes([E, P], dict(zip([(0, 0), (0, 1), (1, 0), (1, 1)], v)))
        s = absorb(s, 1, 0.6, "leak")
        # qubit 0 reads 1 on |10> (untouched) and |11> (attenuated by 0.6)
        p_one = abs(v[2]) ** 2 + abs(v[3]) ** 2 * 0.36
        p_abs = s.absorbed_mass()
        n = 100_000
        counts = {0: 0, 1: 0, "leak": 0}
        for _ in range(n):
            counts[measure(s, 0, rng)[0]] += 1
        for key, p in ((1, p_one), ("leak", p_abs)):
            sigma = math.sqrt(p * (1 - p) / n)
            assert abs(counts[key] / n - p) <= 3 * sigma


class TestFidelity:
    def test_self(self):
        assert fidelity(plus(), plus()) == pytest.approx(1.0)

    def test_orthogonal_bell(self):
        phi_p = from_amplitudes([P, E], {(0, 0): R, (1, 1): R})
        phi_m = from_amplitudes([P, E], {(0, 0): R, (1, 1): -R})
        assert fidelity(phi_p, phi_m) == pytest.approx(0.0, abs=1e-15)

    def test_global_phase_ignored(self):
        s = from_amplitudes([E], {(0,): R * 1j, (1,): R * 1j})
        assert fidelity(s, plus()) == pytest.approx(1.0)

    def test_register_mismatch(self):
        with pytest.raises(ValueError):
            fidelity(plus(), from_amplitudes([P], {(0,): 1}))

    def test_reference_with_ledger_rejected(self):
        with pytest.raises(ValueError):
            fidelity(plus(), absorb(plus(), 0, 0.5, "x"))


class TestRegisterPlumbing:
    def test_tensor_and_reorder(self):
        s = tensor(plus(), new_state([P], (1,)))
        assert s.species == (Species.ELECTRON, Species.POSITRON)
        assert s.amplitude(0, 1) == pytest.approx(R)
        r = reorder(s, (1, 0))
        assert r.amplitude(1, 0) == pytest.approx(R)
        assert r.species == (Species.POSITRON, Species.ELECTRON)

    def test_tensor_scales_ledger(self):
        lossy = absorb(plus(), 0, 0.0, "x")
        s = tensor(lossy, new_state([P], (0,)))
        assert s.total_probability() == pytest.approx(1.0)

    def test_drop_qubit(self):
        s = tensor(plus(), new_state([P], (1,)))
        d = drop_qubit(s, 1)
        assert d.amplitudes == pytest.approx(plus().amplitudes)
        with pytest.raises(ValueError):
            drop_qubit(s, 0)


# --- properties -------------------------------------------------------------

angles = st.floats(min_value=0.0, max_value=4 * math.pi, exclude_max=True)
ops = st.lists(
    st.one_of(
        st.tuples(st.just("rot"), st.integers(0, 2), st.sampled_from("xyz"), angles),
        st.tuples(st.just("absorb"), st.integers(0, 2), st.floats(0.0, 1.0)),
        st.tuples(st.just("h"), st.integers(0, 2)),
    ),
    max_size=20,
)


def _run(ops_list):
    s = new_state([E, P, E], (0, 1, 0))
    history = [s]
    for i, op in enumerate(ops_list):
        if op[0] == "rot":
            s = apply_rotation(s, op[1], op[2], op[3])
        elif op[0] == "h":
            s = apply_unitary(s, op[1], HADAMARD)
        else:
            s = absorb(s, op[1], op[2], f"ev{i}")
        history.append(s)
    return history


@settings(max_examples=200, deadline=None)
@given(ops)
def test_probability_conserved(ops_list):
    for s in _run(ops_list):
        assert abs(s.total_probability() - 1.0) <= 1e-12
        assert all(r.mass >= 0 for r in s.absorbed)


@settings(max_examples=200, deadline=None)
@given(ops, st.integers(0, 2), angles)
def test_unitaries_leave_ledger_alone(ops_list, q, theta):
    s = _run(ops_list)[-1]
    out = apply_rotation(s, q, "y", theta)
    assert out.absorbed == s.absorbed
    assert abs(out.coherent_norm() - s.coherent_norm()) <= 1e-12
