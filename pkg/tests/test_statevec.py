import numpy as np
import pytest

from conftest import all_letter_words, dense_pauli, dense_projector_measure, haar_state
from qmarket.algebra import PauliString, named_gate
from qmarket.statevec import (
    StateVector,
    append_qubit,
    apply_gate,
    apply_pauli,
    equal_up_to_global_phase,
    measure_pauli,
    new_basis_state,
    permute_qubits,
    remove_qubit,
)

S2 = 1.0 / np.sqrt(2.0)


def test_basis_state_zero():
    assert np.allclose(new_basis_state(1, "0").amplitudes, [1, 0])


def test_basis_state_two_qubit():
    assert np.allclose(new_basis_state(2, "10").amplitudes, [0, 0, 1, 0])


def test_basis_state_three_qubit():
    state = new_basis_state(3, "000")
    assert state.amplitudes[0] == 1 and np.count_nonzero(state.amplitudes) == 1


def test_basis_state_length_mismatch():
    with pytest.raises(ValueError):
        new_basis_state(2, "0")
    with pytest.raises(ValueError):
        new_basis_state(1, "2")


def test_qubit_ceiling():
    with pytest.raises(ValueError):
        StateVector(17, np.zeros(2**17))


def test_apply_hadamard():
    out = apply_gate(new_basis_state(1, "0"), named_gate("H"), [0])
    assert np.allclose(out.amplitudes, [S2, S2], atol=1e-12)


def test_apply_xp_on_plus():
    plus = StateVector(1, np.array([S2, S2]))
    out = apply_gate(plus, named_gate("Xp"), [0])
    assert np.allclose(out.amplitudes, [S2, -S2], atol=1e-12)


def test_apply_cnot_prepares_bell():
    state = StateVector(2, np.array([S2, 0, S2, 0]))
    out = apply_gate(state, named_gate("CNOT"), [0, 1])
    assert np.allclose(out.amplitudes, [S2, 0, 0, S2], atol=1e-12)


def test_apply_gate_on_middle_wire(rng):
    # embedding on a 3-qubit register matches the dense kron oracle
    from conftest import embed_unitary

    state = haar_state(3, rng)
    for gate, targets in (("H", [1]), ("T", [2]), ("CNOT", [2, 0]), ("CH", [1, 2])):
        out = apply_gate(state, named_gate(gate), targets)
        oracle = embed_unitary(gate, 3, targets) @ state.amplitudes
        assert np.max(np.abs(out.amplitudes - oracle)) < 1e-12


def test_apply_gate_errors():
    state = new_basis_state(2, "00")
    with pytest.raises(ValueError):
        apply_gate(state, np.array([[1, 0], [0, 2]], dtype=complex), [0])
    with pytest.raises(ValueError):
        apply_gate(state, named_gate("CNOT"), [0, 0])
    with pytest.raises(ValueError):
        apply_gate(state, named_gate("H"), [2])


def test_measure_x_on_plus_is_deterministic():
    plus = StateVector(1, np.array([S2, S2]))
    outcome, post = measure_pauli(plus, PauliString.from_letters("X"), None)
    assert outcome.eigenvalue == 1
    assert abs(outcome.probability - 1) < 1e-12
    assert np.allclose(post.amplitudes, plus.amplitudes, atol=1e-12)


def test_measure_x_on_zero_both_branches():
    zero = new_basis_state(1, "0")
    for eig, expect in ((1, [S2, S2]), (-1, [S2, -S2])):
        outcome, post = measure_pauli(zero, PauliString.from_letters("X"), None, force=eig)
        assert abs(outcome.probability - 0.5) < 1e-12
        assert np.allclose(post.amplitudes, expect, atol=1e-12)


def test_measure_pair_on_bell_vs_projector_oracle():
    bell = StateVector(2, np.array([S2, 0, 0, S2]))
    obs = PauliString.from_letters("X", "Xp")
    dense = dense_pauli(["X", "Xp"])
    for eig in (1, -1):
        outcome, post = measure_pauli(bell, obs, None, force=eig)
        prob, oracle_post = dense_projector_measure(bell, dense, eig)
        assert abs(outcome.probability - 0.5) < 1e-12
        assert abs(outcome.probability - prob) < 1e-12
        assert np.max(np.abs(post.amplitudes - oracle_post.amplitudes)) < 1e-10


def test_measure_oracle_equivalence_all_small_words(rng):
    # every letter word on <= 3 qubits agrees with the dense projector oracle
    for n in (1, 2, 3):
        for word in all_letter_words(n):
            if all(l == "I" for l in word.letters):
                continue
            state = haar_state(n, rng)
            dense = dense_pauli(word.letters)
            for eig in (1, -1):
                prob, oracle_post = dense_projector_measure(state, dense, eig)
                if prob < 1e-14:
                    continue
                outcome, post = measure_pauli(state, word, None, force=eig)
                assert abs(outcome.probability - prob) < 1e-10
                assert np.max(np.abs(post.amplitudes - oracle_post.amplitudes)) < 1e-10


def test_measure_rejects_imaginary_phase():
    with pytest.raises(ValueError):
        measure_pauli(new_basis_state(1, "0"), PauliString.from_letters("X", phase=1j), None)


def test_forcing_zero_probability_branch_raises():
    zero = new_basis_state(1, "0")
    with pytest.raises(ValueError):
        measure_pauli(zero, PauliString.from_letters("Xp"), None, force=-1)


def test_norm_preservation_random_sequences(rng):
    gates = ["H", "T", "G", "X", "Xp", "Xpp", "S"]
    for trial in range(1000):
        n = int(rng.integers(1, 4))
        state = haar_state(n, rng)
        for _ in range(3):
            state = apply_gate(state, named_gate(gates[rng.integers(len(gates))]),
                               [int(rng.integers(n))])
        word = all_letter_words(n)[rng.integers(4**n)]
        if any(l != "I" for l in word.letters):
            _, state = measure_pauli(state, word, rng)
        assert abs(state.norm() - 1.0) < 1e-10


def test_born_statistics_x_on_zero():
    rng = np.random.default_rng(99)
    zero = new_basis_state(1, "0")
    obs = PauliString.from_letters("X")
    hits = sum(measure_pauli(zero, obs, rng)[0].eigenvalue == 1 for _ in range(10_000))
    # sigma = sqrt(0.25/10000) = 0.005; require within 4 sigma of 0.5
    assert abs(hits / 10_000 - 0.5) < 4 * 0.005


def test_projector_idempotence(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 4))
        state = haar_state(n, rng)
        word = all_letter_words(n)[rng.integers(1, 4**n)]
        first, state = measure_pauli(state, word, rng)
        second, _ = measure_pauli(state, word, rng)
        assert second.eigenvalue == first.eigenvalue
        assert abs(second.probability - 1.0) < 1e-12


def test_equal_up_to_global_phase_cases():
    zero = new_basis_state(1, "0")
    phased = StateVector(1, np.exp(1j * np.pi / 3) * zero.amplitudes)
    same, phase = equal_up_to_global_phase(zero, phased, 1e-10)
    assert same and abs(phase - np.exp(1j * np.pi / 3)) < 1e-12

    one = new_basis_state(1, "1")
    same, phase = equal_up_to_global_phase(zero, one, 1e-10)
    assert not same and phase is None

    plus = apply_gate(zero, named_gate("H"), [0])
    same, phase = equal_up_to_global_phase(plus, StateVector(1, np.array([S2, S2])), 1e-10)
    assert same and abs(phase - 1) < 1e-12


def test_equal_up_to_global_phase_dimension_mismatch():
    with pytest.raises(ValueError):
        equal_up_to_global_phase(new_basis_state(1, "0"), new_basis_state(2, "00"))


def test_apply_pauli_matches_dense(rng):
    for _ in range(50):
        n = int(rng.integers(1, 4))
        word = all_letter_words(n)[rng.integers(4**n)]
        state = haar_state(n, rng)
        out = apply_pauli(state, word)
        assert np.max(np.abs(out.amplitudes - dense_pauli(word.letters) @ state.amplitudes)) < 1e-12


def test_remove_qubit_product_state():
    state = append_qubit(new_basis_state(1, "0"), "1")
    rest, removed = remove_qubit(state, 1)
    assert rest.n_qubits == 1
    assert abs(abs(np.vdot(removed, [0, 1])) - 1) < 1e-12


def test_remove_qubit_entangled_raises():
    bell = StateVector(2, np.array([S2, 0, 0, S2]))
    with pytest.raises(RuntimeError):
        remove_qubit(bell, 0)


def test_permute_qubits_roundtrip(rng):
    state = haar_state(3, rng)
    out = permute_qubits(permute_qubits(state, [2, 0, 1]), [1, 2, 0])
    assert np.max(np.abs(out.amplitudes - state.amplitudes)) < 1e-12


def test_permute_qubits_rejects_non_permutation(rng):
    with pytest.raises(ValueError):
        permute_qubits(haar_state(2, rng), [0, 0])


def test_misc_input_guards(rng):
    from qmarket.statevec import append_state, measure_hermitian

    state = new_basis_state(1, "0")
    with pytest.raises(ValueError):
        StateVector(0, np.array([1.0]))
    with pytest.raises(ValueError):
        StateVector(1, np.array([1.0, 1.0]))  # unnormalized beyond tolerance
    with pytest.raises(ValueError):
        apply_gate(state, named_gate("CNOT"), [0])  # shape/arity mismatch
    with pytest.raises(ValueError):
        measure_pauli(state, PauliString.from_letters("X", "X"), rng)
    with pytest.raises(ValueError):
        measure_pauli(state, PauliString.from_letters("X"), rng, force=0)
    with pytest.raises(ValueError):
        measure_pauli(new_basis_state(1, "0"), PauliString.from_letters("X"), None)
    with pytest.raises(ValueError):
        append_state(state, np.array([1, 0, 0], dtype=complex))
    with pytest.raises(ValueError):
        measure_hermitian(state, np.diag([1.0, 2.0]), [0], rng)  # not an involution
    with pytest.raises(ValueError):
        measure_hermitian(state, np.array([[0, 1], [0, 0]], dtype=complex), [0], rng)
    with pytest.raises(ValueError):
        remove_qubit(state, 0)  # cannot remove the last qubit
