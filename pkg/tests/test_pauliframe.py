import numpy as np
import pytest

from conftest import dense_pauli, haar_state
from qmarket.algebra import PauliString, named_gate, pauli_mul
from qmarket.pauliframe import (
    PauliFrame,
    WalkExhaustedError,
    frame_update,
    push_through,
    random_walk_cleanup,
    reduce_word,
)
from qmarket.statevec import apply_gate, apply_pauli, fidelity


def single(letter):
    return PauliString.from_letters(letter)


def test_frame_update_examples():
    frame = PauliFrame.identity(1)
    frame = frame_update(frame, single("X"))
    assert frame.element.letters == ("X",)

    frame = frame_update(frame, single("X"))
    assert frame.element.letters == ("I",) and frame.element.phase == 1

    frame = frame_update(frame_update(PauliFrame.identity(1), single("Xp")), single("X"))
    oracle = dense_pauli(["X"]) @ dense_pauli(["Xp"])
    assert np.allclose(frame.element.to_matrix(), oracle, atol=1e-12)
    assert frame.element.letters == ("Xpp",)


def test_frame_update_size_mismatch():
    with pytest.raises(ValueError):
        frame_update(PauliFrame.identity(1), PauliString.from_letters("X", "I"))


def test_push_through_h():
    frame = PauliFrame(single("X"))
    assert push_through(frame, "H", [0]).element.letters == ("Xp",)


def test_push_through_cnot_oracle():
    frame = PauliFrame(PauliString.from_letters("X", "I"))
    pushed = push_through(frame, "CNOT", [0, 1])
    assert pushed.element.letters == ("X", "X")
    u = named_gate("CNOT")
    oracle = u @ dense_pauli(["X", "I"]) @ u.conj().T
    assert np.allclose(pushed.element.to_matrix(), oracle, atol=1e-12)


def test_push_through_identity_frame():
    frame = PauliFrame.identity(2)
    for gate, targets in (("H", [0]), ("G", [1]), ("CNOT", [0, 1]), ("CH", [0, 1])):
        assert push_through(frame, gate, targets).element.letters == ("I", "I")


def test_push_through_unsupported():
    with pytest.raises(ValueError):
        push_through(PauliFrame.identity(1), "T", [0])


def test_frame_soundness_lazy_equals_eager(rng):
    """Accumulating byproducts in the frame and applying it once equals
    applying every byproduct eagerly, through random Clifford pushes."""
    letters = ("I", "X", "Xp", "Xpp")
    for _ in range(60):
        n = int(rng.integers(2, 5))
        state = haar_state(n, rng)
        lazy = state
        eager = state
        frame = PauliFrame.identity(n)
        for _step in range(6):
            if rng.random() < 0.5:
                word = PauliString.from_letters(*rng.choice(letters, n))
                frame = frame_update(frame, word)
                eager = apply_pauli(eager, word)
            else:
                if rng.random() < 0.5 or n < 2:
                    gate, targets = "H", [int(rng.integers(n))]
                else:
                    targets = list(rng.choice(n, 2, replace=False))
                    gate = "CNOT"
                lazy = apply_gate(lazy, named_gate(gate), targets)
                eager = apply_gate(eager, named_gate(gate), targets)
                frame = push_through(frame, gate, targets)
        corrected = apply_pauli(lazy, frame.element)
        assert fidelity(corrected, eager) >= 1.0 - 1e-10


def test_reduce_word_examples():
    out = reduce_word(["H", "X", "H"])
    assert (out.letter, out.with_h, out.phase) == ("Xp", False, 1)

    out = reduce_word(["X", "Xp"])
    assert (out.letter, out.with_h) == ("Xpp", False)
    assert out.phase == -1j

    out = reduce_word(["H", "H"])
    assert (out.letter, out.with_h, out.phase) == ("I", False, 1)


def test_reduce_word_odd_h_count():
    out = reduce_word(["X", "H"])
    assert out.with_h
    oracle = dense_pauli(["X"]) @ named_gate("H")
    assert np.allclose(out.to_matrix(), oracle, atol=1e-12)


def test_reduce_word_empty_and_unknown():
    with pytest.raises(ValueError):
        reduce_word([])
    with pytest.raises(ValueError):
        reduce_word(["Q"])


def test_reduce_word_random_vs_dense(rng):
    symbols = ("H", "X", "Xp", "Xpp", "I")
    for _ in range(1000):
        length = int(rng.integers(1, 13))
        word = [symbols[rng.integers(5)] for _ in range(length)]
        out = reduce_word(word)
        dense = np.eye(2, dtype=complex)
        for s in word:
            dense = dense @ (named_gate("H") if s == "H" else dense_pauli([s]))
        assert np.max(np.abs(out.to_matrix() - dense)) < 1e-12
        assert out.with_h == (word.count("H") % 2 == 1)


def test_walk_single_step_probability():
    rng = np.random.default_rng(17)
    trials = 8000
    hits = sum(random_walk_cleanup("I", "X", rng).steps == 1 for _ in range(trials))
    sigma = np.sqrt(0.25 * 0.75 / trials)
    assert abs(hits / trials - 0.25) < 4 * sigma


def test_walk_survival_is_geometric():
    rng = np.random.default_rng(23)
    trials = 8000
    steps = [random_walk_cleanup("Xp", "Xpp", rng).steps for _ in range(trials)]
    for s in range(1, 8):
        survived = sum(1 for v in steps if v > s) / trials
        expected = 0.75**s
        sigma = np.sqrt(expected * (1 - expected) / trials)
        assert abs(survived - expected) < 4 * sigma


def test_walk_vertex_distribution_uniform():
    # after each step the vertex is uniform over the four letters
    rng = np.random.default_rng(31)
    trials = 8000
    counts = {letter: 0 for letter in ("I", "X", "Xp", "Xpp")}
    for _ in range(trials):
        record = random_walk_cleanup("I", "Xpp", rng, max_steps=500)
        counts[record.trajectory[1]] += 1
    sigma = np.sqrt(0.25 * 0.75 / trials)
    for letter, count in counts.items():
        assert abs(count / trials - 0.25) < 4 * sigma


def test_walk_trajectory_invariant():
    rng = np.random.default_rng(41)
    for _ in range(200):
        record = random_walk_cleanup("X", "Xp", rng)
        assert record.steps == len(record.labels)
        assert len(record.trajectory) == record.steps + 1
        assert record.terminal == record.trajectory[-1] == "Xp"
        for i, label in enumerate(record.labels):
            product = pauli_mul(
                PauliString.from_letters(label),
                PauliString.from_letters(record.trajectory[i]),
            )
            assert product.letters[0] == record.trajectory[i + 1]


def test_walk_even_parity_mode():
    rng = np.random.default_rng(53)
    trials = 6000
    steps = [
        random_walk_cleanup("I", "X", rng, parity="even").steps for _ in range(trials)
    ]
    assert all(s % 2 == 0 for s in steps)
    # hit probability per PAIR of draws is 1/4: geometric in pairs
    pairs = [s // 2 for s in steps]
    hits = sum(1 for p in pairs if p == 1) / trials
    sigma = np.sqrt(0.25 * 0.75 / trials)
    assert abs(hits - 0.25) < 4 * sigma
    survived2 = sum(1 for p in pairs if p > 2) / trials
    expected = 0.75**2
    sigma2 = np.sqrt(expected * (1 - expected) / trials)
    assert abs(survived2 - expected) < 4 * sigma2


def test_walk_exhaustion_and_validation():
    rng = np.random.default_rng(61)
    with pytest.raises(WalkExhaustedError):
        # probability (3/4)^k of surviving; force failure with max_steps=1
        # and a target that the single uniform draw misses
        for _ in range(200):
            random_walk_cleanup("I", "X", rng, max_steps=1)
    with pytest.raises(ValueError):
        random_walk_cleanup("I", "X", rng, max_steps=0)
    with pytest.raises(ValueError):
        random_walk_cleanup("Q", "X", rng)
    with pytest.raises(ValueError):
        random_walk_cleanup("I", "X", rng, parity="odd")


def test_walk_mean_stopping_time():
    rng = np.random.default_rng(71)
    trials = 8000
    steps = [random_walk_cleanup("I", "I", rng).steps for _ in range(trials)]
    mean = np.mean(steps)
    sigma_mean = (np.sqrt(0.75) / 0.25) / np.sqrt(trials)
    assert abs(mean - 4.0) < 4 * sigma_mean
