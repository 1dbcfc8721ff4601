"""Shared oracles for the test suite.

The dense-matrix helpers here are deliberately independent of the library's
own measurement path: they build explicit projectors/operators with numpy
and are used as the reference side of every dual-route check.
"""
import itertools

import numpy as np
import pytest

from qmarket.algebra import PauliString, named_gate
from qmarket.statevec import StateVector

LETTER_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Xp": np.array([[1, 0], [0, -1]], dtype=complex),
    "Xpp": np.array([[0, -1j], [1j, 0]], dtype=complex),
}


def dense_pauli(letters, phase=1):
    """Explicit kron product, independent of PauliString.to_matrix."""
    out = np.array([[phase]], dtype=complex)
    for letter in letters:
        out = np.kron(out, LETTER_MATRICES[letter])
    return out


def dense_projector_measure(state: StateVector, observable: np.ndarray, eigenvalue: int):
    """Brute-force (I + o*O)/2 projection: returns (probability, post state)."""
    dim = state.amplitudes.shape[0]
    projector = (np.eye(dim) + eigenvalue * observable) / 2.0
    branch = projector @ state.amplitudes
    prob = float(np.vdot(branch, branch).real)
    post = None
    if prob > 1e-14:
        post = StateVector(state.n_qubits, branch / np.sqrt(prob))
    return prob, post


def all_letter_words(n_qubits):
    return [
        PauliString.from_letters(*letters)
        for letters in itertools.product(("I", "X", "Xp", "Xpp"), repeat=n_qubits)
    ]


def haar_state(n_qubits, rng):
    vec = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return StateVector(n_qubits, vec / np.linalg.norm(vec))


def embed_unitary(gate_name: str, n_qubits: int, targets: list[int]) -> np.ndarray:
    """Dense n-qubit embedding of a named gate (reference for apply_gate)."""
    gate = named_gate(gate_name)
    k = len(targets)
    full = np.zeros((2**n_qubits, 2**n_qubits), dtype=complex)
    for col in range(2**n_qubits):
        bits = [(col >> (n_qubits - 1 - q)) & 1 for q in range(n_qubits)]
        sub_in = 0
        for t in targets:
            sub_in = (sub_in << 1) | bits[t]
        for sub_out in range(2**k):
            amp = gate[sub_out, sub_in]
            if amp == 0:
                continue
            out_bits = list(bits)
            for i, t in enumerate(targets):
                out_bits[t] = (sub_out >> (k - 1 - i)) & 1
            row = int("".join(map(str, out_bits)), 2)
            full[row, col] += amp
    return full


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
