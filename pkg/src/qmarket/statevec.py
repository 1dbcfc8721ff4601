"""Dense state-vector core: preparation, gates, and projective Pauli measurement.

Basis indices are big-endian bitstrings: qubit 0 is the leftmost bit (the top
wire of a circuit diagram), so |10> on two qubits is index 2.  All public
operations return fresh StateVector values; nothing mutates in place.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import PauliString, assert_unitary

MAX_QUBITS = 16
NORM_TOL = 1e-12
# Branch probabilities below this are treated as exact zeros and never sampled.
ZERO_BRANCH = 1e-14


class StateVector:
    """Normalized complex amplitudes over n qubits."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray):
        if n_qubits < 1:
            raise ValueError(f"need at least one qubit, got {n_qubits}")
        if n_qubits > MAX_QUBITS:
            raise ValueError(f"qubit count {n_qubits} exceeds ceiling {MAX_QUBITS}")
        amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape[0] != 2**n_qubits:
            raise ValueError(
                f"amplitude length {amplitudes.shape[0]} != 2**{n_qubits}"
            )
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state norm {norm} too far from 1")
        if abs(norm - 1.0) > NORM_TOL:
            amplitudes = amplitudes / norm
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape([2] * self.n_qubits)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


@dataclass(frozen=True)
class MeasurementOutcome:
    eigenvalue: int  # +1 or -1
    probability: float
    observable: PauliString

    def __post_init__(self):
        if self.eigenvalue not in (1, -1):
            raise ValueError(f"eigenvalue must be +/-1, got {self.eigenvalue}")
        if not -NORM_TOL <= self.probability <= 1.0 + NORM_TOL:
            raise ValueError(f"probability {self.probability} outside [0, 1]")


def new_basis_state(n_qubits: int, bits: str) -> StateVector:
    if len(bits) != n_qubits:
        raise ValueError(f"bitstring {bits!r} has length {len(bits)}, expected {n_qubits}")
    if any(b not in "01" for b in bits):
        raise ValueError(f"bitstring {bits!r} must contain only 0/1")
    amplitudes = np.zeros(2**n_qubits, dtype=complex)
    amplitudes[int(bits, 2)] = 1.0
    return StateVector(n_qubits, amplitudes)


def random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    vec = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return StateVector(n_qubits, vec / np.linalg.norm(vec))


def apply_gate(state: StateVector, gate: np.ndarray, targets: list[int]) -> StateVector:
    """Apply `gate` (dimension 2^len(targets)) to the listed qubits."""
    n = state.n_qubits
    k = len(targets)
    if len(set(targets)) != k:
        raise ValueError(f"duplicate targets in {targets}")
    if any(t < 0 or t >= n for t in targets):
        raise ValueError(f"target out of range in {targets} for {n} qubits")
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != (2**k, 2**k):
        raise ValueError(f"gate shape {gate.shape} does not act on {k} qubit(s)")
    assert_unitary(gate)

    tensor = state.tensor()
    # Contract the gate (reshaped to a 2k-leg tensor) onto the target axes;
    # tensordot leaves the gate's output axes first, then the untouched axes
    # in their original order, so a single transpose restores the layout.
    gate_tensor = gate.reshape([2] * (2 * k))
    moved = np.tensordot(gate_tensor, tensor, axes=(list(range(k, 2 * k)), targets))
    rest = [ax for ax in range(n) if ax not in targets]
    perm = [0] * n
    for i, t in enumerate(targets):
        perm[t] = i
    for i, ax in enumerate(rest):
        perm[ax] = k + i
    out = np.transpose(moved, axes=perm).reshape(-1)
    return StateVector(n, out)


def apply_pauli(state: StateVector, pauli: PauliString) -> StateVector:
    """Apply a PauliString as a unitary (phase included)."""
    if pauli.n_qubits != state.n_qubits:
        raise ValueError("Pauli word and state sizes differ")
    vec = _pauli_action(state.tensor(), pauli)
    return StateVector(state.n_qubits, vec.reshape(-1))


def _pauli_action(tensor: np.ndarray, pauli: PauliString) -> np.ndarray:
    out = tensor
    phase = pauli.phase
    for axis, letter in enumerate(pauli.letters):
        if letter == "I":
            continue
        if letter == "X":
            out = np.flip(out, axis=axis)
        elif letter == "Xp":
            out = out.copy()
            idx = [slice(None)] * out.ndim
            idx[axis] = 1
            out[tuple(idx)] = -out[tuple(idx)]
        else:  # Xpp = i X Xp: |0> -> i|1>, |1> -> -i|0>
            out = np.flip(out, axis=axis).copy()
            idx0 = [slice(None)] * out.ndim
            idx1 = [slice(None)] * out.ndim
            idx0[axis] = 0
            idx1[axis] = 1
            out[tuple(idx1)] = 1j * out[tuple(idx1)]
            out[tuple(idx0)] = -1j * out[tuple(idx0)]
    return phase * out


def measure_pauli(
    state: StateVector,
    observable: PauliString,
    rng: np.random.Generator | None,
    force: int | None = None,
) -> tuple[MeasurementOutcome, StateVector]:
    """Projective measurement of a Hermitian PauliString via the Born rule.

    Samples an eigenvalue o in {+1, -1} with probability <psi|P_o|psi>,
    P_o = (I + o*observable)/2, and returns the renormalized projection.
    `force` pins the outcome for deterministic testing (the forced branch
    must have nonzero probability).
    """
    if observable.n_qubits != state.n_qubits:
        raise ValueError("observable and state sizes differ")
    if not observable.is_hermitian:
        raise ValueError(f"observable phase {observable.phase} is not +/-1; not Hermitian")

    tensor = state.tensor()
    acted = _pauli_action(tensor, observable).reshape(-1)
    plus = (state.amplitudes + acted) / 2.0
    minus = (state.amplitudes - acted) / 2.0
    p_plus = float(np.vdot(plus, plus).real)
    p_minus = float(np.vdot(minus, minus).real)
    return _resolve_branches(state, observable, plus, minus, p_plus, p_minus, rng, force)


def _resolve_branches(state, observable, plus, minus, p_plus, p_minus, rng, force):
    if force is not None:
        if force not in (1, -1):
            raise ValueError(f"forced outcome must be +/-1, got {force}")
        eig = force
        prob = p_plus if eig == 1 else p_minus
        if prob < ZERO_BRANCH:
            raise ValueError(f"forced outcome {force} has probability {prob} ~ 0")
    else:
        if p_plus < ZERO_BRANCH:
            eig = -1
        elif p_minus < ZERO_BRANCH:
            eig = 1
        else:
            if rng is None:
                raise ValueError("rng required for a stochastic measurement")
            eig = 1 if rng.random() < p_plus else -1
        prob = p_plus if eig == 1 else p_minus
    if prob < ZERO_BRANCH:  # pragma: no cover - guarded above
        raise RuntimeError("sampled a zero-probability branch")
    branch = plus if eig == 1 else minus
    post = StateVector(state.n_qubits, branch / np.sqrt(prob))
    return MeasurementOutcome(eig, prob, observable), post


def measure_hermitian(
    state: StateVector,
    observable: np.ndarray,
    targets: list[int],
    rng: np.random.Generator | None,
    force: int | None = None,
    label: PauliString | None = None,
) -> tuple[MeasurementOutcome, StateVector]:
    """Projective measurement of a Hermitian involution given as a dense matrix.

    Covers the non-Pauli meters the gadgets need (G and the T-conjugated X).
    `label` is attached to the returned outcome for reporting.
    """
    observable = np.asarray(observable, dtype=complex)
    dim = 2 ** len(targets)
    if observable.shape != (dim, dim):
        raise ValueError(f"observable shape {observable.shape} does not fit targets {targets}")
    if not np.allclose(observable, observable.conj().T, atol=1e-10):
        raise ValueError("observable is not Hermitian")
    if not np.allclose(observable @ observable, np.eye(dim), atol=1e-10):
        raise ValueError("observable is not an involution (eigenvalues must be +/-1)")

    tensor = state.tensor()
    gate_tensor = observable.reshape([2] * (2 * len(targets)))
    k = len(targets)
    moved = np.tensordot(gate_tensor, tensor, axes=(list(range(k, 2 * k)), targets))
    rest = [ax for ax in range(state.n_qubits) if ax not in targets]
    perm = [0] * state.n_qubits
    for i, t in enumerate(targets):
        perm[t] = i
    for i, ax in enumerate(rest):
        perm[ax] = k + i
    acted = np.transpose(moved, axes=perm).reshape(-1)

    plus = (state.amplitudes + acted) / 2.0
    minus = (state.amplitudes - acted) / 2.0
    p_plus = float(np.vdot(plus, plus).real)
    p_minus = float(np.vdot(minus, minus).real)
    if label is None:
        label = PauliString.identity(state.n_qubits)
    return _resolve_branches(state, label, plus, minus, p_plus, p_minus, rng, force)


def equal_up_to_global_phase(
    a: StateVector, b: StateVector, tol: float = 1e-10
) -> tuple[bool, complex | None]:
    """True iff |<a|b>| >= 1 - tol; also returns the relative phase when true."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("states have different qubit counts")
    overlap = np.vdot(a.amplitudes, b.amplitudes)
    if abs(overlap) >= 1.0 - tol:
        return True, overlap / abs(overlap)
    return False, None


def fidelity(a: StateVector, b: StateVector) -> float:
    """Overlap magnitude |<a|b>| between unit vectors."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("states have different qubit counts")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)))


def append_qubit(state: StateVector, bits: str = "0") -> StateVector:
    """Tensor a fresh qubit in a computational basis state onto the end."""
    fresh = np.zeros(2, dtype=complex)
    fresh[int(bits, 2)] = 1.0
    return StateVector(state.n_qubits + 1, np.kron(state.amplitudes, fresh))


def append_state(state: StateVector, qubit_state: np.ndarray) -> StateVector:
    """Tensor a fresh qubit in an arbitrary normalized 1-qubit state onto the end."""
    qubit_state = np.asarray(qubit_state, dtype=complex).reshape(-1)
    if qubit_state.shape[0] != 2:
        raise ValueError("appended state must be a single qubit")
    return StateVector(state.n_qubits + 1, np.kron(state.amplitudes, qubit_state))


def remove_qubit(state: StateVector, qubit: int, tol: float = 1e-12) -> tuple[StateVector, np.ndarray]:
    """Factor out a disentangled qubit, returning (rest, removed 1-qubit state).

    The wire must be in a pure product state with the rest of the register;
    this is asserted via the second singular value of the bipartition.
    """
    n = state.n_qubits
    if n < 2:
        raise ValueError("cannot remove the last qubit")
    if qubit < 0 or qubit >= n:
        raise ValueError(f"qubit {qubit} out of range")
    tensor = np.moveaxis(state.tensor(), qubit, 0).reshape(2, -1)
    u, s, vh = np.linalg.svd(tensor, full_matrices=False)
    if s.shape[0] > 1 and s[1] ** 2 > tol:
        raise RuntimeError(
            f"qubit {qubit} is entangled with the rest (residual weight {s[1]**2:.2e})"
        )
    removed = u[:, 0]
    rest = s[0] * vh[0, :]
    # Fold the arbitrary SVD phase into the removed wire so `rest` keeps the
    # original global phase as closely as possible; phases are conventional.
    return StateVector(n - 1, rest), removed


def permute_qubits(state: StateVector, order: list[int]) -> StateVector:
    """Reorder wires so that new qubit i is old qubit order[i]."""
    if sorted(order) != list(range(state.n_qubits)):
        raise ValueError(f"order {order} is not a permutation")
    return StateVector(state.n_qubits, np.transpose(state.tensor(), axes=order).reshape(-1))
