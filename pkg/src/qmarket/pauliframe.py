"""Classical byproduct bookkeeping and the correction random walk.

Byproducts from measurement gadgets are never applied eagerly; they
accumulate in a PauliFrame that is pushed through Clifford tactics and
applied (or reasoned about) at the end.  Any desired Pauli correction can
also be realized measurement-only by drawing random-Pauli gadgets until
their product hits the wanted letter: a random walk on the four-vertex
graph {I, X, X', X''} whose hit probability is 1/4 per draw.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import PAULI_LETTERS, PauliString, conjugate_by, named_gate, pauli_mul


@dataclass(frozen=True)
class PauliFrame:
    """Accumulated byproduct over all logical qubits, phase tracked."""

    element: PauliString

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliFrame":
        return cls(PauliString.identity(n_qubits))

    @property
    def n_qubits(self) -> int:
        return self.element.n_qubits

    def letter_on(self, qubit: int) -> str:
        return self.element.letters[qubit]


def frame_update(frame: PauliFrame, byproduct: PauliString) -> PauliFrame:
    """Compose a fresh byproduct onto the frame (byproduct acts after)."""
    if byproduct.n_qubits != frame.n_qubits:
        raise ValueError("byproduct and frame sizes differ")
    return PauliFrame(pauli_mul(byproduct, frame.element))


def frame_absorb_right(frame: PauliFrame, applied: PauliString) -> PauliFrame:
    """Account for a Pauli physically applied to the state the frame dresses."""
    if applied.n_qubits != frame.n_qubits:
        raise ValueError("applied word and frame sizes differ")
    return PauliFrame(pauli_mul(frame.element, applied))


def push_through(frame: PauliFrame, gate: str, targets: list[int]) -> PauliFrame:
    """Conjugate the frame through a Clifford tactics: element <- U element U+.

    Supported gates: H, G, CNOT, CH (CH only stays in the Pauli group for
    I/X' controls; anything else raises, since CH is not Clifford).
    """
    if gate not in ("H", "G", "CNOT", "CH"):
        raise ValueError(f"unsupported push gate {gate!r}")
    return PauliFrame(conjugate_by(frame.element, gate, targets))


_WORD_SYMBOLS = ("H", "X", "Xp", "Xpp", "I")

# H P H for each letter: X <-> X', X'' -> -X''.
_H_CONJ = {"I": (1, "I"), "X": (1, "Xp"), "Xp": (1, "X"), "Xpp": (-1, "Xpp")}


@dataclass(frozen=True)
class ReducedWord:
    """Canonical form of a word over {H, X, X', X'', I}: phase * letter * H^h."""

    letter: str
    with_h: bool
    phase: complex

    def to_matrix(self) -> np.ndarray:
        out = self.phase * named_gate(self.letter)
        if self.with_h:
            out = out @ named_gate("H")
        return out


def reduce_word(symbols: list[str]) -> ReducedWord:
    """Reduce a gate word to `phase * Pauli * H^(0 or 1)` by pushing every H
    to the right; an even number of H's therefore reduces to a pure Pauli.
    """
    if not symbols:
        raise ValueError("word must be nonempty")
    for s in symbols:
        if s not in _WORD_SYMBOLS:
            raise ValueError(f"unknown symbol {s!r}")
    phase: complex = 1 + 0j
    letter = "I"
    h_parity = 0
    for s in symbols:
        if s == "H":
            h_parity ^= 1
            continue
        # Append letter s on the right of (letter * H^h): commute it left
        # through the pending H's.
        incoming = s
        sign = 1
        if h_parity:
            sign, incoming = _H_CONJ[s]
        prod = pauli_mul(PauliString.from_letters(letter), PauliString.from_letters(incoming))
        phase *= sign * prod.phase
        letter = prod.letters[0]
    return ReducedWord(letter, bool(h_parity), phase)


@dataclass(frozen=True)
class WalkRecord:
    """Trajectory of the correction walk over the vertices {I, X, X', X''}."""

    steps: int
    trajectory: tuple[str, ...]  # visited vertices, starting vertex first
    labels: tuple[str, ...]      # edge labels drawn, one per step
    terminal: str


class WalkExhaustedError(RuntimeError):
    """The walk failed to reach its target within max_steps draws."""


def random_walk_cleanup(
    start: str,
    target: str,
    rng: np.random.Generator,
    max_steps: int = 200,
    parity: str = "any",
) -> WalkRecord:
    """Draw uniform random Pauli tactics until their running product with
    `start` equals `target`.

    Each draw models one random-Pauli gadget byproduct; the current vertex
    is uniform after every step, so success is geometric with p = 1/4.
    With parity="even" the stop condition is only checked after even step
    counts (tactics-measurement pairs).  Raises WalkExhaustedError after
    max_steps draws; the miss probability is (3/4)^max_steps.
    """
    if start not in PAULI_LETTERS or target not in PAULI_LETTERS:
        raise ValueError(f"start/target must be Pauli letters, got {start!r}, {target!r}")
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    if parity not in ("any", "even"):
        raise ValueError(f"parity must be 'any' or 'even', got {parity!r}")

    current = start
    trajectory = [start]
    labels: list[str] = []
    for step in range(1, max_steps + 1):
        label = PAULI_LETTERS[rng.integers(0, 4)]
        current = pauli_mul(
            PauliString.from_letters(label), PauliString.from_letters(current)
        ).letters[0]
        trajectory.append(current)
        labels.append(label)
        if current == target and (parity == "any" or step % 2 == 0):
            return WalkRecord(step, tuple(trajectory), tuple(labels), current)
    raise WalkExhaustedError(
        f"no hit within {max_steps} steps (miss probability (3/4)^{max_steps})"
    )
