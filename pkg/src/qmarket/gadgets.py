"""Measurement-only gadget implementations of tactics.

Every gadget appends one fresh ancilla, runs a fixed sequence of projective
measurements, and hands back the surviving wire plus the Pauli byproduct that
the outcomes pin down.  The defining contract, checked throughout the tests:

    post_state  ==  byproduct . target_unitary . input    (up to global phase)

Outcome eigenvalues o in {+1, -1} enter byproduct exponents through the bit
map b(o) = (1 - o)/2, so a correction is applied exactly when the outcome
is -1.  Byproduct laws per gadget (j, k, l, m are the outcomes in order):

    sigma_h        X^b(k) . X'^b(j*l)           target H
    sigma (xx)     X^b(j*l) . X'^b(k)           target I
    sigma (xpxp)   X^b(k) . X'^b(j*l)           target I
    sigma_t        X^b(k) . X'^b(j*l)           target T   (both variants)
    sigma_g        X'^b(k) . X''^b(j*l)         target G
    cnot           X'^b(m*k) (x) X^b(l*j)       target CNOT

The data wire is consumed (its final meter leaves it in a known eigenstate,
recorded in ancilla_residue) and the ancilla wire is relabeled into the data
slot, so callers always see a stable logical index.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import PauliString, named_gate, pauli_mul
from .statevec import (
    MeasurementOutcome,
    StateVector,
    append_qubit,
    append_state,
    apply_gate,
    measure_hermitian,
    measure_pauli,
    permute_qubits,
    remove_qubit,
)

SQRT2_INV = 1.0 / np.sqrt(2.0)

# The meter the sigma_t gadget names "T^-1 X T": (X - X'')/sqrt(2).
T_CONJUGATED_X = (named_gate("X") - named_gate("Xpp")) * SQRT2_INV

PLUS = np.array([1, 1], dtype=complex) * SQRT2_INV


def bit(outcome: int) -> int:
    """Exponent bit b(o) = (1 - o)/2 mapping +1 -> 0 and -1 -> 1."""
    if outcome not in (1, -1):
        raise ValueError(f"outcome must be +/-1, got {outcome}")
    return (1 - outcome) // 2


@dataclass(frozen=True)
class GadgetResult:
    """Outcomes, predicted byproduct, and the post-state on the logical wires."""

    outcomes: tuple[MeasurementOutcome, ...]
    byproduct: PauliString
    post_state: StateVector
    ancilla_residue: str

    @property
    def eigenvalues(self) -> tuple[int, ...]:
        return tuple(o.eigenvalue for o in self.outcomes)


SIGMA_VARIANTS = ("xx", "xpxp", "hsandwich")
SIGMA_T_VARIANTS = ("xprime_pair", "g_meter")

_BYPRODUCT_ARITY = {
    "sigma_h": 3,
    "sigma_h_swapped": 3,
    "sigma_xx": 3,
    "sigma_xpxp": 3,
    "sigma_hsandwich": 3,
    "sigma_t": 3,
    "sigma_g": 3,
    "cnot": 4,
}


def predicted_byproduct(kind: str, outcomes: list[int]) -> PauliString:
    """Closed-form byproduct for a gadget kind given its outcome eigenvalues."""
    if kind not in _BYPRODUCT_ARITY:
        raise ValueError(f"unknown gadget kind {kind!r}")
    if len(outcomes) != _BYPRODUCT_ARITY[kind]:
        raise ValueError(
            f"{kind} takes {_BYPRODUCT_ARITY[kind]} outcomes, got {len(outcomes)}"
        )
    for o in outcomes:
        bit(o)

    if kind == "cnot":
        j, k, l, m = outcomes
        word = PauliString.identity(2)
        if bit(m * k):
            word = pauli_mul(word, PauliString.from_letters("Xp", "I"))
        if bit(l * j):
            word = pauli_mul(word, PauliString.from_letters("I", "X"))
        return word

    j, k, l = outcomes
    if kind in ("sigma_h", "sigma_xpxp", "sigma_hsandwich", "sigma_t"):
        first, second = ("X", bit(k)), ("Xp", bit(j * l))
    elif kind == "sigma_h_swapped":
        first, second = ("Xp", bit(k)), ("X", bit(j * l))
    elif kind == "sigma_xx":
        first, second = ("X", bit(j * l)), ("Xp", bit(k))
    else:  # sigma_g
        first, second = ("Xp", bit(k)), ("Xpp", bit(j * l))
    word = PauliString.identity(1)
    for letter, expo in (first, second):
        if expo:
            word = pauli_mul(word, PauliString.from_letters(letter))
    return word


def _embed_byproduct(word: PauliString, n_qubits: int, wires: list[int]) -> PauliString:
    letters = ["I"] * n_qubits
    for wire, letter in zip(wires, word.letters):
        letters[wire] = letter
    return PauliString(word.phase, tuple(letters))


def _meter(state, letters, wires, rng, force):
    obs = PauliString.identity(state.n_qubits)
    for wire, letter in zip(wires, letters):
        obs = pauli_mul(obs, PauliString.single(state.n_qubits, wire, letter))
    return measure_pauli(state, obs, rng, force=force)


def _pop_force(forced, idx):
    return None if forced is None else forced[idx]


def _finish_single_wire(state, target, outcomes, byproduct_kind, raw_eigs):
    """Remove the consumed data wire, relabel the ancilla into its slot."""
    rest, _removed = remove_qubit(state, target)
    # After removal the fresh wire sits at the end; rotate it back to `target`.
    last = rest.n_qubits - 1
    order = list(range(target)) + [last] + list(range(target, last))
    post = permute_qubits(rest, order)
    word = predicted_byproduct(byproduct_kind, raw_eigs)
    byproduct = _embed_byproduct(word, rest.n_qubits, [target])
    residue = format(bit(raw_eigs[-1]), "b")
    return GadgetResult(tuple(outcomes), byproduct, post, residue)


def _check_target(state: StateVector, target: int) -> None:
    if target < 0 or target >= state.n_qubits:
        raise ValueError(f"target {target} out of range for {state.n_qubits} qubits")


def gadget_sigma_h(
    state: StateVector,
    target: int,
    rng: np.random.Generator | None = None,
    forced_outcomes: list[int] | None = None,
    swapped: bool = False,
) -> GadgetResult:
    """Implement H up to a Pauli byproduct via three meters and one ancilla.

    Sequence: X on the ancilla (j), X(x)X' on (data, ancilla) (k), X' on the
    data wire (l); the strategy migrates to the ancilla wire.  `swapped`
    exchanges the supply and demand meters (X <-> X') throughout, which
    implements the same tactics with the conjugate byproduct law.
    """
    _check_target(state, target)
    if forced_outcomes is not None and len(forced_outcomes) != 3:
        raise ValueError("sigma_h takes exactly 3 outcomes")
    n = state.n_qubits
    anc = n
    if not swapped:
        work = append_qubit(state, "0")
        o1, work = _meter(work, ["X"], [anc], rng, _pop_force(forced_outcomes, 0))
        o2, work = _meter(work, ["X", "Xp"], [target, anc], rng, _pop_force(forced_outcomes, 1))
        o3, work = _meter(work, ["Xp"], [target], rng, _pop_force(forced_outcomes, 2))
        kind = "sigma_h"
    else:
        work = append_state(state, PLUS)
        o1, work = _meter(work, ["Xp"], [anc], rng, _pop_force(forced_outcomes, 0))
        o2, work = _meter(work, ["Xp", "X"], [target, anc], rng, _pop_force(forced_outcomes, 1))
        o3, work = _meter(work, ["X"], [target], rng, _pop_force(forced_outcomes, 2))
        kind = "sigma_h_swapped"
    eigs = [o1.eigenvalue, o2.eigenvalue, o3.eigenvalue]
    return _finish_single_wire(work, target, [o1, o2, o3], kind, eigs)


def gadget_sigma(
    state: StateVector,
    target: int,
    rng: np.random.Generator | None = None,
    forced_outcomes: list[int] | None = None,
    variant: str = "xx",
) -> GadgetResult:
    """Random Pauli tactics: transfer the strategy while applying only a
    known outcome-dependent Pauli (target unitary I).

    Variants realize the three displayed forms: "xx" measures [X' anc,
    X(x)X pair, X' data], "xpxp" measures [X anc, X'(x)X' pair, X data],
    and "hsandwich" prepends an H gate to the plain transfer.
    """
    _check_target(state, target)
    if variant not in SIGMA_VARIANTS:
        raise ValueError(f"variant must be one of {SIGMA_VARIANTS}, got {variant!r}")
    if forced_outcomes is not None and len(forced_outcomes) != 3:
        raise ValueError("sigma takes exactly 3 outcomes")
    n = state.n_qubits
    anc = n
    if variant == "xx":
        work = append_state(state, PLUS)
        o1, work = _meter(work, ["Xp"], [anc], rng, _pop_force(forced_outcomes, 0))
        o2, work = _meter(work, ["X", "X"], [target, anc], rng, _pop_force(forced_outcomes, 1))
        o3, work = _meter(work, ["Xp"], [target], rng, _pop_force(forced_outcomes, 2))
    elif variant == "xpxp":
        work = append_qubit(state, "0")
        o1, work = _meter(work, ["X"], [anc], rng, _pop_force(forced_outcomes, 0))
        o2, work = _meter(work, ["Xp", "Xp"], [target, anc], rng, _pop_force(forced_outcomes, 1))
        o3, work = _meter(work, ["X"], [target], rng, _pop_force(forced_outcomes, 2))
    else:  # hsandwich: H gate, then the sigma_h meters (H H = I)
        work = apply_gate(state, named_gate("H"), [target])
        work = append_qubit(work, "0")
        o1, work = _meter(work, ["X"], [anc], rng, _pop_force(forced_outcomes, 0))
        o2, work = _meter(work, ["X", "Xp"], [target, anc], rng, _pop_force(forced_outcomes, 1))
        o3, work = _meter(work, ["Xp"], [target], rng, _pop_force(forced_outcomes, 2))
    eigs = [o1.eigenvalue, o2.eigenvalue, o3.eigenvalue]
    return _finish_single_wire(work, target, [o1, o2, o3], f"sigma_{variant}", eigs)


def gadget_sigma_t(
    state: StateVector,
    target: int,
    rng: np.random.Generator | None = None,
    forced_outcomes: list[int] | None = None,
    variant: str = "xprime_pair",
) -> GadgetResult:
    """Implement the phase-shift tactics T up to a Pauli byproduct.

    "xprime_pair": meters [X anc, X'(x)X' pair, T^-1 X T data].
    "g_meter":     H gate on the data wire, then [X anc, X(x)X' pair, G data];
                   equivalent because T^-1 X T = (X - X'')/sqrt(2) and
                   H (X - X'')/sqrt(2) H = G.
    The byproduct is always a pure Pauli; T commutes with X'.
    """
    _check_target(state, target)
    if variant not in SIGMA_T_VARIANTS:
        raise ValueError(f"variant must be one of {SIGMA_T_VARIANTS}, got {variant!r}")
    if forced_outcomes is not None and len(forced_outcomes) != 3:
        raise ValueError("sigma_t takes exactly 3 outcomes")
    n = state.n_qubits
    anc = n
    if variant == "xprime_pair":
        work = append_qubit(state, "0")
        o1, work = _meter(work, ["X"], [anc], rng, _pop_force(forced_outcomes, 0))
        o2, work = _meter(work, ["Xp", "Xp"], [target, anc], rng, _pop_force(forced_outcomes, 1))
        o3, work = measure_hermitian(
            work, T_CONJUGATED_X, [target], rng,
            force=_pop_force(forced_outcomes, 2),
            label=PauliString.identity(work.n_qubits),
        )
    else:
        work = apply_gate(state, named_gate("H"), [target])
        work = append_qubit(work, "0")
        o1, work = _meter(work, ["X"], [anc], rng, _pop_force(forced_outcomes, 0))
        o2, work = _meter(work, ["X", "Xp"], [target, anc], rng, _pop_force(forced_outcomes, 1))
        o3, work = measure_hermitian(
            work, named_gate("G"), [target], rng,
            force=_pop_force(forced_outcomes, 2),
            label=PauliString.identity(work.n_qubits),
        )
    eigs = [o1.eigenvalue, o2.eigenvalue, o3.eigenvalue]
    return _finish_single_wire(work, target, [o1, o2, o3], "sigma_t", eigs)


def gadget_sigma_g(
    state: StateVector,
    target: int,
    rng: np.random.Generator | None = None,
    forced_outcomes: list[int] | None = None,
) -> GadgetResult:
    """Implement G up to a Pauli byproduct: the sigma_h meters under the
    cyclic replacement X -> X', X' -> X'', X'' -> X.

    Sequence: X' on the ancilla (j), X'(x)X'' on (data, ancilla) (k), X''
    on the data wire (l).
    """
    _check_target(state, target)
    if forced_outcomes is not None and len(forced_outcomes) != 3:
        raise ValueError("sigma_g takes exactly 3 outcomes")
    n = state.n_qubits
    anc = n
    work = append_state(state, PLUS)
    o1, work = _meter(work, ["Xp"], [anc], rng, _pop_force(forced_outcomes, 0))
    o2, work = _meter(work, ["Xp", "Xpp"], [target, anc], rng, _pop_force(forced_outcomes, 1))
    o3, work = _meter(work, ["Xpp"], [target], rng, _pop_force(forced_outcomes, 2))
    eigs = [o1.eigenvalue, o2.eigenvalue, o3.eigenvalue]
    return _finish_single_wire(work, target, [o1, o2, o3], "sigma_g", eigs)


def gadget_cnot(
    state: StateVector,
    control: int,
    target: int,
    rng: np.random.Generator | None = None,
    forced_outcomes: list[int] | None = None,
) -> GadgetResult:
    """Implement CNOT up to a Pauli byproduct using one ancilla and four meters.

    Sequence: X on the ancilla (j), X(x)X' on (target, ancilla) (k),
    X(x)X' on (ancilla, control) (l), X' on the ancilla (m).  Control and
    target keep their wires; the ancilla is consumed.
    """
    if control == target:
        raise ValueError("control and target must differ")
    _check_target(state, control)
    _check_target(state, target)
    if forced_outcomes is not None and len(forced_outcomes) != 4:
        raise ValueError("cnot takes exactly 4 outcomes")
    n = state.n_qubits
    anc = n
    work = append_qubit(state, "0")
    o1, work = _meter(work, ["X"], [anc], rng, _pop_force(forced_outcomes, 0))
    o2, work = _meter(work, ["X", "Xp"], [target, anc], rng, _pop_force(forced_outcomes, 1))
    o3, work = _meter(work, ["X", "Xp"], [anc, control], rng, _pop_force(forced_outcomes, 2))
    o4, work = _meter(work, ["Xp"], [anc], rng, _pop_force(forced_outcomes, 3))
    eigs = [o1.eigenvalue, o2.eigenvalue, o3.eigenvalue, o4.eigenvalue]

    post, _removed = remove_qubit(work, anc)
    word = predicted_byproduct("cnot", eigs)
    byproduct = _embed_byproduct(word, n, [control, target])
    residue = format(bit(o4.eigenvalue), "b")
    return GadgetResult(tuple([o1, o2, o3, o4]), byproduct, post, residue)


def measure_xprime_derived(
    state: StateVector,
    target: int,
    rng: np.random.Generator | None = None,
    forced_outcomes: list[int] | None = None,
) -> tuple[MeasurementOutcome, StateVector]:
    """Measure X' on `target` using only an X meter and an X(x)X' meter.

    A fresh ancilla is measured in X (outcome j), then X(x)X' is measured on
    (ancilla, target) (outcome k).  Because the ancilla is in a definite X
    eigenstate, the pair outcome factorizes and the target's X' eigenvalue
    is j*k; the target collapses exactly as under a direct X' measurement.
    """
    _check_target(state, target)
    if forced_outcomes is not None and len(forced_outcomes) != 2:
        raise ValueError("derived X' takes exactly 2 outcomes")
    n = state.n_qubits
    anc = n
    work = append_qubit(state, "0")
    o1, work = _meter(work, ["X"], [anc], rng, _pop_force(forced_outcomes, 0))
    o2, work = _meter(work, ["X", "Xp"], [anc, target], rng, _pop_force(forced_outcomes, 1))
    post, _removed = remove_qubit(work, anc)
    reported = MeasurementOutcome(
        o1.eigenvalue * o2.eigenvalue,
        o2.probability,
        PauliString.single(n, target, "Xp"),
    )
    return reported, post


def measure_parity_conjugated(
    state: StateVector,
    pair: tuple[int, int],
    kind: str,
    rng: np.random.Generator | None = None,
    force: int | None = None,
) -> tuple[MeasurementOutcome, StateVector]:
    """Measure X(x)X or X'(x)X' as H-conjugated X(x)X' meters.

    kind "XX":   H on the second wire, measure X(x)X', undo the H.
    kind "XpXp": H on the first wire, measure X(x)X', undo the H.
    Statistically identical to the direct parity measurement; needed when the
    two agents sit on the same side of the market.
    """
    a, b = pair
    if a == b:
        raise ValueError("parity measurement needs two distinct qubits")
    _check_target(state, a)
    _check_target(state, b)
    if kind not in ("XX", "XpXp"):
        raise ValueError(f"kind must be XX or XpXp, got {kind!r}")
    h = named_gate("H")
    conj_wire = b if kind == "XX" else a
    work = apply_gate(state, h, [conj_wire])
    outcome, work = _meter(work, ["X", "Xp"], [a, b], rng, force)
    work = apply_gate(work, h, [conj_wire])
    letters = ("X", "X") if kind == "XX" else ("Xp", "Xp")
    obs = pauli_mul(
        PauliString.single(state.n_qubits, a, letters[0]),
        PauliString.single(state.n_qubits, b, letters[1]),
    )
    return MeasurementOutcome(outcome.eigenvalue, outcome.probability, obs), work


def measure_g_via_hghgh(
    state: StateVector,
    target: int,
    rng: np.random.Generator | None = None,
    force: int | None = None,
) -> tuple[MeasurementOutcome, StateVector]:
    """Measure the involution G interferometrically via its HGHGH form.

    An ancilla runs a Hadamard test around a controlled-H: the fixed gates
    H, G on the data wire make the controlled branch apply HGHGH = -G while
    the idle branch collapses to H G G H = I.  The ancilla's X' outcome
    therefore reports the NEGATED G eigenvalue (HGHGH equals G only up to
    the global phase -1, which a controlled circuit exposes); the reported
    outcome flips the sign back, and the target collapses onto the matching
    G eigenspace.
    """
    _check_target(state, target)
    n = state.n_qubits
    anc = n
    h = named_gate("H")
    g = named_gate("G")
    work = append_qubit(state, "0")
    work = apply_gate(work, h, [target])
    work = apply_gate(work, h, [anc])
    work = apply_gate(work, g, [target])
    work = apply_gate(work, named_gate("CH"), [anc, target])
    work = apply_gate(work, h, [anc])
    work = apply_gate(work, g, [target])
    work = apply_gate(work, h, [target])
    meter_force = None if force is None else -force
    outcome, work = _meter(work, ["Xp"], [anc], rng, meter_force)
    post, _removed = remove_qubit(work, anc)
    reported = MeasurementOutcome(
        -outcome.eigenvalue, outcome.probability, PauliString.single(n, target, "I")
    )
    return reported, post


GADGET_TARGET_UNITARIES = {
    "sigma_h": "H",
    "sigma_h_swapped": "H",
    "sigma_xx": "I",
    "sigma_xpxp": "I",
    "sigma_hsandwich": "I",
    "sigma_t": "T",
    "sigma_g": "G",
    "cnot": "CNOT",
}
