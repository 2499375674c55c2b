"""Grover search on the exact simulator, analyzed through per-qubit SQPs.

With a single marked state, every qubit's SQP moves monotonically toward its
solution bit over the first iterations, so rounding the SQPs recovers the
solution; with two solutions differing in one bit, that bit's SQP stays
pinned at 0.5 while all others behave like the single-solution case.

Solution bitstrings are written most-significant-qubit first: in "10110" on
five qubits, qubit 4 is the leading '1'.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, diffusion, h, phase_flip_oracle
from .exact import MAX_QUBITS, all_sqps, apply_gate, zero_state


class AmbiguousQubitError(ValueError):
    """A qubit's SQP is too close to 0.5 to round to a solution bit."""


class DecodeNotApplicableError(ValueError):
    """The SQP pattern does not match the requested decoding scheme."""


@dataclass(frozen=True)
class GroverSpec:
    n_qubits: int
    solutions: tuple[str, ...]
    iterations: int

    def __post_init__(self):
        sols = tuple(self.solutions)
        object.__setattr__(self, "solutions", sols)
        if not sols:
            raise ValueError("need at least one solution")
        if len(set(sols)) != len(sols):
            raise ValueError("solutions must be distinct")
        if len(sols) >= 2**self.n_qubits:
            raise ValueError("cannot mark every basis state")
        for s in sols:
            if len(s) != self.n_qubits or set(s) - {"0", "1"}:
                raise ValueError(f"solution {s!r} is not a {self.n_qubits}-bit string")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")

    def marked_indices(self) -> frozenset[int]:
        return frozenset(int(s, 2) for s in self.solutions)


def grover_circuit(spec: GroverSpec) -> Circuit:
    """H on every qubit, then `iterations` oracle + diffusion pairs."""
    ops = [h(q) for q in range(spec.n_qubits)]
    for _ in range(spec.iterations):
        ops.append(phase_flip_oracle(spec.marked_indices()))
        ops.append(diffusion())
    return Circuit(spec.n_qubits, tuple(ops))


def grover_sqp_table(spec: GroverSpec, max_qubits: int = MAX_QUBITS) -> np.ndarray:
    """SQPs per iteration: table[i, q] after i oracle+diffusion pairs.

    Row 0 is the uniform superposition (all 0.5).  Shape is
    (iterations + 1, n_qubits).
    """
    if spec.n_qubits > max_qubits:
        from .exact import CapacityError

        raise CapacityError(f"{spec.n_qubits} qubits exceeds the cap of {max_qubits}")
    state = zero_state(spec.n_qubits)
    for q in range(spec.n_qubits):
        state = apply_gate(state, h(q))
    rows = [all_sqps(state)]
    oracle = phase_flip_oracle(spec.marked_indices())
    for _ in range(spec.iterations):
        state = apply_gate(state, oracle)
        state = apply_gate(state, diffusion())
        rows.append(all_sqps(state))
    return np.array(rows)


def decode_single_solution(sqps: np.ndarray, tie_tolerance: float = 0.05) -> str:
    """Round each SQP to a bit; assumes a single-solution search.

    Returns the solution bitstring, most significant qubit first.  Raises
    AmbiguousQubitError if any SQP sits within tie_tolerance of 0.5.
    """
    sqps = np.asarray(sqps, dtype=float)
    tied = np.abs(sqps - 0.5) <= tie_tolerance
    if tied.any():
        qubits = [int(q) for q in np.nonzero(tied)[0]]
        raise AmbiguousQubitError(f"qubit(s) {qubits} have SQP within {tie_tolerance} of 0.5")
    bits = (sqps > 0.5).astype(int)
    return "".join(str(b) for b in bits[::-1])


def decode_two_solutions(
    sqps: np.ndarray, tie_tolerance: float = 0.05
) -> tuple[str, str]:
    """Decode a two-solution search where the solutions differ in one bit.

    Exactly one qubit must sit within tie_tolerance of 0.5; the two returned
    bitstrings agree on every decisive qubit and differ on the tied one.
    """
    sqps = np.asarray(sqps, dtype=float)
    tied = np.abs(sqps - 0.5) <= tie_tolerance
    n_tied = int(tied.sum())
    if n_tied != 1:
        raise DecodeNotApplicableError(
            f"two-solution decode needs exactly one tied qubit, found {n_tied}"
        )
    bits = (sqps > 0.5).astype(int)
    tied_qubit = int(np.nonzero(tied)[0][0])
    pair = []
    for value in (0, 1):
        bits[tied_qubit] = value
        pair.append("".join(str(b) for b in bits[::-1]))
    return pair[0], pair[1]


def write_grover_csv(path, table: np.ndarray) -> None:
    """CSV rows iteration,qubit,sqp for a grover_sqp_table result."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "qubit", "sqp"])
        for it in range(table.shape[0]):
            for q in range(table.shape[1]):
                writer.writerow([it, q, repr(float(table[it, q]))])
