"""Exact statevector simulation, the ground-truth oracle for everything else.

State vectors hold 2^n complex amplitudes with qubit 0 as the least
significant bit of the basis index.  This simulator is meant for desk-scale
registers (default cap 20 qubits); per-gate cost grows as O(2^n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, GateOp, gate_matrix

MAX_QUBITS = 20


class CapacityError(ValueError):
    """Register is too large for exact simulation."""


def zero_state(n_qubits: int) -> np.ndarray:
    """|0...0> on n qubits."""
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    state = np.zeros(2**n_qubits, dtype=complex)
    state[0] = 1.0
    return state


def _n_qubits_of(state: np.ndarray) -> int:
    n = int(np.log2(len(state)) + 0.5)
    if 2**n != len(state):
        raise ValueError("state length is not a power of two")
    return n


def apply_gate(state: np.ndarray, op: GateOp) -> np.ndarray:
    """Return the state after one gate; the input array is not modified."""
    n = _n_qubits_of(state)
    op.validate(n)
    if op.kind == "CNOT":
        c, t = op.qubits
        # Split the index into blocks around the two involved bits.
        hi, lo = max(c, t), min(c, t)
        s = state.reshape(2 ** (n - 1 - hi), 2, 2 ** (hi - 1 - lo), 2, 2**lo)
        new = s.copy()
        if c > t:
            new[:, 1, :, :, :] = s[:, 1, :, ::-1, :]
        else:
            new[:, :, :, 1, :] = s[:, ::-1, :, 1, :]
        return new.reshape(-1)
    if op.kind == "ORACLE":
        new = state.copy()
        new[sorted(op.marked)] *= -1.0
        return new
    if op.kind == "DIFFUSION":
        # Reflection 2|s><s| - I about the uniform superposition.
        return 2.0 * state.mean() - state
    q = op.qubits[0]
    u = gate_matrix(op)
    s = state.reshape(2 ** (n - 1 - q), 2, 2**q)
    return np.einsum("ab,ibj->iaj", u, s).reshape(-1)


def reduced_density(state: np.ndarray, n: int) -> np.ndarray:
    """Single-qubit reduced density matrix of qubit n (partial trace of the rest)."""
    nq = _n_qubits_of(state)
    if not 0 <= n < nq:
        raise ValueError(f"qubit index {n} out of range for {nq} qubits")
    s = state.reshape(2 ** (nq - 1 - n), 2, 2**n)
    a = np.moveaxis(s, 1, 0).reshape(2, -1)
    return a @ a.conj().T


def sqp(state: np.ndarray, n: int) -> float:
    """Marginal probability of measuring qubit n in |1>."""
    nq = _n_qubits_of(state)
    if not 0 <= n < nq:
        raise ValueError(f"qubit index {n} out of range for {nq} qubits")
    s = state.reshape(2 ** (nq - 1 - n), 2, 2**n)
    return float(np.sum(np.abs(s[:, 1, :]) ** 2))


def all_sqps(state: np.ndarray) -> np.ndarray:
    nq = _n_qubits_of(state)
    return np.array([sqp(state, q) for q in range(nq)])


def all_rdms(state: np.ndarray) -> np.ndarray:
    nq = _n_qubits_of(state)
    return np.array([reduced_density(state, q) for q in range(nq)])


@dataclass
class SimTrace:
    """Per-step record of a run: entry 0 is the initial state.

    rdms has shape (steps + 1, n_qubits, 2, 2) and sqps (steps + 1, n_qubits).
    """

    rdms: np.ndarray
    sqps: np.ndarray

    @property
    def n_steps(self) -> int:
        return len(self.sqps) - 1


def run_exact(circuit: Circuit, max_qubits: int = MAX_QUBITS) -> SimTrace:
    """Run a circuit exactly, recording every qubit's 1-RDM and SQP per step."""
    if circuit.n_qubits > max_qubits:
        raise CapacityError(
            f"{circuit.n_qubits} qubits exceeds the exact-simulation cap of {max_qubits}"
        )
    state = zero_state(circuit.n_qubits)
    rdms = [all_rdms(state)]
    sqps = [all_sqps(state)]
    for op in circuit.ops:
        state = apply_gate(state, op)
        rdms.append(all_rdms(state))
        sqps.append(all_sqps(state))
    return SimTrace(rdms=np.array(rdms), sqps=np.array(sqps))


def final_state(circuit: Circuit, max_qubits: int = MAX_QUBITS) -> np.ndarray:
    """Statevector after the whole circuit (no per-step recording)."""
    if circuit.n_qubits > max_qubits:
        raise CapacityError(
            f"{circuit.n_qubits} qubits exceeds the exact-simulation cap of {max_qubits}"
        )
    state = zero_state(circuit.n_qubits)
    for op in circuit.ops:
        state = apply_gate(state, op)
    return state
