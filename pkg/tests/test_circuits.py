"""Circuit construction and the plain-text format."""

import numpy as np
import pytest

from qcdft.circuits import (
    Circuit,
    GateOp,
    cnot,
    format_circuit,
    gate_matrix,
    h,
    parse_circuit,
    phase_flip_oracle,
    rx,
)


def test_gate_matrices_are_unitary():
    ops = [h(0), GateOp("X", (0,)), GateOp("Y", (0,)), GateOp("Z", (0,)),
           rx(0, 0.7), GateOp("RY", (0,), angle=1.2), GateOp("RZ", (0,), angle=-2.5)]
    for op in ops:
        u = gate_matrix(op)
        assert np.abs(u @ u.conj().T - np.eye(2)).max() < 1e-12


def test_validation_rejects_bad_ops():
    with pytest.raises(ValueError):
        Circuit(2, (GateOp("H", (2,)),))  # qubit out of range
    with pytest.raises(ValueError):
        Circuit(2, (GateOp("CNOT", (1, 1)),))  # control == target
    with pytest.raises(ValueError):
        Circuit(2, (GateOp("RX", (0,), angle=np.inf),))
    with pytest.raises(ValueError):
        Circuit(0, ())
    with pytest.raises(ValueError):
        Circuit(2, (GateOp("SWAP", (0, 1)),))


def test_text_round_trip():
    circuit = Circuit(
        3,
        (h(0), rx(1, 1.5707963), cnot(0, 2), phase_flip_oracle([5, 6]),
         GateOp("DIFFUSION")),
    )
    text = format_circuit(circuit)
    back = parse_circuit(text)
    assert back.n_qubits == circuit.n_qubits
    assert back.ops == circuit.ops
    assert back.sequence_hash() == circuit.sequence_hash()


def test_parse_example_lines():
    circuit = parse_circuit("QUBITS 2\nH 0\nRX 0 1.5707963\nCNOT 0 1\n")
    assert circuit.n_qubits == 2
    assert circuit.ops[0] == h(0)
    assert circuit.ops[1].angle == pytest.approx(1.5707963)
    assert circuit.ops[2] == cnot(0, 1)


def test_parse_skips_comments_and_blanks():
    circuit = parse_circuit("# a comment\nQUBITS 1\n\nH 0\n")
    assert len(circuit.ops) == 1


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ValueError, match="line 2"):
        parse_circuit("QUBITS 2\nFOO 0\n")
    with pytest.raises(ValueError, match="QUBITS"):
        parse_circuit("H 0\n")


def test_sequence_hash_sensitive_to_order():
    c1 = Circuit(2, (h(0), cnot(0, 1)))
    c2 = Circuit(2, (cnot(0, 1), h(0)))
    assert c1.sequence_hash() != c2.sequence_hash()
