"""Gate and circuit descriptions shared by the exact and RDM simulators.

Qubit convention is little-endian throughout: qubit 0 is the least
significant bit of a computational-basis index.

The plain-text circuit format has one op per line, e.g.::

    H 0
    RX 0 1.5707963
    CNOT 0 1
    ORACLE 22 23
    DIFFUSION

Blank lines and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import I2, SIGMA_X, SIGMA_Y, SIGMA_Z

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

#: Gate kinds acting on a single qubit with no parameter.
FIXED_1Q = {"H": HADAMARD, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}
ROTATIONS = ("RX", "RY", "RZ")
GATE_KINDS = ("H", "X", "Y", "Z", "RX", "RY", "RZ", "CNOT", "ORACLE", "DIFFUSION")


@dataclass(frozen=True)
class GateOp:
    """One circuit operation.

    kind: one of GATE_KINDS ("ORACLE" is a phase flip on a set of marked
    basis indices; "DIFFUSION" reflects about the uniform superposition).
    qubits: target qubit for 1q gates, (control, target) for CNOT, () otherwise.
    angle: rotation angle in radians for RX/RY/RZ.
    marked: marked basis indices for ORACLE.
    """

    kind: str
    qubits: tuple[int, ...] = ()
    angle: float | None = None
    marked: frozenset[int] = field(default_factory=frozenset)

    def validate(self, n_qubits: int) -> None:
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        for q in self.qubits:
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit index {q} out of range for {n_qubits} qubits")
        if self.kind == "CNOT":
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError("CNOT needs distinct control and target qubits")
        elif self.kind in ROTATIONS:
            if len(self.qubits) != 1:
                raise ValueError(f"{self.kind} acts on exactly one qubit")
            if self.angle is None or not np.isfinite(self.angle):
                raise ValueError(f"{self.kind} needs a finite angle")
        elif self.kind in FIXED_1Q:
            if len(self.qubits) != 1:
                raise ValueError(f"{self.kind} acts on exactly one qubit")
        elif self.kind == "ORACLE":
            if not self.marked:
                raise ValueError("ORACLE needs at least one marked basis index")
            for idx in self.marked:
                if not 0 <= idx < 2**n_qubits:
                    raise ValueError(f"marked index {idx} out of range")


def gate_matrix(op: GateOp) -> np.ndarray:
    """2x2 unitary for a single-qubit gate op."""
    if op.kind in FIXED_1Q:
        return FIXED_1Q[op.kind]
    if op.kind in ROTATIONS:
        t = op.angle / 2
        c, s = np.cos(t), np.sin(t)
        if op.kind == "RX":
            return np.array([[c, -1j * s], [-1j * s, c]])
        if op.kind == "RY":
            return np.array([[c, -s], [s, c]], dtype=complex)
        return np.array([[np.exp(-1j * t), 0], [0, np.exp(1j * t)]])
    raise ValueError(f"{op.kind} has no single-qubit matrix")


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    ops: tuple[GateOp, ...] = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            op.validate(self.n_qubits)

    def sequence_hash(self) -> int:
        """Order-sensitive hash of the gate sequence (same circuit, same hash)."""
        items = tuple(
            (op.kind, op.qubits, op.angle, tuple(sorted(op.marked))) for op in self.ops
        )
        return hash((self.n_qubits, items))


def h(q: int) -> GateOp:
    return GateOp("H", (q,))


def x(q: int) -> GateOp:
    return GateOp("X", (q,))


def y(q: int) -> GateOp:
    return GateOp("Y", (q,))


def z(q: int) -> GateOp:
    return GateOp("Z", (q,))


def rx(q: int, angle: float) -> GateOp:
    return GateOp("RX", (q,), angle=float(angle))


def ry(q: int, angle: float) -> GateOp:
    return GateOp("RY", (q,), angle=float(angle))


def rz(q: int, angle: float) -> GateOp:
    return GateOp("RZ", (q,), angle=float(angle))


def cnot(control: int, target: int) -> GateOp:
    return GateOp("CNOT", (control, target))


def phase_flip_oracle(marked) -> GateOp:
    return GateOp("ORACLE", (), marked=frozenset(int(m) for m in marked))


def diffusion() -> GateOp:
    return GateOp("DIFFUSION", ())


def format_op(op: GateOp) -> str:
    if op.kind in ROTATIONS:
        return f"{op.kind} {op.qubits[0]} {op.angle!r}"
    if op.kind == "CNOT":
        return f"CNOT {op.qubits[0]} {op.qubits[1]}"
    if op.kind == "ORACLE":
        return "ORACLE " + " ".join(str(m) for m in sorted(op.marked))
    if op.kind == "DIFFUSION":
        return "DIFFUSION"
    return f"{op.kind} {op.qubits[0]}"


def format_circuit(circuit: Circuit) -> str:
    lines = [f"QUBITS {circuit.n_qubits}"]
    lines.extend(format_op(op) for op in circuit.ops)
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    """Parse the plain-text circuit format (see module docstring)."""
    n_qubits = None
    ops: list[GateOp] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0].upper()
        try:
            if kind == "QUBITS":
                n_qubits = int(parts[1])
            elif kind in FIXED_1Q:
                ops.append(GateOp(kind, (int(parts[1]),)))
            elif kind in ROTATIONS:
                ops.append(GateOp(kind, (int(parts[1]),), angle=float(parts[2])))
            elif kind == "CNOT":
                ops.append(GateOp(kind, (int(parts[1]), int(parts[2]))))
            elif kind == "ORACLE":
                ops.append(phase_flip_oracle(int(p) for p in parts[1:]))
            elif kind == "DIFFUSION":
                ops.append(GateOp(kind))
            else:
                raise ValueError(f"unknown gate kind {kind!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: cannot parse {line!r}: {exc}") from exc
    if n_qubits is None:
        raise ValueError("circuit text is missing a QUBITS line")
    return Circuit(n_qubits, tuple(ops))
