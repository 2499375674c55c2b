"""Fixed-dimension complex linear algebra for one- and two-qubit operators.

Everything here works on plain numpy arrays: 2x2 matrices for single-qubit
density matrices and gates, 4x4 matrices for two-qubit operators.  The
two-qubit index convention is ``kron(control, target)``: the first tensor
factor (control) is the high bit of the 4-dimensional index.
"""

from __future__ import annotations

import numpy as np

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

#: Pauli basis {I, X, Y, Z} indexing the rows/columns of a theta array.
PAULIS = (I2, SIGMA_X, SIGMA_Y, SIGMA_Z)

#: PAULI_KRON[4*i + j] = kron(PAULIS[i], PAULIS[j]); generators of H(theta).
PAULI_KRON = np.array([np.kron(a, b) for a in PAULIS for b in PAULIS])

#: CNOT on kron(control, target): flips the target when the control is |1>.
CNOT_4 = np.array(
    [[1, 0, 0, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0]],
    dtype=complex,
)


class NotPsdError(ValueError):
    """A matrix required to be positive semidefinite has a negative eigenvalue."""


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; (a x b)[2i+k, 2j+l] = a[i,j] * b[k,l].

    The 2x2 case is written out by blocks: np.kron's generic reshape
    machinery costs more than the whole CNOT functional at this size.
    """
    if a.shape == (2, 2) and b.shape == (2, 2):
        out = np.empty((4, 4), dtype=np.result_type(a, b, np.complex128))
        out[0:2, 0:2] = a[0, 0] * b
        out[0:2, 2:4] = a[0, 1] * b
        out[2:4, 0:2] = a[1, 0] * b
        out[2:4, 2:4] = a[1, 1] * b
        return out
    return np.kron(a, b)


def trace_out_target(m: np.ndarray) -> np.ndarray:
    """Partial trace over the second (target) factor, keeping the control."""
    r = m.reshape(2, 2, 2, 2)
    return r[:, 0, :, 0] + r[:, 1, :, 1]


def trace_out_control(m: np.ndarray) -> np.ndarray:
    """Partial trace over the first (control) factor, keeping the target."""
    r = m.reshape(2, 2, 2, 2)
    return r[0, :, 0, :] + r[1, :, 1, :]


def partial_trace(m: np.ndarray, keep: str) -> np.ndarray:
    """Reduce a 4x4 two-qubit operator to the kept subsystem ('control'|'target')."""
    if keep == "control":
        return trace_out_target(m)
    if keep == "target":
        return trace_out_control(m)
    raise ValueError(f"keep must be 'control' or 'target', got {keep!r}")


def hermitize(m: np.ndarray) -> np.ndarray:
    """Hermitian part (m + m^dagger) / 2."""
    return (m + m.conj().T) / 2


def pauli_hamiltonian(theta: np.ndarray) -> np.ndarray:
    """H(theta) = sum_ij theta[i,j] * sigma_i (x) sigma_j, Hermitian for real theta."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (4, 4):
        raise ValueError(f"theta must have shape (4, 4), got {theta.shape}")
    return np.tensordot(theta.reshape(16), PAULI_KRON, axes=(0, 0))


def herm_expi(theta: np.ndarray) -> np.ndarray:
    """Unitary e^{i H(theta)} for a real 4x4 coefficient array.

    Computed by eigendecomposition of the Hermitian H(theta), so the result
    is unitary to machine precision for any finite theta.
    """
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta contains non-finite entries")
    h = pauli_hamiltonian(theta)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def sqrtm_psd(m: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues in [-tol, 0) are treated as rounding noise and clamped to 0;
    anything below -tol raises NotPsdError.
    """
    w, v = np.linalg.eigh(hermitize(np.asarray(m)))
    if w[0] < -tol:
        raise NotPsdError(f"matrix has eigenvalue {w[0]:.3e} < -{tol:.0e}")
    w = np.sqrt(np.clip(w, 0.0, None))
    return (v * w) @ v.conj().T


def fidelity(r1: np.ndarray, r2: np.ndarray) -> float:
    """Uhlmann fidelity Tr sqrt( sqrt(r1) r2 sqrt(r1) ), clamped to [0, 1].

    Both arguments must be density matrices (Hermitian, unit trace, PSD
    within tolerance).  The value is 1 for identical states and 0 for
    orthogonal pure states.
    """
    s1 = sqrtm_psd(r1)
    inner = s1 @ np.asarray(r2) @ s1
    w = np.linalg.eigvalsh(hermitize(inner))
    if w[0] < -1e-10:
        raise NotPsdError(f"inner fidelity matrix has eigenvalue {w[0]:.3e}")
    f = float(np.sum(np.sqrt(np.clip(w, 0.0, None))))
    return min(max(f, 0.0), 1.0)
