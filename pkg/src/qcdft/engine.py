"""Reduced-density-matrix circuit evolution with pluggable CNOT functionals.

The register is a list of single-qubit density matrices, one per qubit.
Single-qubit gates are exact (rho -> U rho U^dag).  A CNOT is approximated
by a functional acting on the (control, target) pair:

* plain:     Tr_{t/c}[ CX (rho_c x rho_t) CX^dag ]
* corrected: Tr_{t/c}[ CX U_m (rho_c x rho_t) U_m^dag CX^dag ]

where U_m = e^{i H(theta)} and theta for each branch comes from a provider
(typically a pair of trained networks, see qcdft.network).  Per-gate cost is
independent of the number of qubits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .circuits import Circuit, GateOp, gate_matrix
from .exact import SimTrace
from .linalg import CNOT_4, herm_expi, kron, trace_out_control, trace_out_target

RDM_TOL = 1e-10

#: Maps (rho_c, rho_t) to the pair of theta arrays for the two branches.
ThetaProvider = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]


class UnsupportedGateError(ValueError):
    """Gate kind the RDM engine cannot evolve (ORACLE / DIFFUSION)."""


class InvalidGateError(ValueError):
    """Single-qubit update matrix is not unitary."""


def zero_rdm() -> np.ndarray:
    """|0><0|, the initial state of every qubit."""
    return np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)


def check_rdm(rho: np.ndarray, tol: float = RDM_TOL) -> None:
    """Raise if rho is not Hermitian, unit-trace and PSD within tol."""
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise ValueError(f"1-RDM must be 2x2, got shape {rho.shape}")
    if abs(rho[0, 1] - np.conj(rho[1, 0])) > tol or abs(rho[0, 0].imag) > tol or abs(rho[1, 1].imag) > tol:
        raise ValueError("1-RDM is not Hermitian within tolerance")
    if abs(rho[0, 0] + rho[1, 1] - 1.0) > tol:
        raise ValueError("1-RDM trace differs from 1")
    # 2x2 Hermitian PSD test: non-negative diagonal and determinant.
    det = rho[0, 0].real * rho[1, 1].real - abs(rho[0, 1]) ** 2
    if rho[0, 0].real < -tol or rho[1, 1].real < -tol or det < -tol:
        raise ValueError("1-RDM has a negative eigenvalue beyond tolerance")


def sqp_of(rho: np.ndarray) -> float:
    """SQP of a 1-RDM: its lower-right diagonal entry, clamped to [0, 1]."""
    return min(max(float(np.real(rho[1, 1])), 0.0), 1.0)


def _clamp_psd(rho: np.ndarray) -> np.ndarray:
    """Zero out negative eigenvalues and restore the unit trace."""
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    rho = (v * w) @ v.conj().T
    return rho / np.trace(rho).real


def _renormalize(rho: np.ndarray) -> np.ndarray:
    """Restore 1-RDM invariants after a functional: Hermitian, trace 1, PSD.

    Floating-point drift over deep circuits produces tiny asymmetries and
    negative eigenvalues; this clamps them without disturbing clean inputs.
    """
    a = rho[0, 0].real
    d = rho[1, 1].real
    b = (rho[0, 1] + rho[1, 0].conjugate()) / 2
    tr = a + d
    a /= tr
    d /= tr
    b /= tr
    out = np.array([[a, b], [b.conjugate(), d]])
    # smallest eigenvalue of the 2x2 Hermitian in closed form
    half_gap = np.sqrt(((a - d) / 2) ** 2 + (b.real**2 + b.imag**2))
    if (a + d) / 2 - half_gap < 0.0:
        out = _clamp_psd(out)
    return out


def bernardi_cnot(rc: np.ndarray, rt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Plain CNOT functional: tensor, conjugate by CX, trace each side back out."""
    m = CNOT_4 @ kron(rc, rt) @ CNOT_4.conj().T
    return _renormalize(trace_out_target(m)), _renormalize(trace_out_control(m))


def corrected_cnot_given(
    rc: np.ndarray, rt: np.ndarray, theta_c: np.ndarray, theta_t: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Corrected CNOT functional with explicit theta arrays for both branches.

    The control branch conjugates by its own U_m before the CX and keeps the
    control marginal; the target branch does the same with its U_m and keeps
    the target marginal.
    """
    rho0 = kron(rc, rt)
    u_c = herm_expi(theta_c)
    u_t = herm_expi(theta_t)
    m_c = CNOT_4 @ (u_c @ rho0 @ u_c.conj().T) @ CNOT_4.conj().T
    m_t = CNOT_4 @ (u_t @ rho0 @ u_t.conj().T) @ CNOT_4.conj().T
    return _renormalize(trace_out_target(m_c)), _renormalize(trace_out_control(m_t))


def corrected_cnot(
    rc: np.ndarray, rt: np.ndarray, provider: ThetaProvider
) -> tuple[np.ndarray, np.ndarray]:
    """Corrected CNOT functional with thetas supplied by a provider."""
    theta_c, theta_t = provider(rc, rt)
    return corrected_cnot_given(rc, rt, theta_c, theta_t)


def corrected_cnot_batch(
    pairs: np.ndarray, thetas_c: np.ndarray, thetas_t: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Corrected CNOT on a stack of RDM pairs, one LAPACK/BLAS pass per stage.

    pairs has shape (B, 2, 2, 2) holding (rho_c, rho_t) per item; thetas are
    (B, 4, 4).  Matches corrected_cnot_given item by item (up to rounding)
    while amortizing the call overhead across a batch of independent circuits.
    """
    from .linalg import PAULI_KRON

    n = len(pairs)
    rcs, rts = pairs[:, 0], pairs[:, 1]
    rho0 = np.einsum("bij,bkl->bikjl", rcs, rts).reshape(n, 4, 4)

    h = np.tensordot(
        np.concatenate([thetas_c, thetas_t]).reshape(2 * n, 16), PAULI_KRON, axes=(1, 0)
    )
    w, v = np.linalg.eigh(h)
    u = (v * np.exp(1j * w)[:, None, :]) @ v.conj().swapaxes(1, 2)
    u_c, u_t = u[:n], u[n:]

    m_c = CNOT_4 @ (u_c @ rho0 @ u_c.conj().swapaxes(1, 2)) @ CNOT_4.conj().T
    m_t = CNOT_4 @ (u_t @ rho0 @ u_t.conj().swapaxes(1, 2)) @ CNOT_4.conj().T
    r_c = m_c.reshape(n, 2, 2, 2, 2)
    r_t = m_t.reshape(n, 2, 2, 2, 2)
    out_c = r_c[:, :, 0, :, 0] + r_c[:, :, 1, :, 1]
    out_t = r_t[:, 0, :, 0, :] + r_t[:, 1, :, 1, :]
    return _renormalize_batch(out_c), _renormalize_batch(out_t)


def _renormalize_batch(rhos: np.ndarray) -> np.ndarray:
    """Vectorized _renormalize over a (B, 2, 2) stack."""
    rhos = (rhos + rhos.conj().swapaxes(1, 2)) / 2
    rhos /= np.trace(rhos.real, axis1=1, axis2=2)[:, None, None]
    a, d, b = rhos[:, 0, 0].real, rhos[:, 1, 1].real, rhos[:, 0, 1]
    lo = (a + d) / 2 - np.sqrt(((a - d) / 2) ** 2 + np.abs(b) ** 2)
    for i in np.nonzero(lo < 0.0)[0]:
        rhos[i] = _clamp_psd(rhos[i])
    return rhos


@dataclass(frozen=True)
class CnotFunctional:
    """CNOT update rule: plain when theta_provider is None, corrected otherwise.

    theta_batch, when set, maps a (B, 6) feature matrix to a pair of
    (B, 4, 4) theta stacks and lets batched runners amortize inference
    across independent circuits.  It must agree with theta_provider.
    """

    theta_provider: ThetaProvider | None = None
    theta_batch: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]] | None = None

    def apply(self, rc: np.ndarray, rt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self.theta_provider is None:
            return bernardi_cnot(rc, rt)
        return corrected_cnot(rc, rt, self.theta_provider)


BERNARDI = CnotFunctional()


def constant_theta_functional(theta_c: np.ndarray, theta_t: np.ndarray) -> CnotFunctional:
    """Functional that ignores its inputs and always uses the given thetas."""
    theta_c = np.array(theta_c, dtype=float)
    theta_t = np.array(theta_t, dtype=float)

    def provider(rc, rt):
        return theta_c, theta_t

    def batch(features):
        n = len(features)
        return (
            np.broadcast_to(theta_c, (n, 4, 4)),
            np.broadcast_to(theta_t, (n, 4, 4)),
        )

    return CnotFunctional(theta_provider=provider, theta_batch=batch)


@dataclass
class RdmRegister:
    """Ordered collection of 1-RDMs plus a step counter."""

    rdms: np.ndarray  # (n_qubits, 2, 2) complex
    step: int = 0

    @property
    def n_qubits(self) -> int:
        return len(self.rdms)

    def sqps(self) -> np.ndarray:
        return np.clip(self.rdms[:, 1, 1].real, 0.0, 1.0)


def init_register(n: int) -> RdmRegister:
    """All-|0> register of n qubits."""
    if n < 1:
        raise ValueError("register needs at least one qubit")
    rdms = np.zeros((n, 2, 2), dtype=complex)
    rdms[:, 0, 0] = 1.0
    return RdmRegister(rdms=rdms)


def apply_1q(reg: RdmRegister, n: int, u: np.ndarray, check: bool = True) -> RdmRegister:
    """Exact single-qubit update rho_n -> u rho_n u^dag (in place), step += 1."""
    if not 0 <= n < reg.n_qubits:
        raise ValueError(f"qubit index {n} out of range")
    u = np.asarray(u, dtype=complex)
    if check:
        if u.shape != (2, 2):
            raise InvalidGateError(f"gate matrix must be 2x2, got {u.shape}")
        dev = np.abs(u @ u.conj().T - np.eye(2)).max()
        if dev > RDM_TOL:
            raise InvalidGateError(f"gate is not unitary (|UU^dag - I| = {dev:.2e})")
    reg.rdms[n] = u @ reg.rdms[n] @ u.conj().T
    reg.step += 1
    return reg


def apply_op(reg: RdmRegister, op: GateOp, functional: CnotFunctional = BERNARDI) -> RdmRegister:
    """Apply one circuit op to the register (CNOTs go through the functional)."""
    if op.kind in ("ORACLE", "DIFFUSION"):
        raise UnsupportedGateError(
            f"{op.kind} is a global operation; the RDM engine only evolves "
            "single-qubit gates and CNOT"
        )
    if op.kind == "CNOT":
        c, t = op.qubits
        reg.rdms[c], reg.rdms[t] = functional.apply(reg.rdms[c], reg.rdms[t])
        reg.step += 1
        return reg
    return apply_1q(reg, op.qubits[0], gate_matrix(op), check=False)


def run_qcdft(circuit: Circuit, functional: CnotFunctional = BERNARDI) -> SimTrace:
    """Evolve a circuit's RDM register, recording all 1-RDMs and SQPs per step."""
    reg = init_register(circuit.n_qubits)
    rdms = [reg.rdms.copy()]
    sqps = [reg.sqps()]
    for op in circuit.ops:
        apply_op(reg, op, functional)
        rdms.append(reg.rdms.copy())
        sqps.append(reg.sqps())
    return SimTrace(rdms=np.array(rdms), sqps=np.array(sqps))


def target_sqp_update(pc: float, pt: float) -> float:
    """Post-CNOT target SQP for diagonal inputs: pt + pc * (1 - 2 pt).

    Never moves the target SQP further from 0.5 than it already was, which
    is why repeated CNOTs drive SQPs to 0.5.
    """
    if not 0.0 <= pc <= 1.0 or not 0.0 <= pt <= 1.0:
        raise ValueError("SQPs must lie in [0, 1]")
    value = pt + pc * (1.0 - 2.0 * pt)
    return min(max(value, 0.0), 1.0)


def product_joint_prob(reg: RdmRegister, x) -> float:
    """Joint outcome probability under the product-state assumption.

    x is a bit sequence (string or iterable) with x[i] the outcome of qubit i.
    Only meaningful when the true state is unentangled.
    """
    bits = [int(b) for b in x]
    if len(bits) != reg.n_qubits:
        raise ValueError(f"bitstring length {len(bits)} != {reg.n_qubits} qubits")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("bitstring entries must be 0 or 1")
    probs = reg.sqps()
    factors = np.where(np.array(bits) == 1, probs, 1.0 - probs)
    return float(np.prod(factors))


def product_expectation(reg: RdmRegister, observables) -> float:
    """Expectation of a tensor-product observable under the product-state assumption.

    One Hermitian 2x2 observable per qubit; the result is the product of the
    single-qubit traces Tr[rho_i O_i].
    """
    if len(observables) != reg.n_qubits:
        raise ValueError(f"need {reg.n_qubits} observables, got {len(observables)}")
    value = 1.0
    for rho, obs in zip(reg.rdms, observables):
        obs = np.asarray(obs, dtype=complex)
        if np.abs(obs - obs.conj().T).max() > RDM_TOL:
            raise ValueError("observables must be Hermitian")
        value *= float(np.trace(rho @ obs).real)
    return value
