"""RDM engine: exact 1q updates, CNOT functionals, product-state formulas."""

import numpy as np
import pytest

from qcdft import exact
from qcdft.circuits import Circuit, GateOp, cnot, diffusion, gate_matrix, h, phase_flip_oracle
from qcdft.engine import (
    BERNARDI,
    InvalidGateError,
    UnsupportedGateError,
    apply_1q,
    bernardi_cnot,
    check_rdm,
    constant_theta_functional,
    corrected_cnot,
    corrected_cnot_given,
    init_register,
    product_expectation,
    product_joint_prob,
    run_qcdft,
    sqp_of,
    target_sqp_update,
)
from qcdft.linalg import CNOT_4, I2, SIGMA_X, SIGMA_Y, SIGMA_Z, fidelity, herm_expi

P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)
PLUS = np.full((2, 2), 0.5, dtype=complex)
HADAMARD = gate_matrix(h(0))


def random_rdm(rng):
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_1q_ops(rng, n_qubits, n_gates):
    kinds = ["H", "X", "Y", "Z", "RX", "RY", "RZ"]
    ops = []
    for _ in range(n_gates):
        kind = kinds[rng.integers(len(kinds))]
        q = int(rng.integers(n_qubits))
        angle = float(rng.uniform(0, 2 * np.pi)) if kind.startswith("R") else None
        ops.append(GateOp(kind, (q,), angle=angle))
    return ops


# ---------------------------------------------------------------------------
# register basics


def test_init_register():
    reg = init_register(5)
    assert reg.step == 0
    assert reg.rdms.shape == (5, 2, 2)
    for rho in reg.rdms:
        assert np.array_equal(rho, P0)
    assert np.all(reg.sqps() == 0.0)


def test_init_register_single_qubit():
    assert np.array_equal(init_register(1).rdms[0], P0)


def test_init_register_rejects_zero():
    with pytest.raises(ValueError):
        init_register(0)


def test_init_register_large_is_linear():
    reg = init_register(20)
    assert reg.rdms.nbytes == 20 * 4 * 16  # one 2x2 complex matrix per qubit


def test_sqp_of():
    assert sqp_of(P0) == 0.0
    assert sqp_of(P1) == 1.0
    assert sqp_of(I2 / 2) == 0.5


# ---------------------------------------------------------------------------
# apply_1q


def test_apply_1q_x_gate():
    reg = init_register(2)
    apply_1q(reg, 0, SIGMA_X)
    assert np.abs(reg.rdms[0] - P1).max() < 1e-15
    assert np.array_equal(reg.rdms[1], P0)
    assert reg.step == 1


def test_apply_1q_h_twice_is_identity():
    reg = init_register(1)
    apply_1q(reg, 0, HADAMARD)
    apply_1q(reg, 0, HADAMARD)
    assert np.abs(reg.rdms[0] - P0).max() < 1e-12


def test_apply_1q_rejects_non_unitary():
    reg = init_register(1)
    with pytest.raises(InvalidGateError):
        apply_1q(reg, 0, np.array([[1.0, 0.1], [0.0, 1.0]]))


def test_1q_only_circuit_matches_exact():
    rng = np.random.default_rng(31)
    circuit = Circuit(4, tuple(random_1q_ops(rng, 4, 60)))
    trace_e = exact.run_exact(circuit)
    trace_q = run_qcdft(circuit, BERNARDI)
    for s in range(61):
        for q in range(4):
            f = fidelity(trace_e.rdms[s, q], trace_q.rdms[s, q])
            assert f >= 1 - 1e-10
    assert np.abs(trace_e.sqps - trace_q.sqps).max() < 1e-10


# ---------------------------------------------------------------------------
# CNOT functionals


def test_bernardi_control_off():
    rng = np.random.default_rng(32)
    rt = random_rdm(rng)
    rc2, rt2 = bernardi_cnot(P0, rt)
    assert np.abs(rc2 - P0).max() < 1e-12
    assert np.abs(rt2 - rt).max() < 1e-12


def test_bernardi_control_on():
    rc2, rt2 = bernardi_cnot(P1, P0)
    assert np.abs(rc2 - P1).max() < 1e-12
    assert np.abs(rt2 - P1).max() < 1e-12


def test_bernardi_plus_control():
    rc2, rt2 = bernardi_cnot(PLUS, P0)
    assert np.abs(rc2 - I2 / 2).max() < 1e-12
    assert np.abs(rt2 - I2 / 2).max() < 1e-12


def _functional_oracle(rc, rt, u_m=None):
    """Explicit 4x4 composition oracle for either functional."""
    rho = np.kron(rc, rt)
    if u_m is not None:
        rho = u_m @ rho @ u_m.conj().T
    rho = CNOT_4 @ rho @ CNOT_4.conj().T
    r = rho.reshape(2, 2, 2, 2)
    return np.trace(r, axis1=1, axis2=3), np.trace(r, axis1=0, axis2=2)


def test_bernardi_random_matches_oracle():
    rng = np.random.default_rng(33)
    for _ in range(30):
        rc, rt = random_rdm(rng), random_rdm(rng)
        got_c, got_t = bernardi_cnot(rc, rt)
        exp_c, exp_t = _functional_oracle(rc, rt)
        assert np.abs(got_c - exp_c).max() < 1e-12
        assert np.abs(got_t - exp_t).max() < 1e-12


def test_bernardi_outputs_are_valid_rdms():
    rng = np.random.default_rng(34)
    for _ in range(30):
        rc2, rt2 = bernardi_cnot(random_rdm(rng), random_rdm(rng))
        check_rdm(rc2)
        check_rdm(rt2)


def test_corrected_with_zero_theta_equals_bernardi():
    rng = np.random.default_rng(35)
    zero = np.zeros((4, 4))
    for _ in range(20):
        rc, rt = random_rdm(rng), random_rdm(rng)
        got = corrected_cnot_given(rc, rt, zero, zero)
        expected = bernardi_cnot(rc, rt)
        for g, e in zip(got, expected):
            assert np.abs(g - e).max() < 1e-14


def test_corrected_global_phase_term_is_inert():
    rng = np.random.default_rng(36)
    phase = np.zeros((4, 4))
    phase[0, 0] = 0.83
    for _ in range(20):
        rc, rt = random_rdm(rng), random_rdm(rng)
        base = corrected_cnot_given(rc, rt, np.zeros((4, 4)), np.zeros((4, 4)))
        shifted = corrected_cnot_given(rc, rt, phase, phase)
        for g, e in zip(shifted, base):
            assert np.abs(g - e).max() < 1e-12


def test_corrected_random_theta_matches_matrix_chain_oracle():
    rng = np.random.default_rng(37)
    for _ in range(30):
        rc, rt = random_rdm(rng), random_rdm(rng)
        theta_c = rng.uniform(-2, 2, (4, 4))
        theta_t = rng.uniform(-2, 2, (4, 4))
        got_c, got_t = corrected_cnot_given(rc, rt, theta_c, theta_t)
        exp_c, _ = _functional_oracle(rc, rt, herm_expi(theta_c))
        _, exp_t = _functional_oracle(rc, rt, herm_expi(theta_t))
        assert np.abs(got_c - exp_c).max() < 1e-12
        assert np.abs(got_t - exp_t).max() < 1e-12


def test_corrected_cnot_via_provider():
    rng = np.random.default_rng(38)
    theta_c = rng.uniform(-1, 1, (4, 4))
    theta_t = rng.uniform(-1, 1, (4, 4))
    rc, rt = random_rdm(rng), random_rdm(rng)
    got = corrected_cnot(rc, rt, lambda a, b: (theta_c, theta_t))
    expected = corrected_cnot_given(rc, rt, theta_c, theta_t)
    for g, e in zip(got, expected):
        assert np.array_equal(g, e)


def test_control_diagonal_invariance_both_functionals():
    rng = np.random.default_rng(39)
    for _ in range(50):
        rc, rt = random_rdm(rng), random_rdm(rng)
        b_c, _ = bernardi_cnot(rc, rt)
        assert abs(b_c[0, 0] - rc[0, 0]) < 1e-12
        assert abs(b_c[1, 1] - rc[1, 1]) < 1e-12
        # The corrected functional moves the diagonal only through U_m; with
        # theta = 0 it inherits the invariance exactly.
        c_c, _ = corrected_cnot_given(rc, rt, np.zeros((4, 4)), np.zeros((4, 4)))
        assert abs(c_c[1, 1] - rc[1, 1]) < 1e-12


# ---------------------------------------------------------------------------
# run_qcdft


def test_run_qcdft_h_cnot():
    trace = run_qcdft(Circuit(2, (h(0), cnot(0, 1))), BERNARDI)
    assert np.abs(trace.sqps[-1] - np.array([0.5, 0.5])).max() < 1e-12


def test_run_qcdft_record_length():
    trace = run_qcdft(Circuit(3, (h(0), h(1), cnot(0, 1))))
    assert len(trace.sqps) == 4


def test_run_qcdft_rejects_global_ops():
    for op in (phase_flip_oracle([0]), diffusion()):
        with pytest.raises(UnsupportedGateError):
            run_qcdft(Circuit(2, (op,)))


def test_register_invariants_hold_over_long_random_run():
    rng = np.random.default_rng(40)
    reg = init_register(6)
    functional = constant_theta_functional(
        rng.uniform(-1, 1, (4, 4)), rng.uniform(-1, 1, (4, 4))
    )
    for i in range(10_000):
        if rng.random() < 8 / 15:
            c = int(rng.integers(6))
            t = int(rng.integers(5))
            t += t >= c
            func = functional if i % 2 else BERNARDI
            reg.rdms[c], reg.rdms[t] = func.apply(reg.rdms[c], reg.rdms[t])
        else:
            op = random_1q_ops(rng, 6, 1)[0]
            apply_1q(reg, op.qubits[0], gate_matrix(op), check=False)
    for rho in reg.rdms:
        check_rdm(rho, tol=1e-9)


def test_first_cnot_from_product_state_is_exact():
    rng = np.random.default_rng(41)
    for _ in range(200):
        ops = random_1q_ops(rng, 4, 12)
        c = int(rng.integers(4))
        t = int(rng.integers(3))
        t += t >= c
        circuit = Circuit(4, tuple(ops) + (cnot(c, t),))
        trace_e = exact.run_exact(circuit)
        trace_q = run_qcdft(circuit, BERNARDI)
        for q in range(4):
            assert fidelity(trace_e.rdms[-1, q], trace_q.rdms[-1, q]) >= 1 - 1e-10


# ---------------------------------------------------------------------------
# target SQP update law


def test_target_sqp_update_endpoints():
    assert target_sqp_update(0.0, 0.3) == 0.3
    assert target_sqp_update(1.0, 0.0) == 1.0
    assert target_sqp_update(0.3, 0.2) == pytest.approx(0.38, abs=1e-15)


def test_target_sqp_update_rejects_out_of_range():
    with pytest.raises(ValueError):
        target_sqp_update(1.2, 0.5)
    with pytest.raises(ValueError):
        target_sqp_update(0.5, -0.1)


def _diagonal_cnot_oracle(pc, pt):
    """Brute-force diagonal 4x4: tensor, conjugate by CNOT, reduce the target."""
    rho = np.kron(np.diag([1 - pc, pc]), np.diag([1 - pt, pt])).astype(complex)
    rho = CNOT_4 @ rho @ CNOT_4.conj().T
    rt = np.trace(rho.reshape(2, 2, 2, 2), axis1=0, axis2=2)
    return rt[1, 1].real


def test_target_sqp_update_matches_diagonal_oracle_and_contracts():
    grid = np.linspace(0.0, 1.0, 101)
    for pc in grid:
        for pt in grid:
            updated = target_sqp_update(pc, pt)
            assert abs(updated - _diagonal_cnot_oracle(pc, pt)) < 1e-12
            assert abs(0.5 - updated) <= abs(0.5 - pt) + 1e-15


def test_target_update_matches_bernardi_diagonal():
    rng = np.random.default_rng(42)
    for _ in range(50):
        rc, rt = random_rdm(rng), random_rdm(rng)
        _, rt2 = bernardi_cnot(rc, rt)
        expected = target_sqp_update(sqp_of(rc), sqp_of(rt))
        assert abs(sqp_of(rt2) - expected) < 1e-12


# ---------------------------------------------------------------------------
# product-state formulas


def test_product_joint_prob_uniform():
    reg = init_register(4)
    for q in range(4):
        apply_1q(reg, q, HADAMARD)
    for bits in ("0000", "1010", "1111"):
        assert abs(product_joint_prob(reg, bits) - 1 / 16) < 1e-12


def test_product_joint_prob_basis_state():
    reg = init_register(3)
    assert product_joint_prob(reg, "000") == 1.0
    assert product_joint_prob(reg, "100") == 0.0


def test_product_joint_prob_sums_to_one():
    rng = np.random.default_rng(43)
    for n in (4, 8, 10):
        reg = init_register(n)
        reg.rdms = np.array([random_rdm(rng) for _ in range(n)])
        total = sum(
            product_joint_prob(reg, format(i, f"0{n}b")) for i in range(2**n)
        )
        assert abs(total - 1.0) < 1e-9


def test_product_joint_prob_length_mismatch():
    with pytest.raises(ValueError):
        product_joint_prob(init_register(3), "01")


def test_product_expectation_all_z_on_zero():
    reg = init_register(4)
    assert product_expectation(reg, [SIGMA_Z] * 4) == pytest.approx(1.0)


def test_product_expectation_identity_factor():
    rng = np.random.default_rng(44)
    reg = init_register(3)
    reg.rdms = np.array([random_rdm(rng) for _ in range(3)])
    obs = [SIGMA_Z, I2, SIGMA_X]
    with_id = product_expectation(reg, obs)
    stripped = 1.0
    for rho, o in ((reg.rdms[0], SIGMA_Z), (reg.rdms[2], SIGMA_X)):
        stripped *= np.trace(rho @ o).real
    assert abs(with_id - stripped) < 1e-12


def test_product_expectation_rejects_non_hermitian():
    with pytest.raises(ValueError):
        product_expectation(init_register(1), [np.array([[0, 1], [0, 0]])])


def test_product_expectation_matches_exact_on_1q_circuit():
    rng = np.random.default_rng(45)
    paulis = [I2, SIGMA_X, SIGMA_Y, SIGMA_Z]
    for _ in range(10):
        circuit = Circuit(3, tuple(random_1q_ops(rng, 3, 15)))
        state = exact.final_state(circuit)
        reg = init_register(3)
        for op in circuit.ops:
            apply_1q(reg, op.qubits[0], gate_matrix(op), check=False)
        obs = [paulis[rng.integers(4)] for _ in range(3)]
        full = np.kron(np.kron(obs[2], obs[1]), obs[0])  # qubit 0 least significant
        exact_value = (state.conj() @ full @ state).real
        assert abs(product_expectation(reg, obs) - exact_value) < 1e-9
