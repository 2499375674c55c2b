"""Random-circuit benchmarks: exact vs plain vs corrected CNOT functional.

Produces the per-step SQP-error and mean-fidelity curves plus a wall-clock
timing comparison.  Circuits are seeded and independent, so runs are
reproducible and parallelizable across circuits; the timing benchmark
evolves its circuits in lockstep so the corrected functional's network
inference can be batched across circuits.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from . import exact
from .circuits import Circuit, GateOp, cnot
from .engine import (
    BERNARDI,
    CnotFunctional,
    apply_op,
    corrected_cnot_batch,
    init_register,
    run_qcdft,
)
from .linalg import fidelity
from .network import encode_inputs

GATE_SET = ("H", "X", "Y", "Z", "RX", "RY", "RZ", "CNOT")


@dataclass(frozen=True)
class RandomCircuitConfig:
    n_qubits: int = 10
    n_steps: int = 150
    cnot_weight: float = 8.0
    rotation_range: tuple[float, float] = (0.0, 2.0 * np.pi)
    seed: int = 0

    def __post_init__(self):
        if self.n_qubits < 2:
            raise ValueError("random circuits need at least 2 qubits")
        if self.n_steps < 1:
            raise ValueError("n_steps must be positive")
        if not self.cnot_weight > 0:
            raise ValueError("cnot_weight must be positive")
        if not self.rotation_range[0] < self.rotation_range[1]:
            raise ValueError("rotation_range must be a non-empty interval")


def sample_gate(rng: np.random.Generator, config: RandomCircuitConfig) -> GateOp:
    """One random gate; CNOT carries cnot_weight, every other kind weight 1.

    Rotation angles are uniform in [0, 2pi); CNOT picks a uniform ordered
    pair of distinct qubits.
    """
    w = config.cnot_weight
    p_cnot = w / (w + len(GATE_SET) - 1)
    if rng.random() < p_cnot:
        c = int(rng.integers(config.n_qubits))
        t = int(rng.integers(config.n_qubits - 1))
        if t >= c:
            t += 1
        return cnot(c, t)
    kind = GATE_SET[rng.integers(len(GATE_SET) - 1)]
    q = int(rng.integers(config.n_qubits))
    if kind in ("RX", "RY", "RZ"):
        return GateOp(kind, (q,), angle=float(rng.uniform(*config.rotation_range)))
    return GateOp(kind, (q,))


def random_circuit(config: RandomCircuitConfig) -> Circuit:
    rng = np.random.default_rng(config.seed)
    return Circuit(config.n_qubits, tuple(sample_gate(rng, config) for _ in range(config.n_steps)))


@dataclass
class CircuitComparison:
    """Raw per-qubit data for one circuit: exact vs both functionals, per step."""

    config: RandomCircuitConfig
    sqps_exact: np.ndarray  # (steps + 1, n_qubits)
    sqps_bernardi: np.ndarray
    sqps_corrected: np.ndarray
    fid_bernardi: np.ndarray  # per-qubit fidelity against exact, same shape
    fid_corrected: np.ndarray

    def sqp_error(self, which: str) -> np.ndarray:
        pred = self.sqps_bernardi if which == "bernardi" else self.sqps_corrected
        return np.sqrt(np.mean((self.sqps_exact - pred) ** 2, axis=1))

    def mean_fidelity(self, which: str) -> np.ndarray:
        fid = self.fid_bernardi if which == "bernardi" else self.fid_corrected
        return fid.mean(axis=1)

    def mean_sqp_corrected(self) -> np.ndarray:
        return self.sqps_corrected.mean(axis=1)


def run_comparison(config: RandomCircuitConfig, functional: CnotFunctional) -> CircuitComparison:
    """Run exact, plain and corrected simulations of the same random circuit."""
    circuit = random_circuit(config)
    ref = circuit.sequence_hash()
    traces = [
        exact.run_exact(circuit),
        run_qcdft(circuit, BERNARDI),
        run_qcdft(circuit, functional),
    ]
    # All three runs must have consumed the identical gate sequence.
    assert circuit.sequence_hash() == ref
    tr_exact, tr_b, tr_c = traces
    steps1, nq = tr_exact.sqps.shape
    fid_b = np.empty((steps1, nq))
    fid_c = np.empty((steps1, nq))
    for s in range(steps1):
        for q in range(nq):
            fid_b[s, q] = fidelity(tr_exact.rdms[s, q], tr_b.rdms[s, q])
            fid_c[s, q] = fidelity(tr_exact.rdms[s, q], tr_c.rdms[s, q])
    return CircuitComparison(
        config=config,
        sqps_exact=tr_exact.sqps,
        sqps_bernardi=tr_b.sqps,
        sqps_corrected=tr_c.sqps,
        fid_bernardi=fid_b,
        fid_corrected=fid_c,
    )


@dataclass
class StepMetricsTable:
    """Circuit-averaged per-step metrics, one row per step (step 0 included)."""

    step: np.ndarray
    sqp_err_bernardi: np.ndarray
    sqp_err_corrected: np.ndarray
    mean_fid_bernardi: np.ndarray
    mean_fid_corrected: np.ndarray
    mean_sqp_corrected: np.ndarray

    @property
    def sqp_err_diff(self) -> np.ndarray:
        """Plain minus corrected; above zero means the corrected run is better."""
        return self.sqp_err_bernardi - self.sqp_err_corrected

    @property
    def mean_fid_diff(self) -> np.ndarray:
        """Corrected minus plain; above zero means the corrected run is better."""
        return self.mean_fid_corrected - self.mean_fid_bernardi


def aggregate(
    configs: list[RandomCircuitConfig], functional: CnotFunctional
) -> tuple[StepMetricsTable, list[CircuitComparison]]:
    """Average the per-step metrics over many circuits (all with equal n_steps)."""
    if not configs:
        raise ValueError("need at least one circuit config")
    if len({c.n_steps for c in configs}) != 1:
        raise ValueError("all circuits must share n_steps")
    records = [run_comparison(c, functional) for c in configs]
    table = StepMetricsTable(
        step=np.arange(configs[0].n_steps + 1),
        sqp_err_bernardi=np.mean([r.sqp_error("bernardi") for r in records], axis=0),
        sqp_err_corrected=np.mean([r.sqp_error("corrected") for r in records], axis=0),
        mean_fid_bernardi=np.mean([r.mean_fidelity("bernardi") for r in records], axis=0),
        mean_fid_corrected=np.mean([r.mean_fidelity("corrected") for r in records], axis=0),
        mean_sqp_corrected=np.mean([r.mean_sqp_corrected() for r in records], axis=0),
    )
    return table, records


# ---------------------------------------------------------------------------
# Timing


@dataclass
class TimingRecord:
    method: str  # exact | bernardi | corrected
    n_qubits: int
    seconds_per_gate: float


def _evolve_lockstep(circuits: list[Circuit], functional: CnotFunctional) -> list:
    """Advance independent RDM registers step by step, batching CNOT inference.

    All circuits must have the same number of ops.  When the functional has a
    batched theta hook, the networks run once per step on the stacked
    features of every circuit currently at a CNOT.  Returns the final
    registers, identical to running each circuit on its own.
    """
    regs = [init_register(c.n_qubits) for c in circuits]
    n_steps = len(circuits[0].ops)
    batched = functional.theta_batch is not None
    for step in range(n_steps):
        cnot_items = []
        for reg, circuit in zip(regs, circuits):
            op = circuit.ops[step]
            if op.kind == "CNOT":
                cnot_items.append((reg, op.qubits[0], op.qubits[1]))
            else:
                apply_op(reg, op, functional)
        if not cnot_items:
            continue
        if batched:
            feats = np.stack(
                [encode_inputs(reg.rdms[c], reg.rdms[t]) for reg, c, t in cnot_items]
            )
            thetas_c, thetas_t = functional.theta_batch(feats)
            pairs = np.stack(
                [(reg.rdms[c], reg.rdms[t]) for reg, c, t in cnot_items]
            )
            out_c, out_t = corrected_cnot_batch(pairs, thetas_c, thetas_t)
            for i, (reg, c, t) in enumerate(cnot_items):
                reg.rdms[c], reg.rdms[t] = out_c[i], out_t[i]
                reg.step += 1
        else:
            for reg, c, t in cnot_items:
                reg.rdms[c], reg.rdms[t] = functional.apply(reg.rdms[c], reg.rdms[t])
                reg.step += 1
    return regs


def _time_once(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def timing_bench(
    qubit_counts: list[int],
    gates_per_point: int = 10,
    circuits_per_point: int = 40,
    repeats: int = 3,
    functional: CnotFunctional | None = None,
    seed: int = 0,
    cnot_weight: float = 8.0,
    exact_max_qubits: int = exact.MAX_QUBITS,
) -> list[TimingRecord]:
    """Median wall time per gate for each method and register size.

    Per point, ``circuits_per_point`` independent random circuits of
    ``gates_per_point`` gates are evolved (in lockstep for the RDM methods,
    so corrected-functional inference runs as one batched network pass per
    step); each measurement repeats ``repeats`` times after one discarded
    warm-up and the median is kept.  The exact method is skipped above its
    capacity.  The default of 40 concurrent circuits gives the batched
    inference a realistic amortization level on a single core.
    """
    functional = functional if functional is not None else BERNARDI
    records = []
    for i, nq in enumerate(qubit_counts):
        circuits = [
            random_circuit(
                RandomCircuitConfig(
                    n_qubits=nq, n_steps=gates_per_point, cnot_weight=cnot_weight,
                    seed=seed + 1000 * i + j,
                )
            )
            for j in range(circuits_per_point)
        ]
        n_gates = gates_per_point * circuits_per_point

        def run_exact_all():
            for c in circuits:
                exact.final_state(c)

        methods = [
            ("bernardi", lambda: _evolve_lockstep(circuits, BERNARDI)),
            ("corrected", lambda: _evolve_lockstep(circuits, functional)),
        ]
        if nq <= exact_max_qubits:
            methods.insert(0, ("exact", run_exact_all))
        for name, fn in methods:
            fn()  # warm-up, discarded
            times = [_time_once(fn) for _ in range(repeats)]
            records.append(TimingRecord(name, nq, float(np.median(times)) / n_gates))
    return records


# ---------------------------------------------------------------------------
# CSV output


def write_metrics_csv(path, table: StepMetricsTable) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["step", "sqp_err_bernardi", "sqp_err_corrected", "sqp_err_diff",
             "mean_fid_bernardi", "mean_fid_corrected", "mean_fid_diff",
             "mean_sqp_corrected"]
        )
        for i in range(len(table.step)):
            writer.writerow(
                [int(table.step[i])]
                + [repr(float(v[i])) for v in (
                    table.sqp_err_bernardi, table.sqp_err_corrected, table.sqp_err_diff,
                    table.mean_fid_bernardi, table.mean_fid_corrected, table.mean_fid_diff,
                    table.mean_sqp_corrected,
                )]
            )


def write_metrics_raw_csv(path, records: list[CircuitComparison]) -> None:
    """Per-circuit metric curves (not per-qubit raw data), for auditing."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["circuit", "step", "sqp_err_bernardi", "sqp_err_corrected",
             "mean_fid_bernardi", "mean_fid_corrected", "mean_sqp_corrected"]
        )
        for idx, rec in enumerate(records):
            eb, ec = rec.sqp_error("bernardi"), rec.sqp_error("corrected")
            fb, fc = rec.mean_fidelity("bernardi"), rec.mean_fidelity("corrected")
            ms = rec.mean_sqp_corrected()
            for s in range(len(eb)):
                writer.writerow(
                    [idx, s] + [repr(float(v)) for v in (eb[s], ec[s], fb[s], fc[s], ms[s])]
                )


def write_timing_csv(path, records: list[TimingRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "n_qubits", "seconds_per_gate"])
        for rec in records:
            writer.writerow([rec.method, rec.n_qubits, repr(rec.seconds_per_gate)])
