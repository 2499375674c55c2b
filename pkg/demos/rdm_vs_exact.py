#!/usr/bin/env python3
"""Walk through the core idea: evolve one 2x2 density matrix per qubit.

Single-qubit gates are exact in this picture; CNOTs are approximated by a
functional on the (control, target) pair, which is where the error comes
from.  This script shows both regimes side by side.
"""

import numpy as np

from qcdft import exact
from qcdft.circuits import Circuit, cnot, h, rx
from qcdft.engine import BERNARDI, run_qcdft
from qcdft.linalg import fidelity

np.set_printoptions(precision=4, suppress=True)

# a circuit with no CNOTs: the RDM picture is exact
free = Circuit(3, (h(0), rx(1, 0.8), rx(2, 2.1), h(2)))
trace_exact = exact.run_exact(free)
trace_rdm = run_qcdft(free, BERNARDI)
print("1q-only circuit, final SQPs")
print("  exact:", trace_exact.sqps[-1])
print("  rdm:  ", trace_rdm.sqps[-1])

# entangle two qubits: the marginals after the first CNOT are still exact,
# but a second CNOT consuming those marginals no longer sees the
# correlations, and the outputs start to drift.
bell_plus = Circuit(2, (h(0), cnot(0, 1), rx(0, 1.2), cnot(0, 1)))
trace_exact = exact.run_exact(bell_plus)
trace_rdm = run_qcdft(bell_plus, BERNARDI)
print("\nentangling circuit, per-step mean fidelity of the 1-RDMs")
for step in range(len(trace_exact.sqps)):
    fids = [
        fidelity(trace_exact.rdms[step, q], trace_rdm.rdms[step, q]) for q in range(2)
    ]
    marker = "  <- first CNOT exact" if step == 2 else ""
    print(f"  step {step}: {np.mean(fids):.6f}{marker}")
