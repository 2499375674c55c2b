#!/usr/bin/env python3
"""Reproduce the Grover SQP tables and decode solutions by rounding.

With one marked state, each qubit's marginal drifts toward its solution
bit, so a single oracle + diffusion application already decodes the answer.
With two solutions differing in one bit, that bit stays pinned at 0.5.
"""

from qcdft.grover import (
    GroverSpec,
    decode_single_solution,
    decode_two_solutions,
    grover_sqp_table,
)


def show(spec):
    table = grover_sqp_table(spec)
    print(f"solutions {spec.solutions}, qubit 4 is the most significant bit")
    header = "  ".join(f"it {i}" for i in range(spec.iterations + 1))
    print(f"qubit   {header}")
    for q in reversed(range(spec.n_qubits)):
        cells = "  ".join(f"{table[it, q]:.7f}"[:9] for it in range(spec.iterations + 1))
        print(f"  {q}   {cells}")
    return table


single = show(GroverSpec(5, ("10110",), 4))
print("decoded after 1 iteration:", decode_single_solution(single[1]))
print("decoded after 4 iterations:", decode_single_solution(single[4]))

print()
double = show(GroverSpec(5, ("10110", "10111"), 4))
pair = decode_two_solutions(double[3])
print("decoded pair after 3 iterations:", pair[0], pair[1])
print("(iteration 4 over-rotates: the SQPs retreat from their bits)")
