#!/usr/bin/env python3
"""Train a small corrected-CNOT functional and watch the loss move.

Uses a reduced configuration so it finishes in about a minute.  Training
starts from a randomly initialized correction unitary, which is worse than
applying no correction at all, and descends toward the plain functional's
level; closing the remaining gap takes the full configuration (`qcdft
train`, about six minutes), and even there the held-out margin is thin.
"""

import numpy as np

from qcdft import network

config = network.TrainConfig(
    n_samples=60,
    epochs=150,
    learning_rate=1e-4,
    seed=0,
    layer_widths=(6, 64, 64, 16),
)
result = network.train(config)

held_out = network.generate_dataset(100, seed=123)
baseline = network.evaluate_rms1f(None, None, held_out)

print("epoch   rms1f     mean fidelity")
for epoch in range(0, config.epochs, 15):
    print(f"{epoch:5d}   {result.history[epoch]:.5f}   {result.mean_fidelity[epoch]:.5f}")
print(f"{config.epochs - 1:5d}   {result.history[-1]:.5f}   {result.mean_fidelity[-1]:.5f}")

trained = network.evaluate_rms1f(result.model_c, result.model_t, held_out)
print(f"\nheld-out RMS1F: plain functional {baseline:.5f}, this run {trained:.5f}")

# the trained pair plugs straight into the engine
functional = network.model_theta_functional(result.model_c, result.model_t)
rc = np.array([[0.7, 0.2 + 0.1j], [0.2 - 0.1j, 0.3]])
rt = np.eye(2, dtype=complex) / 2
theta_c, _ = functional.theta_provider(rc, rt)
print("\npredicted control-branch theta for one input pair:")
print(np.round(theta_c, 3))
