"""Classical circuit simulation through single-qubit reduced density matrices.

The package pairs an exact statevector oracle with an approximate simulator
that evolves one 2x2 density matrix per qubit, using a neural-network
corrected CNOT functional, and applies the resulting single-qubit
probabilities (SQPs) to Grover search and Shor period finding.
"""

__version__ = "0.1.0"

from .circuits import Circuit, GateOp, cnot, h, parse_circuit, rx, ry, rz, x, y, z
from .engine import (
    BERNARDI,
    CnotFunctional,
    RdmRegister,
    bernardi_cnot,
    corrected_cnot,
    init_register,
    run_qcdft,
    sqp_of,
    target_sqp_update,
)
from .exact import SimTrace, reduced_density, run_exact, sqp, zero_state
from .linalg import fidelity, herm_expi, sqrtm_psd
from .network import (
    MlpModel,
    TrainConfig,
    TrainingSample,
    encode_inputs,
    forward,
    generate_dataset,
    load_model,
    model_theta_functional,
    rms1f,
    save_model,
    train,
)

__all__ = [
    "__version__",
    "Circuit", "GateOp", "h", "x", "y", "z", "rx", "ry", "rz", "cnot", "parse_circuit",
    "BERNARDI", "CnotFunctional", "RdmRegister", "bernardi_cnot", "corrected_cnot",
    "init_register", "run_qcdft", "sqp_of", "target_sqp_update",
    "SimTrace", "reduced_density", "run_exact", "sqp", "zero_state",
    "fidelity", "herm_expi", "sqrtm_psd",
    "MlpModel", "TrainConfig", "TrainingSample", "encode_inputs", "forward",
    "generate_dataset", "load_model", "model_theta_functional", "rms1f",
    "save_model", "train",
]
