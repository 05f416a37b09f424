"""Symmetry-respecting HVA-VQE for the Lipkin and Agassi nuclear models."""

__version__ = "0.1.0"

from .paulis import PauliString, PauliSum, pauli_multiply, pauli_sum_apply  # noqa: E402
from .fermions import FermionOpSum, ModeIndex, jordan_wigner  # noqa: E402
from .models import (  # noqa: E402
    AgassiParams,
    LipkinParams,
    ModelDecomposition,
    build_agassi,
    build_agassi_operators,
    build_lipkin,
    commutes_with_number,
)
from .engine import (  # noqa: E402
    ConvergenceError,
    SpectrumBounds,
    apply_exp,
    expectation,
    extremal_eigs,
    particle_number,
)
from .ansatz import (  # noqa: E402
    AnsatzProgram,
    build_agassi_ansatz,
    build_lipkin_ansatz,
    run_ansatz,
    warm_start_extend,
)
from .vqe import (  # noqa: E402
    AdamState,
    CostContext,
    TrainTrace,
    adam_step,
    cost,
    gradient,
    normalized_cost,
    train,
)
from .experiments import (  # noqa: E402
    ModelConfig,
    RunRecord,
    VarianceScanConfig,
    fit_scaling,
    training_ensemble,
    variance_scan,
    warm_start_sweep,
)
