"""Truncated-Fock-space simulation of dissipative cat-state generation.

Two routes to the same target state are implemented side by side: a
discrete synchronous-pump cycle map (pump mode re-prepared each cycle,
coupled, then discarded) and the continuous adiabatic two-photon model it
reduces to. Single-photon loss, mean-field amplitude dynamics, Wigner
functions, and a switchable-loss pump-reset protocol round out the toolbox.
"""

from .errors import (
    CatpumpError,
    ConfigError,
    IncompleteResetError,
    IntegratorError,
    InvalidDimensionError,
    InvalidParameterError,
    ShapeMismatchError,
    TruncationError,
)
from .fock import (
    CatParams,
    DensityMatrix,
    Operator,
    StateVector,
    annihilation,
    cat_state,
    coherent_state,
    creation,
    number,
    parity,
    partial_trace,
    tensor,
)
from .dynamics import (
    AdiabaticParams,
    CycleConfig,
    LindbladChannel,
    adiabatic_params_from_pump,
    cycle_kraus,
    cycle_propagator,
    default_pump_dim,
    evolve_adiabatic,
    evolve_joint_lossy,
    lindblad_rhs,
    lossy_cycle,
    pair_exchange_hamiltonian,
    run_synchronous,
    second_order_correction_channel,
    second_order_params,
    synchronous_states,
    unitary_cycle,
)
from .analysis import (
    FidelityResult,
    TrajectoryRecord,
    WignerGrid,
    fidelity,
    mean_photons,
    optimal_cat,
    parity_expectation,
    purity,
    trajectory_record,
    wigner,
)
from .meanfield import (
    MeanFieldParams,
    amplitude_rhs,
    fixed_points,
    relaxation_rate,
    simulate_amplitude,
)
from .tunable_loss import (
    LossChannelParams,
    SwitchedCycleConfig,
    effective_loss_shift,
    run_switched_cycle,
)

__version__ = "0.1.0"

__all__ = [
    "CatpumpError",
    "ConfigError",
    "IncompleteResetError",
    "IntegratorError",
    "InvalidDimensionError",
    "InvalidParameterError",
    "ShapeMismatchError",
    "TruncationError",
    "CatParams",
    "DensityMatrix",
    "Operator",
    "StateVector",
    "annihilation",
    "cat_state",
    "coherent_state",
    "creation",
    "number",
    "parity",
    "partial_trace",
    "tensor",
    "AdiabaticParams",
    "CycleConfig",
    "LindbladChannel",
    "adiabatic_params_from_pump",
    "cycle_kraus",
    "cycle_propagator",
    "default_pump_dim",
    "evolve_adiabatic",
    "evolve_joint_lossy",
    "lindblad_rhs",
    "lossy_cycle",
    "pair_exchange_hamiltonian",
    "run_synchronous",
    "second_order_correction_channel",
    "second_order_params",
    "synchronous_states",
    "unitary_cycle",
    "FidelityResult",
    "TrajectoryRecord",
    "WignerGrid",
    "fidelity",
    "mean_photons",
    "optimal_cat",
    "parity_expectation",
    "purity",
    "trajectory_record",
    "wigner",
    "MeanFieldParams",
    "amplitude_rhs",
    "fixed_points",
    "relaxation_rate",
    "simulate_amplitude",
    "LossChannelParams",
    "SwitchedCycleConfig",
    "effective_loss_shift",
    "run_switched_cycle",
    "__version__",
]
