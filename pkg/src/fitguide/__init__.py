"""fitguide: fixed-impact-time optimal interception guidance toolkit.

Capabilities: costate-parameterized extremal propagation, optimal-command
dataset generation, a from-scratch feedforward command network, an
independent boundary-value oracle, a proportional-navigation baseline,
and closed-loop engagement simulation (single and salvo).
"""

from .kinematics import (
    CartesianState,
    PolarState,
    cartesian_to_polar,
    step_cartesian,
    step_polar,
    wrap_angle,
)
from .extremals import (
    AdjointParams,
    ParamState,
    ParamTrajectory,
    hamiltonian,
    propagate_param,
    terminal_time,
)
from .datagen import (
    DatagenConfig,
    REDUCED_CONFIG,
    Sample,
    generate_dataset,
    iter_samples,
    read_dataset,
    write_dataset,
)
from .mlp import (
    CommandModel,
    TrainConfig,
    TrainReport,
    TrainingDivergedError,
    forward,
    forward_batch,
    load_model,
    save_model,
    train,
)
from .guidance import (
    GuidanceError,
    GuidanceQuery,
    OpenLoopSolution,
    OracleSolution,
    command_nn,
    command_oracle,
    pn_command,
    solve_ocp,
)
from .sim import (
    Scenario,
    SimResult,
    control_effort,
    export_trajectory,
    salvo,
    salvo_summary,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "CartesianState",
    "PolarState",
    "cartesian_to_polar",
    "step_cartesian",
    "step_polar",
    "wrap_angle",
    "AdjointParams",
    "ParamState",
    "ParamTrajectory",
    "hamiltonian",
    "propagate_param",
    "terminal_time",
    "DatagenConfig",
    "REDUCED_CONFIG",
    "Sample",
    "generate_dataset",
    "iter_samples",
    "read_dataset",
    "write_dataset",
    "CommandModel",
    "TrainConfig",
    "TrainReport",
    "TrainingDivergedError",
    "forward",
    "forward_batch",
    "load_model",
    "save_model",
    "train",
    "GuidanceError",
    "GuidanceQuery",
    "OpenLoopSolution",
    "OracleSolution",
    "command_nn",
    "command_oracle",
    "pn_command",
    "solve_ocp",
    "Scenario",
    "SimResult",
    "control_effort",
    "export_trajectory",
    "salvo",
    "salvo_summary",
    "simulate",
    "__version__",
]
