"""Multi-agent field-coverage simulator and Markov potential game solver."""

from .env import (
    Action,
    AgentState,
    ConfigurationError,
    FieldOfInterest,
    GridDims,
    JointAction,
    JointState,
    generate_foi,
    reset,
    step,
)
from .evaluation import McSummary, TinyMdp, monte_carlo, value_iteration
from .execution import ExecConfig, ExecTrace, best_response_action, best_response_sweep, execute_policy
from .game import CoverageReport, balance_term, coverage_report, potential
from .geometry import FovHalfAngles, coverage_count, fov_cells, overlap_count
from .nn import Mlp, SgdConfig
from .qfunc import (
    CheckpointError,
    Encoding,
    FsrQ,
    MlpQ,
    greedy_joint_action,
    joint_action_from_index,
    joint_action_index,
    load_backend,
    save_backend,
)
from .replay import ReplayBuffer, Transition, WarmupError
from .trainer import (
    EpisodeRecord,
    Scenario,
    TrainConfig,
    TrainResult,
    build_foi,
    decayed_epsilon,
    select_action,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "AgentState",
    "CheckpointError",
    "ConfigurationError",
    "CoverageReport",
    "Encoding",
    "EpisodeRecord",
    "ExecConfig",
    "ExecTrace",
    "FieldOfInterest",
    "FovHalfAngles",
    "FsrQ",
    "GridDims",
    "JointAction",
    "JointState",
    "McSummary",
    "Mlp",
    "MlpQ",
    "ReplayBuffer",
    "Scenario",
    "SgdConfig",
    "TinyMdp",
    "TrainConfig",
    "TrainResult",
    "Transition",
    "WarmupError",
    "balance_term",
    "best_response_action",
    "best_response_sweep",
    "build_foi",
    "coverage_count",
    "coverage_report",
    "decayed_epsilon",
    "execute_policy",
    "fov_cells",
    "generate_foi",
    "greedy_joint_action",
    "joint_action_from_index",
    "joint_action_index",
    "load_backend",
    "monte_carlo",
    "overlap_count",
    "potential",
    "reset",
    "save_backend",
    "select_action",
    "step",
    "train",
    "value_iteration",
]
