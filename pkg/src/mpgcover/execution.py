"""Decentralized policy execution: iterative best response on the learned Q."""

from __future__ import annotations

from dataclasses import dataclass

from .env import Action, ConfigurationError, FieldOfInterest, GridDims, JointAction, JointState, step
from .game import potential
from .geometry import FovHalfAngles
from .qfunc import QBackend


@dataclass(frozen=True)
class ExecConfig:
    max_steps: int = 20
    sweep_limit: int = 10
    convergence_window: int = 3

    def __post_init__(self) -> None:
        if self.max_steps < 0:
            raise ConfigurationError(f"max_steps must be >= 0, got {self.max_steps}")
        if self.sweep_limit < 1 or self.convergence_window < 1:
            raise ConfigurationError("sweep_limit and convergence_window must be >= 1")


@dataclass
class ExecTrace:
    """States visited, the actions between them, and the potential of each state."""

    states: list[JointState]
    actions: list[JointAction]
    potentials: list[int]
    steps_to_convergence: int | None

    @property
    def converged(self) -> bool:
        return self.steps_to_convergence is not None


def best_response_action(
    backend: QBackend, state: JointState, actions: JointAction, agent: int
) -> Action:
    """Agent's best own action with everyone else's action held fixed.

    Ties break toward the lowest action index.
    """
    candidate = list(actions)
    best_action, best_value = None, -float("inf")
    for a in Action:
        candidate[agent] = a
        value = backend.q_value(state, tuple(candidate))
        if value > best_value:
            best_action, best_value = a, value
    return best_action


def best_response_sweep(
    backend: QBackend, state: JointState, init: JointAction, sweep_limit: int
) -> JointAction:
    """Round-robin best responses until a full sweep changes nothing.

    Every agent shares the same Q, so each switch is a coordinate-ascent
    move; sweep_limit caps pathological tie cycling.
    """
    current = list(init)
    for _ in range(sweep_limit):
        changed = False
        for agent in range(len(current)):
            best = best_response_action(backend, state, tuple(current), agent)
            if best != current[agent]:
                current[agent] = best
                changed = True
        if not changed:
            break
    return tuple(current)


def _detect_convergence(states: list[JointState], window: int) -> int | None:
    """First step index from which the joint state stays fixed for `window` steps."""
    for t in range(1, len(states) - window + 1):
        if all(states[t - 1 + m] == states[t - 1] for m in range(1, window + 1)):
            return t
    return None


def execute_policy(
    backend: QBackend,
    s0: JointState,
    dims: GridDims,
    foi: FieldOfInterest,
    phi: FovHalfAngles,
    cfg: ExecConfig,
) -> ExecTrace:
    """Roll the best-response policy forward from s0 and record the trace.

    Each sweep warm-starts from the previous step's joint action (first step:
    all lowest-index actions). Convergence means the joint state repeated for
    convergence_window consecutive steps; the reported step is the first of
    that stable window.
    """
    states = [s0]
    actions: list[JointAction] = []
    potentials = [potential(s0, foi, phi)]
    state = s0
    joint: JointAction = tuple(Action(0) for _ in s0)
    for _ in range(cfg.max_steps):
        joint = best_response_sweep(backend, state, joint, cfg.sweep_limit)
        state = step(state, joint, dims)
        states.append(state)
        actions.append(joint)
        potentials.append(potential(state, foi, phi))
    return ExecTrace(
        states=states,
        actions=actions,
        potentials=potentials,
        steps_to_convergence=_detect_convergence(states, cfg.convergence_window),
    )
