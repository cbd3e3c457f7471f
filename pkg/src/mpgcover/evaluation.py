"""Monte Carlo convergence statistics and the exact small-problem oracle."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .env import (
    AgentState,
    ConfigurationError,
    FieldOfInterest,
    GridDims,
    JointState,
    reset,
    step,
)
from .execution import ExecConfig, execute_policy
from .game import potential
from .geometry import FovHalfAngles
from .qfunc import QBackend, joint_action_from_index, n_joint_actions

# Enumeration guard: explicit tables only for genuinely tiny problems.
_MAX_PAIRS = 100_000


@dataclass(frozen=True)
class McSummary:
    """Steps-to-convergence statistics over converged trials only."""

    trials: int
    converged_count: int
    mean_steps: float
    std_steps: float
    histogram: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "converged_count": self.converged_count,
            "mean_steps": self.mean_steps,
            "std_steps": self.std_steps,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


@dataclass
class TinyMdp:
    """Explicit deterministic MDP tables for an enumerable scenario."""

    states: list[JointState]
    n_agents: int
    next_index: np.ndarray  # (S, A) state index after each joint action
    rewards: np.ndarray  # (S, A) potential of the successor state

    @property
    def n_actions(self) -> int:
        return self.next_index.shape[1]

    def state_index(self, state: JointState) -> int:
        return self._index[state]

    def __post_init__(self) -> None:
        self._index = {s: i for i, s in enumerate(self.states)}

    @classmethod
    def from_scenario(
        cls,
        dims: GridDims,
        n_agents: int,
        foi: FieldOfInterest,
        phi: FovHalfAngles,
    ) -> "TinyMdp":
        cells = [
            AgentState(x, y, z)
            for x in range(dims.nx)
            for y in range(dims.ny)
            for z in range(1, dims.nz + 1)
        ]
        n_states = len(cells) ** n_agents
        n_acts = n_joint_actions(n_agents)
        if n_states * n_acts > _MAX_PAIRS:
            raise ConfigurationError(
                f"scenario has {n_states * n_acts} state-action pairs; too large to enumerate"
            )
        states = [tuple(c) for c in itertools.product(cells, repeat=n_agents)]
        index = {s: i for i, s in enumerate(states)}
        actions = [joint_action_from_index(i, n_agents) for i in range(n_acts)]
        next_index = np.empty((n_states, n_acts), dtype=np.int64)
        rewards = np.empty((n_states, n_acts))
        for si, s in enumerate(states):
            for ai, a in enumerate(actions):
                nxt = step(s, a, dims)
                next_index[si, ai] = index[nxt]
                rewards[si, ai] = potential(nxt, foi, phi)
        return cls(states=states, n_agents=n_agents, next_index=next_index, rewards=rewards)


def value_iteration(mdp: TinyMdp, gamma: float, tol: float = 1e-9) -> np.ndarray:
    """Optimal Q table of the deterministic MDP, to within tol in sup norm."""
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    q = np.zeros_like(mdp.rewards)
    while True:
        best = q.max(axis=1)
        q_new = mdp.rewards + gamma * best[mdp.next_index]
        change = float(np.abs(q_new - q).max())
        q = q_new
        if change < tol:
            return q


def monte_carlo(
    backend: QBackend,
    dims: GridDims,
    n_agents: int,
    foi: FieldOfInterest,
    phi: FovHalfAngles,
    exec_cfg: ExecConfig,
    trials: int,
    seed: int,
) -> McSummary:
    """Execute the policy from `trials` seeded random starts and aggregate.

    Mean and standard deviation cover converged trials only; the converged
    count is reported alongside so censored trials stay visible.
    """
    if trials < 1:
        raise ConfigurationError(f"trials must be >= 1, got {trials}")
    steps: list[int] = []
    for trial in range(trials):
        s0 = reset(dims, n_agents, seed + trial)
        trace = execute_policy(backend, s0, dims, foi, phi, exec_cfg)
        if trace.steps_to_convergence is not None:
            steps.append(trace.steps_to_convergence)
    if steps:
        mean = float(np.mean(steps))
        std = float(np.std(steps))
    else:
        mean = std = float("nan")
    return McSummary(
        trials=trials,
        converged_count=len(steps),
        mean_steps=mean,
        std_steps=std,
        histogram=dict(Counter(steps)),
    )
