"""Centralized Q-learning on the team potential: episode loop, epsilon decay, TD updates."""

from __future__ import annotations

import logging
import math
import random
import time
from dataclasses import dataclass, field

import numpy as np

from .env import ConfigurationError, FieldOfInterest, GridDims, JointState, generate_foi, reset, step
from .game import potential
from .geometry import FovHalfAngles
from .qfunc import FsrQ, MlpQ, QBackend, greedy_joint_action, uniform_joint_action
from .replay import ReplayBuffer, Transition

logger = logging.getLogger(__name__)

# Fixed offsets from the run seed, one per independent random stream.
_SEED_NET = 1
_SEED_ACTIONS = 2
_SEED_SAMPLES = 3
_SEED_RESET_BASE = 10_000


@dataclass(frozen=True)
class Scenario:
    """World description shared by training, execution, and evaluation."""

    dims: GridDims
    n_agents: int
    target_count: int
    phi: FovHalfAngles

    def __post_init__(self) -> None:
        if self.n_agents < 1:
            raise ConfigurationError(f"n_agents must be >= 1, got {self.n_agents}")
        if not 1 <= self.target_count <= self.dims.nx * self.dims.ny:
            raise ConfigurationError(
                f"target_count must be in [1, {self.dims.nx * self.dims.ny}],"
                f" got {self.target_count}"
            )


@dataclass(frozen=True)
class TrainConfig:
    scenario: Scenario
    episodes: int = 400
    max_steps: int = 200
    gamma: float = 0.9
    alpha: float = 1e-3
    batch_size: int = 64
    eps_max: float = 1.0
    eps_min: float = 0.05
    eps_decay_steps: float = 10_000.0
    buffer_capacity: int = 100_000
    backend: str = "mlp"
    hidden: tuple[int, ...] = (64, 64)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.episodes < 1 or self.max_steps < 1:
            raise ConfigurationError("episodes and max_steps must be >= 1")
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigurationError(f"gamma must lie in [0, 1), got {self.gamma}")
        if self.alpha <= 0.0:
            raise ConfigurationError(f"alpha must be > 0, got {self.alpha}")
        if self.batch_size < 1 or self.buffer_capacity < self.batch_size:
            raise ConfigurationError("need buffer_capacity >= batch_size >= 1")
        if not 0.0 <= self.eps_min <= self.eps_max <= 1.0:
            raise ConfigurationError("need 0 <= eps_min <= eps_max <= 1")
        if self.eps_decay_steps <= 0.0:
            raise ConfigurationError("eps_decay_steps must be > 0")
        if self.backend not in ("mlp", "fsr"):
            raise ConfigurationError(f"backend must be 'mlp' or 'fsr', got {self.backend!r}")


@dataclass(frozen=True)
class EpisodeRecord:
    episode: int
    cumulative_return: int
    duration_ms: float
    epsilon: float
    mean_loss: float


@dataclass
class TrainResult:
    backend: QBackend
    records: list[EpisodeRecord]
    buffer: ReplayBuffer = field(repr=False)
    foi: FieldOfInterest = field(repr=False)


def decayed_epsilon(step_count: int, cfg: TrainConfig) -> float:
    """Exploration rate after step_count global environment steps."""
    if step_count < 0:
        raise ValueError(f"step_count must be >= 0, got {step_count}")
    return max(cfg.eps_min, cfg.eps_max * math.exp(-step_count / cfg.eps_decay_steps))


def select_action(backend: QBackend, state: JointState, eps: float, rng: random.Random):
    """Uniform random joint action with probability eps, otherwise greedy.

    Always consumes exactly one uniform draw, so traces with different eps
    values stay seed-comparable.
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    if rng.random() < eps:
        return uniform_joint_action(backend.n_agents, rng)
    return greedy_joint_action(backend, state)[0]


def make_backend(cfg: TrainConfig) -> QBackend:
    scenario = cfg.scenario
    if cfg.backend == "mlp":
        return MlpQ(scenario.dims, scenario.n_agents, hidden=cfg.hidden, seed=cfg.seed + _SEED_NET)
    return FsrQ(scenario.dims, scenario.n_agents)


def build_foi(cfg: TrainConfig) -> FieldOfInterest:
    """The (seed-determined) target set every stage of a run shares."""
    return generate_foi(cfg.scenario.dims, cfg.scenario.target_count, cfg.seed)


def train(cfg: TrainConfig) -> TrainResult:
    """Run the full training loop and return the fitted backend plus metrics.

    Each environment step: decay epsilon from the global step counter,
    pick an epsilon-greedy joint action, advance the world, take the team
    potential of the new state as the shared reward, store the transition,
    and (once the buffer can fill a batch) do one TD update.
    """
    scenario = cfg.scenario
    dims, n = scenario.dims, scenario.n_agents
    foi = build_foi(cfg)
    backend = make_backend(cfg)
    buffer = ReplayBuffer(cfg.buffer_capacity)
    action_rng = random.Random(cfg.seed + _SEED_ACTIONS)
    sample_rng = random.Random(cfg.seed + _SEED_SAMPLES)

    records: list[EpisodeRecord] = []
    step_count = 0
    for episode in range(cfg.episodes):
        t_start = time.perf_counter()
        state = reset(dims, n, cfg.seed + _SEED_RESET_BASE + episode)
        cumulative = 0
        eps = decayed_epsilon(step_count, cfg)
        losses: list[float] = []
        for _ in range(cfg.max_steps):
            eps = decayed_epsilon(step_count, cfg)
            action = select_action(backend, state, eps, action_rng)
            nxt = step(state, action, dims)
            reward = potential(nxt, foi, cfg.scenario.phi)
            cumulative += reward
            buffer.push(Transition(state, action, reward, nxt))
            step_count += 1
            if len(buffer) >= cfg.batch_size:
                batch = buffer.sample(cfg.batch_size, sample_rng)
                losses.append(backend.td_update(batch, cfg.gamma, cfg.alpha))
            state = nxt
        records.append(
            EpisodeRecord(
                episode=episode,
                cumulative_return=cumulative,
                duration_ms=(time.perf_counter() - t_start) * 1000.0,
                epsilon=eps,
                mean_loss=float(np.mean(losses)) if losses else float("nan"),
            )
        )
        if (episode + 1) % 25 == 0 or episode == cfg.episodes - 1:
            logger.info(
                "episode %d/%d return=%d eps=%.3f loss=%.3f",
                episode + 1,
                cfg.episodes,
                cumulative,
                eps,
                records[-1].mean_loss,
            )
    return TrainResult(backend=backend, records=records, buffer=buffer, foi=foi)
