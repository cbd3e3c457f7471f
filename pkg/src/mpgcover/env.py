"""Deterministic 3-D grid world: field of interest, agent kinematics, resets."""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import IntEnum

Cell = tuple[int, int]

# Altitude 0 is excluded: a camera at ground level has no footprint.
MIN_ALTITUDE = 1


class ConfigurationError(ValueError):
    """A scenario or run configuration is invalid."""


@dataclass(frozen=True)
class GridDims:
    """Cell counts per axis; altitude levels run 1..nz inclusive."""

    nx: int
    ny: int
    nz: int

    def __post_init__(self) -> None:
        if min(self.nx, self.ny, self.nz) < 1:
            raise ConfigurationError(f"grid dimensions must all be >= 1, got {self}")


@dataclass(frozen=True)
class AgentState:
    """Integer cell position of one agent (unit cells)."""

    px: int
    py: int
    pz: int


class Action(IntEnum):
    """The six unit moves available to every agent."""

    NORTH = 0  # +y
    SOUTH = 1  # -y
    WEST = 2   # -x
    EAST = 3   # +x
    UP = 4     # +z
    DOWN = 5   # -z


DISPLACEMENT: dict[Action, tuple[int, int, int]] = {
    Action.NORTH: (0, 1, 0),
    Action.SOUTH: (0, -1, 0),
    Action.WEST: (-1, 0, 0),
    Action.EAST: (1, 0, 0),
    Action.UP: (0, 0, 1),
    Action.DOWN: (0, 0, -1),
}

JointState = tuple[AgentState, ...]
JointAction = tuple[Action, ...]
FieldOfInterest = frozenset[Cell]


def state_valid(state: AgentState, dims: GridDims) -> bool:
    return (
        0 <= state.px < dims.nx
        and 0 <= state.py < dims.ny
        and MIN_ALTITUDE <= state.pz <= dims.nz
    )


def joint_state_valid(state: JointState, dims: GridDims) -> bool:
    return all(state_valid(s, dims) for s in state)


def step_agent(state: AgentState, action: Action, dims: GridDims) -> AgentState:
    """Apply one unit move; moves past a wall clamp to a no-op on that axis."""
    dx, dy, dz = DISPLACEMENT[action]
    return AgentState(
        px=min(max(state.px + dx, 0), dims.nx - 1),
        py=min(max(state.py + dy, 0), dims.ny - 1),
        pz=min(max(state.pz + dz, MIN_ALTITUDE), dims.nz),
    )


def step(state: JointState, action: JointAction, dims: GridDims) -> JointState:
    """Advance every agent by its own action; deterministic, always valid."""
    if len(state) != len(action):
        raise ValueError(f"{len(state)} agents but {len(action)} actions")
    return tuple(step_agent(s, a, dims) for s, a in zip(state, action))


def random_state(dims: GridDims, n_agents: int, rng: random.Random) -> JointState:
    """Draw a joint state uniformly over the valid cells."""
    return tuple(
        AgentState(
            px=rng.randrange(dims.nx),
            py=rng.randrange(dims.ny),
            pz=rng.randrange(MIN_ALTITUDE, dims.nz + 1),
        )
        for _ in range(n_agents)
    )


def reset(dims: GridDims, n_agents: int, rng_seed: int) -> JointState:
    """Seeded uniform random joint state; identical seeds give identical states."""
    if n_agents < 1:
        raise ConfigurationError(f"n_agents must be >= 1, got {n_agents}")
    return random_state(dims, n_agents, random.Random(rng_seed))


def _neighbors4(cell: Cell, dims: GridDims) -> list[Cell]:
    x, y = cell
    out = []
    for nx_, ny_ in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
        if 0 <= nx_ < dims.nx and 0 <= ny_ < dims.ny:
            out.append((nx_, ny_))
    return out


def generate_foi(dims: GridDims, target_count: int, rng_seed: int) -> FieldOfInterest:
    """Grow a seeded random connected blob of ground target cells.

    Starts from a uniform random cell and repeatedly annexes a uniform
    random frontier cell, so any connected shape of the requested size can
    occur. Deterministic for a fixed seed.
    """
    if not 1 <= target_count <= dims.nx * dims.ny:
        raise ConfigurationError(
            f"target_count must be in [1, {dims.nx * dims.ny}], got {target_count}"
        )
    rng = random.Random(rng_seed)
    start: Cell = (rng.randrange(dims.nx), rng.randrange(dims.ny))
    blob: set[Cell] = {start}
    frontier: set[Cell] = set(_neighbors4(start, dims))
    while len(blob) < target_count:
        # Sorted draw keeps the expansion independent of set iteration order.
        cell = rng.choice(sorted(frontier))
        blob.add(cell)
        frontier.remove(cell)
        frontier.update(c for c in _neighbors4(cell, dims) if c not in blob)
    return frozenset(blob)
