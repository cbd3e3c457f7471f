"""Shared fixtures and the independent brute-force oracles the tests check against."""

from __future__ import annotations

import math
import random

import pytest

from mpgcover.env import AgentState, GridDims, JointState, generate_foi, random_state
from mpgcover.geometry import FovHalfAngles

PAPER_DIMS = (GridDims(7, 7, 4), GridDims(9, 9, 4))


@pytest.fixture
def phi30() -> FovHalfAngles:
    return FovHalfAngles(30.0, 30.0)


def full_foi(dims: GridDims) -> frozenset:
    """Every ground cell of the grid is a target."""
    return frozenset((x, y) for x in range(dims.nx) for y in range(dims.ny))


def brute_force_fov(agent: AgentState, foi, phi: FovHalfAngles) -> frozenset:
    """Direct scan of every target cell against the raw footprint inequality.

    Deliberately written as the inequality itself (one comparison per cell)
    rather than via box bounds, so it stays an independent route from the
    production implementation.
    """
    tan_x = math.tan(math.radians(phi.phi_x))
    tan_y = math.tan(math.radians(phi.phi_y))
    return frozenset(
        (x, y)
        for (x, y) in foi
        if abs(x - agent.px) <= agent.pz * tan_x + 1e-9
        and abs(y - agent.py) <= agent.pz * tan_y + 1e-9
    )


def random_world(rng: random.Random, max_agents: int = 4):
    """One random scenario: paper-sized grid, random blob FOI, random joint state."""
    dims = rng.choice(PAPER_DIMS)
    n_agents = rng.randint(1, max_agents)
    count = rng.randint(1, dims.nx * dims.ny)
    foi = generate_foi(dims, count, rng.randrange(1 << 30))
    state: JointState = random_state(dims, n_agents, rng)
    return dims, n_agents, foi, state
