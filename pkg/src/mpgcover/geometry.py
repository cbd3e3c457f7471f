"""Downward-camera footprints and the discrete coverage/overlap counts."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .env import AgentState, Cell, ConfigurationError, FieldOfInterest

# Absorbs float rounding so a target sitting exactly on the footprint edge
# (e.g. 45-degree half-angles) still counts as covered; far smaller than the
# gap between any interior/exterior cell and the edge at grid scales.
BOUNDARY_EPS = 1e-9

CoverageSet = frozenset[Cell]


@dataclass(frozen=True)
class FovHalfAngles:
    """Camera half-angles in degrees, one per ground axis."""

    phi_x: float
    phi_y: float

    def __post_init__(self) -> None:
        if not (0.0 < self.phi_x < 90.0 and 0.0 < self.phi_y < 90.0):
            raise ConfigurationError(f"half-angles must lie in (0, 90) degrees, got {self}")

    def tangents(self) -> tuple[float, float]:
        return math.tan(math.radians(self.phi_x)), math.tan(math.radians(self.phi_y))


def footprint_half_widths(agent: AgentState, phi: FovHalfAngles) -> tuple[int, int]:
    """Whole-cell half-widths of the rectangular footprint at the agent's altitude."""
    tan_x, tan_y = phi.tangents()
    return (
        int(math.floor(agent.pz * tan_x + BOUNDARY_EPS)),
        int(math.floor(agent.pz * tan_y + BOUNDARY_EPS)),
    )


def fov_cells(agent: AgentState, foi: FieldOfInterest, phi: FovHalfAngles) -> CoverageSet:
    """Targets inside the agent's rectangular footprint (edge inclusive)."""
    rx, ry = footprint_half_widths(agent, phi)
    return frozenset(
        (x, y)
        for x in range(agent.px - rx, agent.px + rx + 1)
        for y in range(agent.py - ry, agent.py + ry + 1)
        if (x, y) in foi
    )


def coverage_count(agent: AgentState, foi: FieldOfInterest, phi: FovHalfAngles) -> int:
    """Number of targets the agent covers."""
    return len(fov_cells(agent, foi, phi))


def overlap_count(
    agent_i: AgentState,
    agent_j: AgentState,
    foi: FieldOfInterest,
    phi: FovHalfAngles,
) -> int:
    """Number of targets covered by both agents."""
    return len(fov_cells(agent_i, foi, phi) & fov_cells(agent_j, foi, phi))
