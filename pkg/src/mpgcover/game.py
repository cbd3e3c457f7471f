"""Potential-game algebra of the coverage game: rewards, potential, balance term."""

from __future__ import annotations

from dataclasses import dataclass

from .env import FieldOfInterest, JointState
from .geometry import FovHalfAngles, fov_cells


@dataclass(frozen=True)
class CoverageReport:
    """Exact integer accounting of one joint state.

    covered[i] is the number of targets agent i sees, overlaps[i][j] the
    number seen by both i and j (symmetric, zero diagonal), rewards[i] the
    agent's net coverage, and potential the team objective: total coverage
    minus every pairwise overlap counted once.
    """

    covered: tuple[int, ...]
    overlaps: tuple[tuple[int, ...], ...]
    rewards: tuple[int, ...]
    potential: int

    @property
    def n_agents(self) -> int:
        return len(self.covered)


def coverage_report(state: JointState, foi: FieldOfInterest, phi: FovHalfAngles) -> CoverageReport:
    """Per-agent coverage, pairwise overlaps, net rewards, and the potential."""
    n = len(state)
    sets = [fov_cells(agent, foi, phi) for agent in state]
    covered = tuple(len(s) for s in sets)
    o = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            o[i][j] = o[j][i] = len(sets[i] & sets[j])
    rewards = tuple(covered[i] - sum(o[i][j] for j in range(n) if j != i) for i in range(n))
    pot = sum(covered) - sum(o[i][j] for i in range(n) for j in range(i + 1, n))
    return CoverageReport(
        covered=covered,
        overlaps=tuple(tuple(row) for row in o),
        rewards=rewards,
        potential=pot,
    )


def potential(state: JointState, foi: FieldOfInterest, phi: FovHalfAngles) -> int:
    """Team objective shared by all agents; the per-step training reward."""
    return coverage_report(state, foi, phi).potential


def balance_term(state: JointState, foi: FieldOfInterest, phi: FovHalfAngles, agent: int) -> int:
    """Gap between one agent's reward and the potential.

    Built solely from the other agents: minus their coverage, plus the
    overlaps among them, so it is invariant to any move of `agent` and
    rewards[agent] == potential + balance_term(agent) holds exactly.
    """
    report = coverage_report(state, foi, phi)
    n = report.n_agents
    if not 0 <= agent < n:
        raise IndexError(f"agent index {agent} out of range for {n} agents")
    others_cover = sum(report.covered[j] for j in range(n) if j != agent)
    others_overlap = sum(
        report.overlaps[j][k]
        for j in range(n)
        for k in range(j + 1, n)
        if j != agent and k != agent
    )
    return -others_cover + others_overlap
