import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_force_fov, full_foi, random_world
from mpgcover.env import AgentState, ConfigurationError, GridDims
from mpgcover.geometry import FovHalfAngles, coverage_count, fov_cells, overlap_count

DIMS = GridDims(7, 7, 4)
FULL = full_foi(DIMS)


def test_footprint_at_altitude_one_is_own_cell(phi30):
    # half-width tan(30) ~ 0.577 < 1: only the cell under the agent
    assert fov_cells(AgentState(3, 3, 1), FULL, phi30) == frozenset({(3, 3)})


def test_footprint_at_altitude_two_is_3x3(phi30):
    expected = frozenset((x, y) for x in range(2, 5) for y in range(2, 5))
    assert fov_cells(AgentState(3, 3, 2), FULL, phi30) == expected
    assert coverage_count(AgentState(3, 3, 2), FULL, phi30) == 9


def test_empty_foi_gives_empty_cover(phi30):
    assert fov_cells(AgentState(3, 3, 2), frozenset(), phi30) == frozenset()
    assert coverage_count(AgentState(3, 3, 2), frozenset(), phi30) == 0


def test_agent_far_from_targets_covers_nothing(phi30):
    foi = frozenset({(0, 0), (0, 1)})
    assert coverage_count(AgentState(6, 6, 1), foi, phi30) == 0


def test_overlap_identical_agents_equals_coverage(phi30):
    a = AgentState(3, 3, 2)
    assert overlap_count(a, a, FULL, phi30) == coverage_count(a, FULL, phi30)


def test_overlap_disjoint_footprints(phi30):
    assert overlap_count(AgentState(0, 0, 1), AgentState(6, 6, 1), FULL, phi30) == 0


def test_overlap_adjacent_3x3_blocks_share_six_cells(phi30):
    assert overlap_count(AgentState(3, 3, 2), AgentState(4, 3, 2), FULL, phi30) == 6


def test_exact_boundary_cell_is_covered():
    # tan(45 deg) puts cells at offset exactly pz on the footprint edge
    phi45 = FovHalfAngles(45.0, 45.0)
    cover = fov_cells(AgentState(3, 3, 2), FULL, phi45)
    assert (5, 3) in cover and (3, 5) in cover
    assert (6, 3) not in cover


def test_rectangular_footprint_with_asymmetric_angles():
    phi = FovHalfAngles(60.0, 30.0)  # tan: 1.73 / 0.577
    cover = fov_cells(AgentState(3, 3, 1), FULL, phi)
    assert cover == frozenset({(2, 3), (3, 3), (4, 3)})


def test_half_angle_validation():
    with pytest.raises(ConfigurationError):
        FovHalfAngles(0.0, 30.0)
    with pytest.raises(ConfigurationError):
        FovHalfAngles(30.0, 90.0)


agents = st.builds(
    AgentState,
    px=st.integers(0, 8),
    py=st.integers(0, 8),
    pz=st.integers(1, 4),
)


@given(a=agents, b=agents, seed=st.integers(0, 10_000))
@settings(max_examples=200)
def test_overlap_symmetry_and_bound(a, b, seed):
    rng = random.Random(seed)
    _, _, foi, _ = random_world(rng)
    phi = FovHalfAngles(30.0, 30.0)
    o_ab = overlap_count(a, b, foi, phi)
    assert o_ab == overlap_count(b, a, foi, phi)
    assert 0 <= o_ab <= min(coverage_count(a, foi, phi), coverage_count(b, foi, phi))


@given(px=st.integers(0, 6), py=st.integers(0, 6), pz=st.integers(1, 3))
def test_altitude_monotonicity_on_full_plane(px, py, pz):
    phi = FovHalfAngles(30.0, 30.0)
    low = coverage_count(AgentState(px, py, pz), FULL, phi)
    high = coverage_count(AgentState(px, py, pz + 1), FULL, phi)
    assert high >= low


def test_matches_brute_force_oracle_on_random_configurations(phi30):
    rng = random.Random(2024)
    for _ in range(1000):
        dims, _, foi, state = random_world(rng)
        agent = state[0]
        assert fov_cells(agent, foi, phi30) == brute_force_fov(agent, foi, phi30)
