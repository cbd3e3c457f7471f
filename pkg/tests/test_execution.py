import random

import pytest

from mpgcover.env import Action, AgentState, ConfigurationError, GridDims, random_state, reset
from mpgcover.execution import (
    ExecConfig,
    best_response_action,
    best_response_sweep,
    execute_policy,
)
from mpgcover.game import potential
from mpgcover.geometry import FovHalfAngles
from mpgcover.qfunc import FsrQ, MlpQ, greedy_joint_action, joint_action_from_index

from conftest import full_foi

DIMS = GridDims(3, 3, 2)
PHI = FovHalfAngles(30.0, 30.0)


def random_table(dims: GridDims, n_agents: int, state, rng: random.Random) -> FsrQ:
    """FSR table with a random value on every joint action of one state."""
    q = FsrQ(dims, n_agents)
    for idx in range(q.n_joint_actions):
        a = joint_action_from_index(idx, n_agents)
        q.weights[q._key(state, a)] = rng.uniform(-1, 1)
    return q


def test_best_response_on_zero_q_is_lowest_index():
    q = FsrQ(DIMS, 2)
    s = reset(DIMS, 2, 0)
    assert best_response_action(q, s, (Action.EAST, Action.WEST), 0) == Action.NORTH


def test_best_response_prefers_hand_set_action():
    q = FsrQ(DIMS, 2)
    s = reset(DIMS, 2, 1)
    fixed = (Action.EAST, Action.WEST)
    q.weights[q._key(s, (Action.EAST, Action.UP))] = 5.0
    assert best_response_action(q, s, fixed, 1) == Action.UP


def test_best_response_matches_enumeration():
    rng = random.Random(4)
    for trial in range(30):
        s = random_state(DIMS, 2, rng)
        q = random_table(DIMS, 2, s, rng)
        others = (rng.choice(list(Action)), rng.choice(list(Action)))
        agent = trial % 2
        best = best_response_action(q, s, others, agent)
        candidates = []
        for a in Action:
            joint = list(others)
            joint[agent] = a
            candidates.append((q.q_value(s, tuple(joint)), -int(a), a))
        expected = max(candidates)[2]
        assert best == expected


def test_sweep_returns_fixed_point_unchanged():
    q = FsrQ(DIMS, 2)
    s = reset(DIMS, 2, 2)
    init = (Action.NORTH, Action.NORTH)  # already each agent's best on a zero table
    assert best_response_sweep(q, s, init, sweep_limit=5) == init


def test_sweep_single_agent_is_plain_argmax():
    rng = random.Random(5)
    s = random_state(DIMS, 1, rng)
    q = random_table(DIMS, 1, s, rng)
    swept = best_response_sweep(q, s, (Action.DOWN,), sweep_limit=5)
    assert swept == greedy_joint_action(q, s)[0]


def test_sweep_output_is_unilaterally_stable():
    rng = random.Random(6)
    for _ in range(50):
        n = rng.randint(1, 3)
        s = random_state(DIMS, n, rng)
        q = random_table(DIMS, n, s, rng)
        init = tuple(rng.choice(list(Action)) for _ in range(n))
        swept = best_response_sweep(q, s, init, sweep_limit=20)
        value = q.q_value(s, swept)
        for agent in range(n):
            for alt in Action:
                joint = list(swept)
                joint[agent] = alt
                assert q.q_value(s, tuple(joint)) <= value + 1e-12


def test_execute_converges_immediately_on_clamping_policy():
    # Agent pinned at the corner: WEST keeps clamping, so the state never moves.
    dims = GridDims(2, 2, 1)
    q = FsrQ(dims, 1)
    s0 = (AgentState(0, 0, 1),)
    q.weights[q._key(s0, (Action.WEST,))] = 10.0
    trace = execute_policy(q, s0, dims, full_foi(dims), PHI, ExecConfig())
    assert trace.steps_to_convergence == 1
    assert trace.converged
    assert all(state == s0 for state in trace.states)


def test_execute_zero_steps_gives_single_row_unconverged():
    q = FsrQ(DIMS, 1)
    s0 = reset(DIMS, 1, 3)
    trace = execute_policy(q, s0, DIMS, full_foi(DIMS), PHI, ExecConfig(max_steps=0))
    assert len(trace.states) == 1
    assert trace.actions == []
    assert trace.steps_to_convergence is None
    assert not trace.converged


def test_trace_potentials_match_recomputation():
    rng = random.Random(8)
    foi = full_foi(DIMS)
    q = MlpQ(DIMS, 2, seed=9)
    s0 = random_state(DIMS, 2, rng)
    trace = execute_policy(q, s0, DIMS, foi, PHI, ExecConfig(max_steps=10))
    assert len(trace.states) == 11
    assert len(trace.actions) == 10
    for state, pot in zip(trace.states, trace.potentials):
        assert pot == potential(state, foi, PHI)


def test_trace_length_bounded_by_max_steps():
    q = FsrQ(DIMS, 1)
    s0 = reset(DIMS, 1, 4)
    cfg = ExecConfig(max_steps=7)
    trace = execute_policy(q, s0, DIMS, full_foi(DIMS), PHI, cfg)
    assert len(trace.states) <= cfg.max_steps + 1


def test_exec_config_validation():
    with pytest.raises(ConfigurationError):
        ExecConfig(max_steps=-1)
    with pytest.raises(ConfigurationError):
        ExecConfig(sweep_limit=0)
    with pytest.raises(ConfigurationError):
        ExecConfig(convergence_window=0)
