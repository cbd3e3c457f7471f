"""Q-function over (joint state, joint action): MLP and fixed-sparse backends.

Both backends share one surface (point lookup, bulk evaluation over every
joint action, TD update, checkpoint round-trip) so the trainer and the
executor run unchanged over either.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

import numpy as np

from .env import Action, AgentState, GridDims, JointAction, JointState
from .nn import Mlp, SgdConfig
from .replay import Transition

CHECKPOINT_TAG = "mpgcover-checkpoint/v1"
N_ACTIONS = len(Action)

# Row budget of the bulk evaluator's workspace; keeps intermediates
# cache-resident on small machines instead of churning multi-MB temporaries.
_BULK_ROWS = 1 << 13


class CheckpointError(RuntimeError):
    """A checkpoint file is unreadable or does not match the requested run."""


def n_joint_actions(n_agents: int) -> int:
    return N_ACTIONS**n_agents


def joint_action_from_index(index: int, n_agents: int) -> JointAction:
    """Mixed-radix base-6 decode; agent 0 holds the most significant digit."""
    if not 0 <= index < n_joint_actions(n_agents):
        raise ValueError(f"joint action index {index} out of range for {n_agents} agents")
    digits = []
    for _ in range(n_agents):
        digits.append(Action(index % N_ACTIONS))
        index //= N_ACTIONS
    return tuple(reversed(digits))


def joint_action_index(action: JointAction) -> int:
    index = 0
    for a in action:
        index = index * N_ACTIONS + int(a)
    return index


def uniform_joint_action(n_agents: int, rng: random.Random) -> JointAction:
    """Uniform draw over the full 6^N joint-action space."""
    return joint_action_from_index(rng.randrange(n_joint_actions(n_agents)), n_agents)


class Encoding:
    """Feature map for the MLP backend.

    Per agent: the three coordinates scaled to [0, 1] by their valid span,
    then a 6-way one-hot of the agent's action; 9 features per agent total.
    Injective over the valid domain of a fixed grid.
    """

    def __init__(self, dims: GridDims, n_agents: int):
        self.dims = dims
        self.n_agents = n_agents
        self.state_dim = 3 * n_agents
        self.action_dim = N_ACTIONS * n_agents
        self.input_dim = self.state_dim + self.action_dim
        # Degenerate axes (span 0) map to feature 0.
        self._span = (
            float(max(dims.nx - 1, 1)),
            float(max(dims.ny - 1, 1)),
            float(max(dims.nz - 1, 1)),
        )
        self._action_block: np.ndarray | None = None

    def encode_state(self, state: JointState) -> np.ndarray:
        sx, sy, sz = self._span
        out = np.empty(self.state_dim)
        for i, agent in enumerate(state):
            out[3 * i] = agent.px / sx
            out[3 * i + 1] = agent.py / sy
            out[3 * i + 2] = (agent.pz - 1) / sz
        return out

    def encode_states(self, states: list[JointState]) -> np.ndarray:
        return np.stack([self.encode_state(s) for s in states]) if states else np.empty((0, self.state_dim))

    def encode_action(self, action: JointAction) -> np.ndarray:
        out = np.zeros(self.action_dim)
        for i, a in enumerate(action):
            out[N_ACTIONS * i + int(a)] = 1.0
        return out

    def encode(self, state: JointState, action: JointAction) -> np.ndarray:
        return np.concatenate([self.encode_state(state), self.encode_action(action)])

    def action_block(self) -> np.ndarray:
        """One-hot rows for every joint action, in index order. Cached."""
        if self._action_block is None:
            block = np.zeros((n_joint_actions(self.n_agents), self.action_dim))
            for idx in range(block.shape[0]):
                block[idx] = self.encode_action(joint_action_from_index(idx, self.n_agents))
            self._action_block = block
        return self._action_block


class MlpQ:
    """MLP-backed Q function over the joint state-action encoding."""

    kind = "mlp"

    def __init__(
        self,
        dims: GridDims,
        n_agents: int,
        hidden: tuple[int, ...] = (64, 64),
        seed: int = 0,
    ):
        self.dims = dims
        self.n_agents = n_agents
        self.encoding = Encoding(dims, n_agents)
        self.net = Mlp(self.encoding.input_dim, hidden=hidden, seed=seed)
        self._workspaces: dict[tuple[int, int], np.ndarray] = {}

    @property
    def n_joint_actions(self) -> int:
        return n_joint_actions(self.n_agents)

    def q_value(self, state: JointState, action: JointAction) -> float:
        return self.net.forward(self.encoding.encode(state, action))

    def _workspace(self, rows: int, width: int, slot: int) -> np.ndarray:
        # Alternating slots keep matmul input and output buffers distinct
        # even when consecutive layers share a width.
        key = (rows, width, slot)
        buf = self._workspaces.get(key)
        if buf is None:
            buf = self._workspaces[key] = np.empty((rows, width))
        return buf

    def q_all_actions_batch(self, states: list[JointState]) -> np.ndarray:
        """Q values for every joint action of every given state, shape (B, 6^N).

        The state features are shared across a state's 6^N rows, so the first
        layer is split into a per-state projection plus a projection of the
        one-hot block, and the rest of the net runs over cache-sized chunks
        of states through reused workspaces.
        """
        n_act = self.n_joint_actions
        out = np.empty((len(states), n_act))
        if not states:
            return out
        weights, biases = self.net.weights, self.net.biases
        sdim = self.encoding.state_dim
        state_proj = self.encoding.encode_states(states) @ weights[0][:sdim] + biases[0]
        act_proj = self.encoding.action_block() @ weights[0][sdim:]

        group = min(len(states), max(1, _BULK_ROWS // n_act))
        for start in range(0, len(states), group):
            g = min(group, len(states) - start)
            rows = g * n_act
            h = self._workspace(group * n_act, weights[0].shape[1], 0)[:rows]
            np.add(
                state_proj[start : start + g, np.newaxis, :],
                act_proj[np.newaxis, :, :],
                out=h.reshape(g, n_act, -1),
            )
            np.maximum(h, 0.0, out=h)
            for layer in range(1, len(weights)):
                nxt = self._workspace(group * n_act, weights[layer].shape[1], layer % 2)[:rows]
                np.matmul(h, weights[layer], out=nxt)
                nxt += biases[layer]
                if layer < len(weights) - 1:
                    np.maximum(nxt, 0.0, out=nxt)
                h = nxt
            out[start : start + g] = h.reshape(g, n_act)
        return out

    def q_all_actions(self, state: JointState) -> np.ndarray:
        return self.q_all_actions_batch([state])[0]

    def td_update(self, batch: list[Transition], gamma: float, alpha: float) -> float:
        """Semi-gradient TD step on the batch; returns mean squared TD error.

        Bootstrap targets are plain numbers (no gradient flows through the
        max over next actions).
        """
        _check_td_args(batch, gamma, alpha)
        best_next = self.q_all_actions_batch([t.s_next for t in batch]).max(axis=1)
        rewards = np.array([t.r for t in batch], dtype=np.float64)
        targets = rewards + gamma * best_next
        xs = np.stack([self.encoding.encode(t.s, t.a) for t in batch])
        return self.net.sgd_step(xs, targets, SgdConfig(alpha))

    def state_dict(self) -> dict:
        return {
            "backend": self.kind,
            "dims": [self.dims.nx, self.dims.ny, self.dims.nz],
            "n_agents": self.n_agents,
            "net": self.net.state_dict(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "MlpQ":
        dims = GridDims(*state["dims"])
        net = Mlp.from_state(state["net"])
        backend = cls(dims, int(state["n_agents"]), hidden=tuple(net.sizes[1:-1]))
        backend.net = net
        return backend


class FsrQ:
    """Fixed sparse representation: one indicator weight per seen (s, a) pair.

    Lookups of unseen pairs return 0; the TD step is the classic per-weight
    tabular update w += alpha * delta.
    """

    kind = "fsr"

    def __init__(self, dims: GridDims, n_agents: int):
        self.dims = dims
        self.n_agents = n_agents
        self.weights: dict[tuple, float] = {}

    @property
    def n_joint_actions(self) -> int:
        return n_joint_actions(self.n_agents)

    @staticmethod
    def _key(state: JointState, action: JointAction) -> tuple:
        return (
            tuple((a.px, a.py, a.pz) for a in state),
            tuple(int(a) for a in action),
        )

    def q_value(self, state: JointState, action: JointAction) -> float:
        return self.weights.get(self._key(state, action), 0.0)

    def q_all_actions(self, state: JointState) -> np.ndarray:
        state_key = tuple((a.px, a.py, a.pz) for a in state)
        get = self.weights.get
        n = self.n_agents
        return np.array(
            [
                get((state_key, tuple(int(a) for a in joint_action_from_index(i, n))), 0.0)
                for i in range(self.n_joint_actions)
            ]
        )

    def q_all_actions_batch(self, states: list[JointState]) -> np.ndarray:
        if not states:
            return np.empty((0, self.n_joint_actions))
        return np.stack([self.q_all_actions(s) for s in states])

    def td_update(self, batch: list[Transition], gamma: float, alpha: float) -> float:
        _check_td_args(batch, gamma, alpha)
        sq_errors = []
        for t in batch:
            best_next = float(self.q_all_actions(t.s_next).max())
            key = self._key(t.s, t.a)
            delta = t.r + gamma * best_next - self.weights.get(key, 0.0)
            sq_errors.append(delta * delta)
            self.weights[key] = self.weights.get(key, 0.0) + alpha * delta
        return float(np.mean(sq_errors))

    def state_dict(self) -> dict:
        entries = sorted(
            ([list(map(list, k[0])), list(k[1]), v.hex()] for k, v in self.weights.items()),
            key=lambda e: (e[0], e[1]),
        )
        return {
            "backend": self.kind,
            "dims": [self.dims.nx, self.dims.ny, self.dims.nz],
            "n_agents": self.n_agents,
            "weights": entries,
        }

    @classmethod
    def from_state(cls, state: dict) -> "FsrQ":
        backend = cls(GridDims(*state["dims"]), int(state["n_agents"]))
        for state_part, action_part, value in state["weights"]:
            key = (tuple(tuple(c) for c in state_part), tuple(action_part))
            backend.weights[key] = float.fromhex(value)
        return backend


QBackend = MlpQ | FsrQ
_BACKENDS: dict[str, type] = {"mlp": MlpQ, "fsr": FsrQ}


def _check_td_args(batch: list[Transition], gamma: float, alpha: float) -> None:
    if not batch:
        raise ValueError("empty transition batch")
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    if alpha <= 0.0:
        raise ValueError(f"alpha must be > 0, got {alpha}")


def greedy_joint_action(backend: QBackend, state: JointState) -> tuple[JointAction, float]:
    """Exact argmax over all 6^N joint actions; ties go to the lowest index."""
    values = backend.q_all_actions(state)
    idx = int(np.argmax(values))
    return joint_action_from_index(idx, backend.n_agents), float(values[idx])


def save_backend(backend: QBackend, path: str | Path, meta: dict | None = None) -> None:
    """Write a versioned checkpoint; round-trips parameters exactly."""
    payload = {"format": CHECKPOINT_TAG, **backend.state_dict()}
    if meta:
        payload["config"] = meta
    Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n")


def load_backend(path: str | Path) -> QBackend:
    """Read a checkpoint written by save_backend."""
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != CHECKPOINT_TAG:
        raise CheckpointError(f"{path} is not a {CHECKPOINT_TAG} checkpoint")
    kind = payload.get("backend")
    if kind not in _BACKENDS:
        raise CheckpointError(f"unknown backend kind {kind!r} in {path}")
    try:
        return _BACKENDS[kind].from_state(payload)
    except (KeyError, ValueError, TypeError) as exc:
        raise CheckpointError(f"corrupt checkpoint {path}: {exc}") from exc
