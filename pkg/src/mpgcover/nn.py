"""Minimal dense net: rectifier hidden layers, scalar linear head, exact backprop, SGD.

Written directly on numpy arrays (double precision) with no autodiff; the
gradients are closed-form and are verified against finite differences in the
test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FORMAT_TAG = "mpgcover-mlp/v1"


@dataclass(frozen=True)
class SgdConfig:
    learning_rate: float = 1e-3

    def __post_init__(self) -> None:
        if self.learning_rate <= 0.0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")


class Mlp:
    """Fully connected net mapping an input vector to one scalar.

    Hidden layers use the rectifier; the output is linear so the value head
    is unbounded in both directions. Weights and biases are initialised
    uniformly at +-1/sqrt(fan_in), seeded.
    """

    def __init__(self, input_dim: int, hidden: tuple[int, ...] = (64, 64), seed: int = 0):
        if input_dim < 1 or any(h < 1 for h in hidden):
            raise ValueError(f"layer sizes must be >= 1, got input={input_dim}, hidden={hidden}")
        self.sizes = (input_dim, *hidden, 1)
        rng = np.random.default_rng(seed)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases.append(rng.uniform(-bound, bound, size=fan_out))

    @property
    def input_dim(self) -> int:
        return self.sizes[0]

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def _check_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        if xs.ndim != 2 or xs.shape[1] != self.input_dim:
            raise ValueError(f"expected inputs of shape (k, {self.input_dim}), got {xs.shape}")
        return xs

    def forward_batch(self, xs: np.ndarray) -> np.ndarray:
        """Scalar outputs for a stack of input rows."""
        h = self._check_batch(xs)
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if layer < self.n_layers - 1:
                np.maximum(h, 0.0, out=h)
        return h[:, 0]

    def forward(self, x: np.ndarray) -> float:
        """Scalar output for a single input vector."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1:
            raise ValueError(f"expected a flat input vector, got shape {x.shape}")
        return float(self.forward_batch(x[np.newaxis, :])[0])

    def gradients(
        self, xs: np.ndarray, targets: np.ndarray
    ) -> tuple[list[np.ndarray], list[np.ndarray], float]:
        """Mean squared error over the batch and its gradient for every parameter.

        The loss is mean((output - target)^2); the mean reduction keeps the
        learning-rate meaning independent of batch size.
        """
        xs = self._check_batch(xs)
        targets = np.asarray(targets, dtype=np.float64).reshape(-1)
        if targets.shape[0] != xs.shape[0]:
            raise ValueError(f"{xs.shape[0]} inputs but {targets.shape[0]} targets")
        if xs.shape[0] == 0:
            raise ValueError("empty batch")

        # Forward pass, keeping post-activation values for the backward pass.
        acts = [xs]
        h = xs
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if layer < self.n_layers - 1:
                np.maximum(h, 0.0, out=h)
            acts.append(h)

        batch = xs.shape[0]
        err = acts[-1][:, 0] - targets
        loss = float(np.mean(err**2))

        grads_w: list[np.ndarray] = [np.empty(0)] * self.n_layers
        grads_b: list[np.ndarray] = [np.empty(0)] * self.n_layers
        delta = (2.0 / batch) * err[:, np.newaxis]
        for layer in range(self.n_layers - 1, -1, -1):
            grads_w[layer] = acts[layer].T @ delta
            grads_b[layer] = delta.sum(axis=0)
            if layer > 0:
                delta = delta @ self.weights[layer].T
                delta *= acts[layer] > 0.0  # rectifier gate
        return grads_w, grads_b, loss

    def sgd_step(self, xs: np.ndarray, targets: np.ndarray, cfg: SgdConfig) -> float:
        """One plain gradient-descent step; returns the pre-update loss."""
        grads_w, grads_b, loss = self.gradients(xs, targets)
        for w, b, gw, gb in zip(self.weights, self.biases, grads_w, grads_b):
            w -= cfg.learning_rate * gw
            b -= cfg.learning_rate * gb
        return loss

    def state_dict(self) -> dict:
        """Exact textual dump: shapes plus row-major parameters as hex floats."""
        return {
            "format": FORMAT_TAG,
            "sizes": list(self.sizes),
            "weights": [[v.hex() for v in w.ravel()] for w in self.weights],
            "biases": [[v.hex() for v in b] for b in self.biases],
        }

    @classmethod
    def from_state(cls, state: dict) -> "Mlp":
        if state.get("format") != FORMAT_TAG:
            raise ValueError(f"unsupported net format: {state.get('format')!r}")
        sizes = [int(s) for s in state["sizes"]]
        net = cls(sizes[0], hidden=tuple(sizes[1:-1]))
        for layer, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            flat = [float.fromhex(v) for v in state["weights"][layer]]
            net.weights[layer] = np.array(flat, dtype=np.float64).reshape(fan_in, fan_out)
            net.biases[layer] = np.array(
                [float.fromhex(v) for v in state["biases"][layer]], dtype=np.float64
            )
        return net
