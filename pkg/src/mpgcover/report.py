"""Render run artifacts as figures saved next to the CSV outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .env import FieldOfInterest, GridDims
from .evaluation import McSummary
from .execution import ExecTrace
from .trainer import EpisodeRecord


def _moving_average(values: list[float], window: int) -> np.ndarray:
    if len(values) < window:
        return np.asarray(values, dtype=float)
    return np.convolve(values, np.ones(window) / window, mode="valid")


def save_training_figure(records: list[EpisodeRecord], path: str | Path, window: int = 25) -> Path:
    """Per-episode return with a moving average, plus TD loss and epsilon."""
    episodes = [r.episode for r in records]
    returns = [r.cumulative_return for r in records]
    fig, (ax_ret, ax_loss) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)

    ax_ret.plot(episodes, returns, alpha=0.35, linewidth=0.8, label="return")
    smoothed = _moving_average(returns, window)
    ax_ret.plot(episodes[len(episodes) - len(smoothed) :], smoothed, "r-", label=f"{window}-ep mean")
    ax_ret.set_ylabel("episode return")
    ax_ret.legend(loc="best", frameon=False)
    ax_ret.grid(True, alpha=0.3)

    losses = [r.mean_loss for r in records]
    ax_loss.plot(episodes, losses, color="tab:blue", linewidth=0.8, label="mean TD loss")
    if any(np.isfinite(v) and v > 0 for v in losses):
        ax_loss.set_yscale("log")
    ax_loss.set_xlabel("episode")
    ax_loss.set_ylabel("mean TD loss")
    ax_loss.grid(True, alpha=0.3)
    ax_eps = ax_loss.twinx()
    ax_eps.plot(episodes, [r.epsilon for r in records], color="tab:green", linestyle="--", label="epsilon")
    ax_eps.set_ylabel("epsilon")

    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_trace_figure(
    trace: ExecTrace, foi: FieldOfInterest, dims: GridDims, path: str | Path
) -> Path:
    """Ground-plane view of agent paths over the target blob, plus the potential curve."""
    fig, (ax_map, ax_pot) = plt.subplots(1, 2, figsize=(10, 4.5))

    for (x, y) in foi:
        ax_map.add_patch(plt.Rectangle((x - 0.5, y - 0.5), 1, 1, color="0.82", zorder=0))
    n_agents = len(trace.states[0])
    colors = plt.cm.tab10(np.linspace(0, 1, 10))
    for i in range(n_agents):
        xs = [s[i].px for s in trace.states]
        ys = [s[i].py for s in trace.states]
        zs = [s[i].pz for s in trace.states]
        color = colors[i % 10]
        ax_map.plot(xs, ys, "-", color=color, alpha=0.6)
        # Marker area tracks altitude so climbs read off the 2-D view.
        ax_map.scatter(xs, ys, s=[12 + 14 * z for z in zs], color=color, zorder=3,
                       label=f"agent {i}")
        ax_map.plot(xs[0], ys[0], "s", color=color, markersize=9, fillstyle="none")
        ax_map.plot(xs[-1], ys[-1], "*", color=color, markersize=13)
    ax_map.set_xlim(-0.6, dims.nx - 0.4)
    ax_map.set_ylim(-0.6, dims.ny - 0.4)
    ax_map.set_aspect("equal")
    ax_map.set_xlabel("x")
    ax_map.set_ylabel("y")
    ax_map.legend(loc="upper right", frameon=False, fontsize=8)
    ax_map.set_title("paths over targets (square=start, star=end)")

    ax_pot.plot(range(len(trace.potentials)), trace.potentials, "o-")
    if trace.steps_to_convergence is not None:
        ax_pot.axvline(trace.steps_to_convergence, color="r", linestyle="--",
                       label=f"stable from step {trace.steps_to_convergence}")
        ax_pot.legend(loc="best", frameon=False)
    ax_pot.set_xlabel("step")
    ax_pot.set_ylabel("potential")
    ax_pot.grid(True, alpha=0.3)

    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_histogram_figure(summary: McSummary, path: str | Path) -> Path:
    """Bar chart of steps-to-convergence over the converged trials."""
    fig, ax = plt.subplots(figsize=(6, 4))
    if summary.histogram:
        keys = sorted(summary.histogram)
        ax.bar(keys, [summary.histogram[k] for k in keys], color="tab:red", alpha=0.8)
        ax.set_title(
            f"converged {summary.converged_count}/{summary.trials}, "
            f"mean {summary.mean_steps:.2f}, std {summary.std_steps:.2f}"
        )
    else:
        ax.set_title(f"no converged trials out of {summary.trials}")
    ax.set_xlabel("steps to convergence")
    ax.set_ylabel("trials")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
