"""Command line front end: seeded runs, artifact persistence, metric emission.

Every delimited output starts with two comment lines (format tag, then the
resolved configuration as canonical JSON) so a file is traceable to the run
that produced it. Wall-clock columns aside, outputs are byte-reproducible
for a fixed seed on one build.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import yaml

from .env import ConfigurationError, GridDims, reset
from .evaluation import McSummary, monte_carlo
from .execution import ExecConfig, ExecTrace, execute_policy
from .geometry import FovHalfAngles
from .qfunc import CheckpointError, QBackend, load_backend, save_backend
from .report import save_histogram_figure, save_trace_figure, save_training_figure
from .trainer import EpisodeRecord, Scenario, TrainConfig, TrainResult, build_foi, train

logger = logging.getLogger(__name__)

_PRESET_DIR = Path(__file__).parent / "presets"

# Seed offsets for the stages that draw their own start states.
_SEED_EXEC = 20_000
_SEED_EVAL = 30_000


@dataclass(frozen=True)
class RunConfig:
    train: TrainConfig
    exec_cfg: ExecConfig
    trials: int

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigurationError(f"evaluate.trials must be >= 1, got {self.trials}")

    def as_dict(self) -> dict:
        scenario = self.train.scenario
        return {
            "scenario": {
                "dims": [scenario.dims.nx, scenario.dims.ny, scenario.dims.nz],
                "n_agents": scenario.n_agents,
                "target_count": scenario.target_count,
                "phi_deg": [scenario.phi.phi_x, scenario.phi.phi_y],
            },
            "train": {
                "backend": self.train.backend,
                "episodes": self.train.episodes,
                "max_steps": self.train.max_steps,
                "gamma": self.train.gamma,
                "alpha": self.train.alpha,
                "batch_size": self.train.batch_size,
                "eps_max": self.train.eps_max,
                "eps_min": self.train.eps_min,
                "eps_decay_steps": self.train.eps_decay_steps,
                "buffer_capacity": self.train.buffer_capacity,
                "hidden": list(self.train.hidden),
            },
            "execute": {
                "max_steps": self.exec_cfg.max_steps,
                "sweep_limit": self.exec_cfg.sweep_limit,
                "convergence_window": self.exec_cfg.convergence_window,
            },
            "evaluate": {"trials": self.trials},
            "seed": self.train.seed,
        }


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigurationError(f"missing required key '{key}' in {context}")
    return mapping[key]


def _section(raw: dict, key: str) -> dict:
    section = _require(raw, key, "config")
    if not isinstance(section, dict):
        raise ConfigurationError(f"config section '{key}' must be a mapping")
    return section


def parse_run_config(raw: dict) -> RunConfig:
    """Validate a parsed config document and build the typed run config."""
    if not isinstance(raw, dict):
        raise ConfigurationError("config root must be a mapping")
    known = {"scenario", "train", "execute", "evaluate", "seed"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")

    sc = _section(raw, "scenario")
    dims_raw = _require(sc, "dims", "scenario")
    if not (isinstance(dims_raw, (list, tuple)) and len(dims_raw) == 3):
        raise ConfigurationError(f"scenario.dims must be [nx, ny, nz], got {dims_raw!r}")
    phi_raw = _require(sc, "phi_deg", "scenario")
    if not (isinstance(phi_raw, (list, tuple)) and len(phi_raw) == 2):
        raise ConfigurationError(f"scenario.phi_deg must be [phi_x, phi_y], got {phi_raw!r}")
    scenario = Scenario(
        dims=GridDims(*(int(v) for v in dims_raw)),
        n_agents=int(_require(sc, "n_agents", "scenario")),
        target_count=int(_require(sc, "target_count", "scenario")),
        phi=FovHalfAngles(float(phi_raw[0]), float(phi_raw[1])),
    )

    tr = _section(raw, "train")
    seed = int(_require(raw, "seed", "config"))
    try:
        train_cfg = TrainConfig(
            scenario=scenario,
            episodes=int(tr.get("episodes", 400)),
            max_steps=int(tr.get("max_steps", 200)),
            gamma=float(tr.get("gamma", 0.9)),
            alpha=float(tr.get("alpha", 1e-3)),
            batch_size=int(tr.get("batch_size", 64)),
            eps_max=float(tr.get("eps_max", 1.0)),
            eps_min=float(tr.get("eps_min", 0.05)),
            eps_decay_steps=float(tr.get("eps_decay_steps", 10_000.0)),
            buffer_capacity=int(tr.get("buffer_capacity", 100_000)),
            backend=str(tr.get("backend", "mlp")),
            hidden=tuple(int(h) for h in tr.get("hidden", (64, 64))),
            seed=seed,
        )
    except TypeError as exc:
        raise ConfigurationError(f"invalid train section: {exc}") from exc

    ex = raw.get("execute", {}) or {}
    exec_cfg = ExecConfig(
        max_steps=int(ex.get("max_steps", 20)),
        sweep_limit=int(ex.get("sweep_limit", 10)),
        convergence_window=int(ex.get("convergence_window", 3)),
    )
    ev = raw.get("evaluate", {}) or {}
    return RunConfig(train=train_cfg, exec_cfg=exec_cfg, trials=int(ev.get("trials", 50)))


def preset_names() -> list[str]:
    return sorted(p.stem for p in _PRESET_DIR.glob("*.yaml"))


def load_run_config(spec: str | Path) -> RunConfig:
    """Load a config from a YAML file path or a built-in preset name."""
    path = Path(spec)
    if not path.exists():
        candidate = _PRESET_DIR / f"{spec}.yaml"
        if candidate.exists():
            path = candidate
        else:
            raise ConfigurationError(
                f"config '{spec}' is neither a file nor a preset (presets: {preset_names()})"
            )
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"cannot parse {path}: {exc}") from exc
    return parse_run_config(raw)


def _canonical_json(d: dict) -> str:
    return json.dumps(d, sort_keys=True, separators=(",", ":"))


def _write_csv(path: Path, kind: str, cfg: RunConfig, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# mpgcover {kind} v1\n")
        fh.write(f"# config: {_canonical_json(cfg.as_dict())}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_episodes_csv(records: list[EpisodeRecord], cfg: RunConfig, path: Path) -> None:
    rows = [
        [r.episode, r.cumulative_return, repr(r.duration_ms), repr(r.epsilon), repr(r.mean_loss)]
        for r in records
    ]
    _write_csv(path, "episodes", cfg, ["episode", "return", "duration_ms", "epsilon", "mean_loss"], rows)


def write_trace_csv(trace: ExecTrace, cfg: RunConfig, path: Path) -> None:
    n = len(trace.states[0])
    header = ["step"]
    for i in range(n):
        header += [f"agent{i}_x", f"agent{i}_y", f"agent{i}_z"]
    header.append("J")
    rows = []
    for t, (state, pot) in enumerate(zip(trace.states, trace.potentials)):
        row: list = [t]
        for agent in state:
            row += [agent.px, agent.py, agent.pz]
        row.append(pot)
        rows.append(row)
    _write_csv(path, "trace", cfg, header, rows)


def write_histogram_csv(summary: McSummary, cfg: RunConfig, path: Path) -> None:
    rows = [[k, summary.histogram[k]] for k in sorted(summary.histogram)]
    _write_csv(path, "histogram", cfg, ["steps", "count"], rows)


def write_summary_json(summary: McSummary, cfg: RunConfig, path: Path) -> None:
    payload = {"format": "mpgcover-summary/v1", "config": cfg.as_dict(), **summary.to_dict()}
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def write_resolved_config(cfg: RunConfig, path: Path) -> None:
    path.write_text(yaml.safe_dump(cfg.as_dict(), sort_keys=True))


def run_train(cfg: RunConfig, outdir: Path) -> TrainResult:
    """Train per config and persist checkpoint, metrics, snapshot, and figure."""
    outdir.mkdir(parents=True, exist_ok=True)
    result = train(cfg.train)
    write_resolved_config(cfg, outdir / "resolved_config.yaml")
    write_episodes_csv(result.records, cfg, outdir / "episodes.csv")
    save_backend(result.backend, outdir / "checkpoint.json", meta=cfg.as_dict())
    save_training_figure(result.records, outdir / "training.png")
    logger.info("train artifacts written to %s", outdir)
    return result


def _load_matching_backend(checkpoint: Path, cfg: RunConfig) -> QBackend:
    backend = load_backend(checkpoint)
    scenario = cfg.train.scenario
    if backend.dims != scenario.dims or backend.n_agents != scenario.n_agents:
        raise CheckpointError(
            f"checkpoint {checkpoint} was trained on dims="
            f"{backend.dims} n_agents={backend.n_agents}, config expects "
            f"dims={scenario.dims} n_agents={scenario.n_agents}"
        )
    if backend.kind != cfg.train.backend:
        raise CheckpointError(
            f"checkpoint backend '{backend.kind}' does not match config backend "
            f"'{cfg.train.backend}'"
        )
    return backend


def run_execute(cfg: RunConfig, checkpoint: Path, outdir: Path) -> ExecTrace:
    """Roll out the learned policy from a seeded start and persist the trace."""
    backend = _load_matching_backend(checkpoint, cfg)
    outdir.mkdir(parents=True, exist_ok=True)
    scenario = cfg.train.scenario
    foi = build_foi(cfg.train)
    s0 = reset(scenario.dims, scenario.n_agents, cfg.train.seed + _SEED_EXEC)
    trace = execute_policy(backend, s0, scenario.dims, foi, scenario.phi, cfg.exec_cfg)
    write_trace_csv(trace, cfg, outdir / "trace.csv")
    save_trace_figure(trace, foi, scenario.dims, outdir / "trace.png")
    logger.info("execute artifacts written to %s", outdir)
    return trace


def run_evaluate(cfg: RunConfig, checkpoint: Path, outdir: Path, trials: int | None = None) -> McSummary:
    """Monte Carlo convergence statistics for a checkpoint; persists summary files."""
    backend = _load_matching_backend(checkpoint, cfg)
    outdir.mkdir(parents=True, exist_ok=True)
    scenario = cfg.train.scenario
    foi = build_foi(cfg.train)
    summary = monte_carlo(
        backend,
        scenario.dims,
        scenario.n_agents,
        foi,
        scenario.phi,
        cfg.exec_cfg,
        trials if trials is not None else cfg.trials,
        cfg.train.seed + _SEED_EVAL,
    )
    write_summary_json(summary, cfg, outdir / "summary.json")
    write_histogram_csv(summary, cfg, outdir / "histogram.csv")
    save_histogram_figure(summary, outdir / "histogram.png")
    logger.info("evaluate artifacts written to %s", outdir)
    return summary


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpgcover",
        description="Multi-agent field-coverage potential-game solver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a Q function on a scenario")
    p_train.add_argument("--config", required=True, help="YAML config path or preset name")
    p_train.add_argument("--out", required=True, type=Path, help="output directory")

    p_exec = sub.add_parser("execute", help="run best-response execution from a checkpoint")
    p_exec.add_argument("--checkpoint", required=True, type=Path)
    p_exec.add_argument("--config", required=True)
    p_exec.add_argument("--out", required=True, type=Path)

    p_eval = sub.add_parser("evaluate", help="Monte Carlo convergence statistics")
    p_eval.add_argument("--checkpoint", required=True, type=Path)
    p_eval.add_argument("--config", required=True)
    p_eval.add_argument("--trials", type=int, default=None, help="override evaluate.trials")
    p_eval.add_argument("--out", required=True, type=Path)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("MPGCOVER_LOG", "INFO").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_run_config(args.config)
        if args.command == "train":
            run_train(cfg, args.out)
        elif args.command == "execute":
            run_execute(cfg, args.checkpoint, args.out)
        elif args.command == "evaluate":
            run_evaluate(cfg, args.checkpoint, args.out, trials=args.trials)
    except (ConfigurationError, CheckpointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
