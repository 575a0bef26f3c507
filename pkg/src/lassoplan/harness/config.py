"""Experiment configuration loading and instance construction."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..automaton import Nba, parse_nba
from ..errors import ConfigError
from ..model import Wts, generate_grid, generate_random_wts, wts_from_json

MODES = ("synthesize", "benchmark", "success_curve", "compare_bias", "oracle_check")


@dataclass
class InstanceSpec:
    """One planning instance: per-robot system specs plus the automaton."""

    name: str
    wts_specs: list
    nba_spec: dict
    base_dir: Path = field(default_factory=Path)

    def build(self) -> tuple:
        team = []
        for i, spec in enumerate(self.wts_specs):
            team.append(_build_wts(spec, robot_id=i + 1, base_dir=self.base_dir))
        nba = _build_nba(self.nba_spec, base_dir=self.base_dir)
        return team, nba


def _build_wts(spec: dict, robot_id: int, base_dir: Path) -> Wts:
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ConfigError(f"robot spec must have exactly one key, got {spec!r}")
    kind, params = next(iter(spec.items()))
    if kind == "file":
        with open(base_dir / params) as fh:
            doc = json.load(fh)
        wts = wts_from_json(doc)
        if wts.robot_id != robot_id:
            raise ConfigError(
                f"{params}: file declares robot {wts.robot_id}, position needs {robot_id}"
            )
        return wts
    if kind == "random":
        return generate_random_wts(
            n_states=int(params["n_states"]),
            avg_degree=float(params["avg_degree"]),
            seed=int(params["seed"]),
            weight_range=tuple(params.get("weight_range", (1.0, 10.0))),
            self_loop_weight=float(params.get("self_loop_weight", 0.0)),
            robot_id=robot_id,
            initial=params.get("initial"),
        )
    if kind == "grid":
        return generate_grid(
            rows=int(params["rows"]),
            cols=int(params["cols"]),
            with_self_loops=bool(params.get("self_loops", True)),
            weight_model=float(params.get("weight", 1.0)),
            robot_id=robot_id,
            initial=params.get("initial"),
        )
    raise ConfigError(f"unknown robot spec kind {kind!r}")


def _build_nba(spec: dict, base_dir: Path) -> Nba:
    if "file" in spec:
        with open(base_dir / spec["file"]) as fh:
            return parse_nba(json.load(fh))
    if "inline" in spec:
        return parse_nba(spec["inline"])
    raise ConfigError('nba spec needs "file" or "inline"')


@dataclass
class ExperimentConfig:
    mode: str
    instances: list  # of InstanceSpec
    trials: int = 20
    n_max_grid: list = field(default_factory=lambda: [1000])
    n_max_pre: int = 2000
    n_max_suf: int = 2000
    p_rand: float = 0.9
    p_new: float = 0.9
    beta: float = 0.5
    bias: str = "sequential"
    schedule: str = "on_goal_found"
    rewire: str = "on_goal"
    master_seed: int = 0
    timeout_s: Optional[float] = None
    witness: object = "oracle"
    workers: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if any(n <= 0 for n in self.n_max_grid):
            raise ConfigError("n_max values must be positive")
        if not self.instances:
            raise ConfigError("at least one instance is required")


def load_experiment_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return experiment_config_from_dict(doc, base_dir=path.parent)


def experiment_config_from_dict(doc: dict, base_dir: Path = Path()) -> ExperimentConfig:
    if "mode" not in doc:
        raise ConfigError('config needs a "mode"')
    raw_instances = doc.get("instances")
    if raw_instances is None:
        if "instance" not in doc:
            raise ConfigError('config needs "instance" or "instances"')
        raw_instances = [dict(doc["instance"], name=doc["instance"].get("name", "instance"))]
    instances = []
    for k, inst in enumerate(raw_instances):
        if "wts" not in inst or "nba" not in inst:
            raise ConfigError(f"instances[{k}] needs wts and nba")
        instances.append(
            InstanceSpec(
                name=str(inst.get("name", f"instance{k}")),
                wts_specs=inst["wts"],
                nba_spec=inst["nba"],
                base_dir=base_dir,
            )
        )
    n_max = doc.get("n_max", [1000])
    if isinstance(n_max, (int, float)):
        n_max = [int(n_max)]
    return ExperimentConfig(
        mode=doc["mode"],
        instances=instances,
        trials=int(doc.get("trials", 20)),
        n_max_grid=[int(n) for n in n_max],
        n_max_pre=int(doc.get("n_max_pre", 2000)),
        n_max_suf=int(doc.get("n_max_suf", 2000)),
        p_rand=float(doc.get("p_rand", 0.9)),
        p_new=float(doc.get("p_new", 0.9)),
        beta=float(doc.get("beta", 0.5)),
        bias=str(doc.get("bias", "sequential")),
        schedule=str(doc.get("schedule", "on_goal_found")),
        rewire=str(doc.get("rewire", "on_goal")),
        master_seed=int(doc.get("master_seed", 0)),
        timeout_s=doc.get("timeout_s"),
        witness=doc.get("witness", "oracle"),
        workers=int(doc.get("workers", 1)),
    )
