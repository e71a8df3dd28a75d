"""Experiment configuration, read from YAML (JSON also parses)."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml

EXPERIMENTS = ("forward", "backprop-validate", "train-filter", "gradcheck")


class ConfigError(ValueError):
    """Invalid configuration (CLI exit code 1)."""


def _parse_shots(value) -> int | None:
    if value is None or (isinstance(value, str) and value.lower() == "exact"):
        return None
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"shots must be a positive integer or 'exact', got {value!r}")
    return value


@dataclass
class ExperimentConfig:
    experiment: str = "forward"
    dataset_path: str | None = None
    image_count: int = 16
    # "random" draws a seeded unit vector; anything else is a path to a filter file
    filter_source: str = "random"
    filter_seed: int = 0
    shots: int | None = 10000
    stride: int = 1
    window: tuple[int, int] = (4, 4)
    seed: int = 0
    output_dir: str = "out"
    workers: int = 1

    # backprop-validate / gradcheck
    dl_do: float = 0.3
    n_reps: int = 2
    shot_schedule: list = field(default_factory=lambda: [100, 1000, 10000, "exact"])
    epsilon: float = 1e-5

    # train-filter
    runs: int = 1
    depths: list[int] = field(default_factory=lambda: [1, 2, 3])
    target_reps: int = 3
    target_source: str = "random"
    learning_rate: float = 0.5
    momentum: float = 0.95
    max_iters: int = 500
    target_fidelity: float = 0.99
    init: str = "uniform"

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        self.shots = _parse_shots(self.shots)
        self.window = tuple(int(w) for w in self.window)
        if len(self.window) != 2 or min(self.window) < 1:
            raise ConfigError(f"window must be two positive ints, got {self.window}")
        hh, ww = self.window
        if (hh * ww) & (hh * ww - 1) or hh * ww < 2:
            raise ConfigError(f"window {hh}x{ww} does not hold a power-of-two pixel count")
        if self.stride < 1:
            raise ConfigError("stride must be >= 1")
        if self.image_count < 0:
            raise ConfigError("image_count must be >= 0")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.runs < 1 or not self.depths or min(self.depths) < 1 or self.target_reps < 1:
            raise ConfigError("runs, depths and target_reps must be positive")
        if self.n_reps < 1:
            raise ConfigError("n_reps must be >= 1")
        for s in self.shot_schedule:
            _parse_shots(s)

    @property
    def num_qubits(self) -> int:
        hh, ww = self.window
        return (hh * ww).bit_length() - 1

    def schedule(self) -> list[int | None]:
        return [_parse_shots(s) for s in self.shot_schedule]

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            data = yaml.safe_load(path.read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        return cls.from_dict(data)
