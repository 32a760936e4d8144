"""Configuration for the generator and the recognizer pipeline.

Config files are TOML with a [generator] table and a [pipeline] table
(plus pipeline.layer1 / pipeline.layer2 / pipeline.supervised
subtables). Defaults reproduce the reference experiment: a 30x30 first
layer over right-arm postures, a 35x35 second layer over ordered
vectors, five action classes, three objects.
"""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field, fields
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import InvalidConfig
from .skeleton import DEFAULT_PART_MEMBERS
from .som import TrainingSchedule

DEFAULT_ACTIONS = ("push", "pull", "put", "lift", "point")


@dataclass
class GeneratorConfig:
    """Knobs of the synthetic scene generator."""

    actions: tuple[str, ...] = DEFAULT_ACTIONS
    samples_per_action: int = 12
    n_objects: int = 3
    speed_min: float = 0.8
    speed_max: float = 1.2
    noise_stddev: float = 0.01  # in hip-width units
    frame_rate: float = 30.0
    seed: int = 0

    def __post_init__(self):
        self.actions = tuple(self.actions)
        bad = [a for a in self.actions if a not in DEFAULT_ACTIONS]
        if bad:
            raise InvalidConfig(f"unknown actions {bad}; choose from {DEFAULT_ACTIONS}")
        if len(set(self.actions)) != len(self.actions) or not self.actions:
            raise InvalidConfig("actions must be a nonempty list without repeats")
        if self.samples_per_action < 1:
            raise InvalidConfig("samples_per_action must be >= 1")
        if self.n_objects < 1:
            raise InvalidConfig("n_objects must be >= 1")
        if not (0 < self.speed_min <= self.speed_max):
            raise InvalidConfig("need 0 < speed_min <= speed_max")
        if self.noise_stddev < 0:
            raise InvalidConfig("noise_stddev must be >= 0")
        if self.frame_rate <= 0:
            raise InvalidConfig("frame_rate must be positive")


@dataclass
class SomLayerConfig:
    """Geometry plus training schedule of one map layer."""

    rows: int
    cols: int
    epochs: int
    alpha0: float = 0.1
    tau_alpha: float | None = None
    sigma0: float | None = None
    tau_sigma: float | None = None
    squared_neighborhood: bool = False

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InvalidConfig("grid sides must be >= 1")
        if self.epochs < 0:
            raise InvalidConfig("epochs must be >= 0")
        if not (0 < self.alpha0 <= 1):
            raise InvalidConfig("alpha0 must be in (0, 1]")

    def schedule(self) -> TrainingSchedule:
        return TrainingSchedule(
            epochs=self.epochs,
            alpha0=self.alpha0,
            tau_alpha=self.tau_alpha,
            sigma0=self.sigma0,
            tau_sigma=self.tau_sigma,
            squared_neighborhood=self.squared_neighborhood,
        )


@dataclass
class SupervisedConfig:
    epochs: int = 500
    beta: float = 0.1
    printed_error_sign: bool = False

    def __post_init__(self):
        if self.epochs < 0:
            raise InvalidConfig("epochs must be >= 0")
        if self.beta <= 0:
            raise InvalidConfig("beta must be positive")


@dataclass
class PipelineConfig:
    """Everything the trainer and recognizer need besides the data."""

    attended_part: str = "RightArm"
    activity_sigma: float = 1e6
    supervised_input_sigma: float = 1.0
    dedupe_trace: bool = True
    object_aggregate: str = "mean"
    seed: int = 0
    layer1: SomLayerConfig = field(
        default_factory=lambda: SomLayerConfig(rows=30, cols=30, epochs=1000)
    )
    layer2: SomLayerConfig = field(
        default_factory=lambda: SomLayerConfig(rows=35, cols=35, epochs=1000)
    )
    supervised: SupervisedConfig = field(default_factory=SupervisedConfig)

    def __post_init__(self):
        if self.attended_part not in DEFAULT_PART_MEMBERS:
            raise InvalidConfig(
                f"attended_part must be one of {sorted(DEFAULT_PART_MEMBERS)}"
            )
        if self.activity_sigma <= 0 or self.supervised_input_sigma <= 0:
            raise InvalidConfig("activation sigmas must be positive")
        if self.object_aggregate not in ("mean", "min"):
            raise InvalidConfig("object_aggregate must be 'mean' or 'min'")


def _build(cls, table: dict[str, Any], where: str):
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(table) - known)
    if unknown:
        raise InvalidConfig(f"unknown key(s) {unknown} in [{where}]")
    try:
        return cls(**table)
    except TypeError as err:
        raise InvalidConfig(f"bad [{where}] table: {err}") from None


def pipeline_config_from_dict(table: dict[str, Any]) -> PipelineConfig:
    table = dict(table)
    sub = {}
    for name, cls in (("layer1", SomLayerConfig), ("layer2", SomLayerConfig),
                      ("supervised", SupervisedConfig)):
        if name in table:
            raw = table.pop(name)
            if not isinstance(raw, dict):
                raise InvalidConfig(f"[pipeline.{name}] must be a table")
            sub[name] = _build(cls, raw, f"pipeline.{name}")
    cfg = _build(PipelineConfig, table, "pipeline")
    for name, value in sub.items():
        setattr(cfg, name, value)
    return cfg


def generator_config_from_dict(table: dict[str, Any]) -> GeneratorConfig:
    return _build(GeneratorConfig, table, "generator")


@dataclass
class Config:
    """Top-level parsed config file."""

    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)


def load_config(path: str) -> Config:
    """Read a TOML config; missing tables fall back to defaults."""
    try:
        with open(path, "rb") as fp:
            doc = tomllib.load(fp)
    except tomllib.TOMLDecodeError as err:
        raise InvalidConfig(f"{path}: {err}") from None
    unknown = sorted(set(doc) - {"generator", "pipeline"})
    if unknown:
        raise InvalidConfig(f"unknown top-level table(s) {unknown} in {path}")
    cfg = Config()
    if "generator" in doc:
        cfg.generator = generator_config_from_dict(doc["generator"])
    if "pipeline" in doc:
        cfg.pipeline = pipeline_config_from_dict(doc["pipeline"])
    return cfg


def pipeline_config_to_dict(cfg: PipelineConfig) -> dict[str, Any]:
    """JSON-ready snapshot, inverse of pipeline_config_from_dict."""
    return asdict(cfg)
