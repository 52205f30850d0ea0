"""INI-backed pipeline configuration with typed sections.

The file uses one section per pipeline stage::

    [augment]
    fraction = 0.10
    seed = 0
    techniques = anonymize, lowercase, uppercase, homoglyph
    homoglyph_rate = 1.0

    [train]
    peak_lr = 0.1
    warmup_ratio = 0.03
    batch_size = 1
    grad_accum = 1
    eval_every_steps = 100
    epochs = 1
    seed = 0

    [selftrain]
    pos_threshold = 0.99
    neg_threshold = 0.01
    rounds = 1

    [decision]
    threshold = 0.5

    [backend]
    type = native
    url = http://localhost:8765

Every key is optional; omitted keys fall back to the dataclass defaults.
Command-line flags override file values (flags win).
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .augment import AugmentConfig
from .model import DecisionRule, TrainConfig
from .selftrain import SelfTrainConfig

BACKEND_NATIVE = "native"
BACKEND_REMOTE = "remote"


class ConfigError(Exception):
    """Unreadable, unknown, or ill-typed configuration content."""


def _parse_techniques(raw: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in raw.split(",") if part.strip())


_SECTION_TYPES: dict[str, dict[str, type | object]] = {
    "augment": {
        "fraction": float,
        "seed": int,
        "techniques": _parse_techniques,
        "homoglyph_rate": float,
    },
    "train": {
        "peak_lr": float,
        "warmup_ratio": float,
        "batch_size": int,
        "grad_accum": int,
        "eval_every_steps": int,
        "epochs": int,
        "seed": int,
        "weight_decay": float,
    },
    "selftrain": {
        "pos_threshold": float,
        "neg_threshold": float,
        "rounds": int,
    },
    "decision": {
        "threshold": float,
    },
    "backend": {
        "type": str,
        "url": str,
    },
}


@dataclass
class PipelineConfig:
    """Aggregated configuration for all pipeline commands."""

    augment: AugmentConfig = field(default_factory=AugmentConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    selftrain: SelfTrainConfig = field(default_factory=SelfTrainConfig)
    decision: DecisionRule = field(default_factory=DecisionRule)
    backend_type: str = BACKEND_NATIVE
    backend_url: str | None = None

    def __post_init__(self):
        if self.backend_type not in (BACKEND_NATIVE, BACKEND_REMOTE):
            raise ConfigError(
                f"backend type must be '{BACKEND_NATIVE}' or '{BACKEND_REMOTE}', got {self.backend_type!r}"
            )
        if self.backend_type == BACKEND_REMOTE and not self.backend_url:
            raise ConfigError("backend type 'remote' requires a url")


def read_config_file(path: str | Path) -> dict[str, dict]:
    """Parse an INI config file into per-section typed value dicts.

    Unknown sections or keys raise ConfigError so typos never silently
    fall back to defaults.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    values: dict[str, dict] = {}
    for section in parser.sections():
        if section not in _SECTION_TYPES:
            raise ConfigError(f"{path}: unknown section [{section}]")
        schema = _SECTION_TYPES[section]
        values[section] = {}
        for key, raw in parser.items(section):
            if key not in schema:
                raise ConfigError(f"{path}: unknown key {key!r} in section [{section}]")
            converter = schema[key]
            try:
                values[section][key] = converter(raw)
            except ValueError as exc:
                raise ConfigError(f"{path}: bad value for [{section}] {key} = {raw!r}") from exc
    return values


def build_pipeline_config(
    file_values: dict[str, dict] | None = None,
    overrides: dict[str, dict] | None = None,
) -> PipelineConfig:
    """Merge defaults < config file < command-line overrides."""
    merged: dict[str, dict] = {name: {} for name in _SECTION_TYPES}
    for source in (file_values or {}), (overrides or {}):
        for section, kv in source.items():
            merged.setdefault(section, {}).update(
                {k: v for k, v in kv.items() if v is not None}
            )
    backend = merged.get("backend", {})
    try:
        return PipelineConfig(
            augment=AugmentConfig(**merged.get("augment", {})),
            train=TrainConfig(**merged.get("train", {})),
            selftrain=SelfTrainConfig(**merged.get("selftrain", {})),
            decision=DecisionRule(**merged.get("decision", {})),
            backend_type=backend.get("type", BACKEND_NATIVE),
            backend_url=backend.get("url"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_pipeline_config(
    path: str | Path | None, overrides: dict[str, dict] | None = None
) -> PipelineConfig:
    file_values = read_config_file(path) if path else None
    return build_pipeline_config(file_values, overrides)
