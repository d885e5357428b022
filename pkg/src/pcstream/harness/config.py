"""Run configuration and its flat key-value file form."""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml

from ..classifier import LearningConfig
from ..clpc import FitConfig
from ..errors import ConfigError
from ..matching import MatchConfig
from ..sampling import QueryConfig, Strategy
from .data import Fixed, RateMode, parse_rate

# flat key -> (section, attribute)
_FLAT_KEYS = {
    "error_threshold": ("fit", "error_threshold"),
    "bar_width": ("fit", "bar_width"),
    "initial_radius": ("fit", "initial_radius"),
    "angle_threshold_deg": ("fit", "angle_threshold_deg"),
    "potential_rel_threshold": ("match", "potential_rel_threshold"),
    "grid_step": ("match", "grid_step"),
    "refine_halfwidth": ("match", "refine_halfwidth"),
    "prune_enabled": ("match", "prune_enabled"),
    "norm_includes_time": ("match", "norm_includes_time"),
    "alpha": ("learning", "alpha"),
    "learning_enabled": ("learning", "enabled"),
    "strategy": ("query", "strategy"),
    "threshold": ("query", "threshold"),
    "history_capacity": ("query", "history_capacity"),
    "budget": (None, "budget"),
    "budget_window": (None, "budget_window"),
    "history_length": (None, "history_length"),
    "repetitions": (None, "repetitions"),
    "seed": (None, "seed"),
    "split_fraction": (None, "split_fraction"),
    "rate": (None, "rate"),
    "standardize": (None, "standardize"),
}


@dataclass(frozen=True)
class RunConfig:
    fit: FitConfig = FitConfig()
    match: MatchConfig = MatchConfig()
    learning: LearningConfig = LearningConfig()
    query: QueryConfig = QueryConfig()
    budget: int = 30
    budget_window: int = 100
    history_length: int = 10
    repetitions: int = 1
    seed: int = 0
    split_fraction: float = 0.6
    rate: RateMode = Fixed(1)
    standardize: bool = False

    def __post_init__(self):
        if self.history_length < 1:
            raise ConfigError("history_length must be >= 1")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.budget < 0 or self.budget_window < 1:
            raise ConfigError("budget must be >= 0 and budget_window >= 1")
        if not 0.0 < self.split_fraction < 1.0:
            raise ConfigError("split_fraction must lie in (0, 1)")
        object.__setattr__(self, "rate", parse_rate(self.rate))

    def to_flat(self) -> Dict[str, Any]:
        out = {}
        for key, (section, attr) in _FLAT_KEYS.items():
            value = getattr(getattr(self, section), attr) if section else getattr(self, attr)
            if isinstance(value, Strategy):
                value = value.value
            elif key == "rate":
                value = str(value)
            elif isinstance(value, float) and value == float("inf"):
                value = None
            out[key] = value
        return out

    def with_overrides(self, overrides: Mapping[str, Any]) -> "RunConfig":
        """Apply flat ``key: value`` overrides; ``None`` values are skipped."""
        sections: Dict[str, Dict[str, Any]] = {"fit": {}, "match": {}, "learning": {}, "query": {}}
        top: Dict[str, Any] = {}
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in _FLAT_KEYS:
                raise ConfigError(f"unknown configuration key {key!r}")
            section, attr = _FLAT_KEYS[key]
            (sections[section] if section else top)[attr] = value
        q = sections["query"]
        if "strategy" in q and "threshold" not in q and getattr(q["strategy"], "value", q["strategy"]) != self.query.strategy.value:
            # a new strategy without an explicit threshold takes that strategy's default
            sections["query"]["threshold"] = None
        try:
            new = replace(
                self,
                fit=replace(self.fit, **sections["fit"]),
                match=replace(self.match, **sections["match"]),
                learning=replace(self.learning, **sections["learning"]),
                query=replace(self.query, **sections["query"]),
                **top,
            )
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        return new


def load_config_file(path) -> Dict[str, Any]:
    """Read a flat mapping from a YAML or JSON file."""
    text = Path(path).read_text(encoding="utf-8")
    data = yaml.safe_load(text) if text.strip() else {}
    if data is None:
        data = {}
    if not isinstance(data, dict) or any(isinstance(v, (dict, list)) for v in data.values()):
        raise ConfigError(f"{path}: configuration must be a flat key-value mapping")
    return data


def build_config(file: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    cfg = RunConfig()
    if file:
        cfg = cfg.with_overrides(load_config_file(file))
    if overrides:
        cfg = cfg.with_overrides(overrides)
    return cfg


def dumps_flat(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_flat(), sort_keys=True)
