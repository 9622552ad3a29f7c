"""Engine configuration: one YAML file holds every tunable.

All values have defaults; a config file only needs the data paths and may
override anything else. The loaded dict snapshot is stored inside the
workspace so query answers stay reproducible.
"""

from __future__ import annotations

import copy
from pathlib import Path
from typing import Any

import yaml

DEFAULTS: dict[str, Any] = {
    "data": {
        "streets": None,
        "crime": None,
        "transport": None,
        "favelas": None,
        "tracts": None,
        "weather_series": None,
        "weather_stations": None,
        "trips": None,  # optional pre-existing trips CSV
    },
    "projection_origin": None,  # {"lat": .., "lon": ..} or null for centroid
    "analysis_year": 2020,
    "radii": {
        "near_dead_end_m": 100.0,
        "transport_m": 200.0,
        "favela_m": 500.0,
        "hotspot_label_m": 500.0,
    },
    "census_epsilon_m": 1.0,
    "snap_tolerance_m": 0.5,
    "hotspots": {"theta": 0.5, "min_count": 5},
    "trips": {
        "n": 87_000,
        "seed": 7,
        "ratio_denominator": 91,
        "period_weights": {"morning": 0.30, "afternoon": 0.35, "night": 0.25, "dawn": 0.10},
        "weekday_weights": {
            "Mon": 0.155, "Tue": 0.155, "Wed": 0.155, "Thu": 0.155, "Fri": 0.155,
            "Sat": 0.1125, "Sun": 0.1125,
        },
    },
    "model": {
        "rounds": 200,
        "depth": 4,
        "learning_rate": 0.2,
        "reg_lambda": 1.0,
        "min_samples_leaf": 1,
        "seed": 13,
        "test_fraction": 0.2,
        "split_seed": 5,
        "undersample_seed": 29,
    },
    "grid": {"cell_m": 500.0},
    "analytics": {
        "shapley_samples": 1000,
        "shapley_permutations": 10,
        "shapley_seed": 17,
    },
    "index": {"leaf_capacity": 16, "max_depth": 24},
    "server": {"host": "127.0.0.1", "port": 8765, "cors_origins": ["*"]},
    "workspace": "workspace.json.gz",
}


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key in out and isinstance(out[key], dict) and isinstance(value, dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a YAML config and merge it over the defaults.

    Relative data/workspace paths are resolved against the config file's
    directory.
    """
    path = Path(path)
    raw = yaml.safe_load(path.read_text()) or {}
    if not isinstance(raw, dict):
        raise ValueError(f"config root must be a mapping: {path}")
    unknown = set(raw) - set(DEFAULTS)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    cfg = _merge(DEFAULTS, raw)
    base_dir = path.resolve().parent
    for key, value in cfg["data"].items():
        if value is not None:
            cfg["data"][key] = str((base_dir / value).resolve())
    cfg["workspace"] = str((base_dir / cfg["workspace"]).resolve())
    return cfg


def default_config() -> dict[str, Any]:
    return copy.deepcopy(DEFAULTS)


def period_weight_tuple(cfg: dict) -> tuple[float, ...]:
    from .trips import PERIODS

    weights = cfg["trips"]["period_weights"]
    return tuple(float(weights[p]) for p in PERIODS)


def weekday_weight_tuple(cfg: dict) -> tuple[float, ...]:
    from .trips import WEEKDAYS

    weights = cfg["trips"]["weekday_weights"]
    return tuple(float(weights[d]) for d in WEEKDAYS)
