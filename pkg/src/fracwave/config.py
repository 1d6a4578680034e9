"""TOML experiment configs with per-command schemas.

Every command validates its config block before any computation starts;
unknown keys are rejected so typos fail fast.
"""

from __future__ import annotations

import math

try:
    import tomllib
except ModuleNotFoundError:          # python 3.10
    import tomli as tomllib

from .errors import ConfigError


class _Required:
    def __repr__(self):
        return "<required>"


REQUIRED = _Required()
OPTIONAL = None   # absent -> None

_COMMON = {
    "model": (str, "kdv"),
    "alpha": (float, REQUIRED),
    "period": (float, 2 * math.pi),
    "num_points": (int, 256),
    "power": (int, 1),
    "tol": (float, 1e-12),
    "max_iter": (int, 50),
}

_WAVE_SOURCE = {
    "wave_file": (str, OPTIONAL),
    "point_index": (int, -1),
    "family_offset": (float, OPTIONAL),   # (c, a) = (1, a0) family wave
    "speed": (float, OPTIONAL),
    "offset": (float, 0.0),
    "seed_eps": (float, 0.05),
    "seed_mode": (int, 1),
}

SCHEMAS = {
    "solve": {**_COMMON, **_WAVE_SOURCE},
    "branch": {
        **_COMMON, **_WAVE_SOURCE,
        "parameter": (str, "speed"),
        "direction": (float, 1.0),
        "steps": (int, 20),
        "initial_step": (float, 0.02),
    },
    "spectrum": {
        **_COMMON, **_WAVE_SOURCE,
        "sector": (str, "full"),
        "projected": (bool, False),
        "k_request": (int, 0),
    },
    "classify": {
        **_COMMON, **_WAVE_SOURCE,
        "fd_step": (float, 1e-4),
    },
    "evolve": {
        **_COMMON, **_WAVE_SOURCE,
        "t_final": (float, 10.0),
        "dt": (float, 1e-3),
        "n_samples": (int, 200),
        "perturb_amplitude": (float, 0.0),
        "perturb_mode": (int, 2),
        "constrain_pm": (bool, False),
    },
    "sweep": {
        "model": (str, "kdv"),
        "power": (int, 1),
        "alphas": (list, REQUIRED),
        "periods": (list, REQUIRED),
        "family_offset": (float, 0.05),
        "num_points": (int, 256),
        "tol": (float, 1e-12),
        "max_iter": (int, 50),
        "pipeline": (str, "classify"),
        "t_final": (float, 10.0),
        "dt": (float, 1e-3),
        "fd_step": (float, 1e-4),
        "max_cells": (int, 10_000),
    },
    "report": {
        "inputs": (list, REQUIRED),
    },
}


def load_config(path: str, command: str) -> dict:
    if command not in SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: TOML parse error: {exc}")
    block = raw[command] if isinstance(raw.get(command), dict) else raw
    return validate_config(block, command, origin=path)


def validate_config(block: dict, command: str, origin: str = "<dict>") -> dict:
    schema = SCHEMAS[command]
    out = {}
    unknown = set(block) - set(schema)
    if unknown:
        raise ConfigError(f"{origin}: unknown keys for {command!r}: "
                          f"{sorted(unknown)}")
    for key, (typ, default) in schema.items():
        if key in block:
            val = block[key]
            if typ is float and isinstance(val, int) and not isinstance(val, bool):
                val = float(val)
            if typ is int and isinstance(val, bool):
                raise ConfigError(f"{origin}: {key} must be {typ.__name__}")
            if not isinstance(val, typ):
                raise ConfigError(f"{origin}: {key} must be {typ.__name__}, "
                                  f"got {type(val).__name__}")
            out[key] = val
        elif default is REQUIRED:
            raise ConfigError(f"{origin}: missing required key {key!r} "
                              f"for {command!r}")
        else:
            out[key] = default
    return out
