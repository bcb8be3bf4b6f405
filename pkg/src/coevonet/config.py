"""Config file ingestion.

A config is a flat TOML document whose keys mirror :class:`SimConfig`, with
the lifetime distribution as one inline table::

    seed = 7
    delta = 0.9
    r = 0.2
    birth_death_enabled = true
    lambda = 3
    lifetime = { kind = "powerlaw", x_min = 80, alpha = 5 }

The ``summary.json`` written by ``simulate`` embeds the fully resolved config
under ``"config"``; passing that JSON file back in replays the run.
"""

from __future__ import annotations

import dataclasses
import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .distributions import lifetime_from_dict, lifetime_to_dict
from .engine import SimConfig

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


# config key -> (SimConfig field, expected type)
_FIELDS: Dict[str, tuple] = {
    "rows": ("rows", int),
    "cols": ("cols", int),
    "initial_per_cell": ("initial_per_cell", int),
    "birth_death_enabled": ("birth_death_enabled", bool),
    "lambda": ("lam", float),
    "lifetime": ("lifetime", dict),
    "delta": ("delta", float),
    "eta": ("eta", float),
    "gamma": ("gamma", float),
    "game": ("game", str),
    "r": ("r", float),
    "kappa": ("kappa", float),
    "beta": ("beta", float),
    "tau": ("tau", float),
    "sigma": ("sigma", float),
    "horizon": ("horizon", int),
    "seed": ("seed", int),
    "record_every": ("record_every", int),
    "snapshot_steps": ("snapshot_steps", list),
    "reward_mode": ("reward_mode", str),
}


def _coerce(key: str, value: Any, kind: type) -> Any:
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected boolean, got {value!r}")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected integer, got {value!r}")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected number, got {value!r}")
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected string, got {value!r}")
        return value
    if kind is dict:
        if not isinstance(value, Mapping):
            raise ConfigError(f"{key}: expected table, got {value!r}")
        try:
            return lifetime_from_dict(value)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if kind is list:
        if not isinstance(value, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in value
        ):
            raise ConfigError(f"{key}: expected list of integers, got {value!r}")
        return tuple(value)
    raise AssertionError(kind)


def config_from_dict(doc: Mapping[str, Any], require_seed: bool = False) -> SimConfig:
    unknown = sorted(set(doc) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    if require_seed and "seed" not in doc:
        raise ConfigError("seed: required")
    kwargs = {}
    defaults = {f.name: f.default for f in dataclasses.fields(SimConfig)}
    for key, (name, kind) in _FIELDS.items():
        if key in doc:
            kwargs[name] = _coerce(key, doc[key], kind)
        elif key != "seed":
            log.info("config: %s not set, using default %r", key, defaults[name])
    try:
        return SimConfig(**kwargs)
    except ValueError as exc:
        msg = str(exc)
        if msg.startswith("lam "):
            msg = "lambda " + msg[4:]
        raise ConfigError(msg) from None


def config_to_dict(cfg: SimConfig) -> Dict[str, Any]:
    out = {}
    for key, (name, kind) in _FIELDS.items():
        v = getattr(cfg, name)
        if kind is dict:
            v = lifetime_to_dict(v)
        elif kind is list:
            v = list(v)
        out[key] = v
    return out


def load_document(path) -> Dict[str, Any]:
    path = Path(path)
    raw = path.read_bytes()
    if path.suffix.lower() == ".json":
        doc = json.loads(raw)
        if isinstance(doc, dict) and isinstance(doc.get("config"), dict):
            doc = doc["config"]
    else:
        try:
            doc = tomllib.loads(raw.decode("utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a key/value document")
    return doc


def parse_config(path, seed: int = None) -> SimConfig:
    """Read and validate a config file; ``seed`` (if given) overrides the file's."""
    doc = load_document(path)
    if seed is not None:
        doc["seed"] = seed
    return config_from_dict(doc)
