"""Flat key-value scenario files.

A scenario file is a flat YAML mapping whose keys are the ``ScenarioConfig``
field names, with the Earth model fields inlined::

    path_kind: meridian
    lon0_deg: 120.0
    lat0_deg: 50.0
    ...
    equatorial_radius: 6378137.0

Missing keys take the defaults; unknown keys are rejected.
"""
from dataclasses import fields
from pathlib import Path

import yaml

from .geodesy import EarthModel
from .trajgen import ScenarioConfig, scenario_southward, scenario_transpolar


class ConfigError(ValueError):
    pass


_SCENARIO_KEYS = [f.name for f in fields(ScenarioConfig) if f.name != "earth"]
_EARTH_KEYS = [f.name for f in fields(EarthModel)]

BUILTIN_SCENARIOS = {
    "scenario1_southward": scenario_southward,
    "scenario2_transpolar": scenario_transpolar,
}


def config_from_dict(d) -> ScenarioConfig:
    if not isinstance(d, dict):
        raise ConfigError("scenario file must hold a flat key-value mapping")
    unknown = sorted(set(d) - set(_SCENARIO_KEYS) - set(_EARTH_KEYS))
    if unknown:
        raise ConfigError("unknown keys: {}".format(", ".join(map(str, unknown))))
    for key, value in d.items():
        if isinstance(value, (dict, list)):
            raise ConfigError("key {!r} must hold a scalar".format(key))
    kw = {k: d[k] for k in _SCENARIO_KEYS if k in d}
    for k in kw:
        if k != "path_kind":
            kw[k] = _number(k, kw[k])
    earth_kw = {k: _number(k, d[k]) for k in _EARTH_KEYS if k in d}
    try:
        return ScenarioConfig(earth=EarthModel(**earth_kw), **kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _number(key, value):
    if isinstance(value, bool):
        raise ConfigError("key {!r} must be numeric".format(key))
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError("key {!r} must be numeric, got {!r}".format(key, value)) from None


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            d = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError("cannot parse {}: {}".format(path, exc)) from exc
    return config_from_dict(d if d is not None else {})


def dump_config(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(cfg.as_flat_dict(), sort_keys=False)


def save_config(cfg: ScenarioConfig, path):
    Path(path).write_text(dump_config(cfg), encoding="utf-8")
