"""TOML scenario files.

Four top-level tables, each optional::

    [plant]      m, k_z, mu0, n, A, s0, i0, R, g
    [gains]      c, k, gamma, k_i, p, Q_z, Q_i, enforce_conditions
    [scenario]   kind, A_r, f_r, duration, seed, noise_variance,
                 noise_interpretation, q_i
    [scenario.pulse]          t_on, t_off, amplitude
    [scenario.initial_state]  z, z_dot, i, i_ref
    [sim]        dt, integrator, sgn_mode, position_sgn_mode,
                 inversion_sgn_mode, current_sgn_mode, epsilon_grad,
                 on_singularity, u_max, convergence_tol

Values are SI.  Unknown keys are errors.
"""
from __future__ import annotations

import sys
from dataclasses import fields
from typing import Any

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .control import GainConditionError, Gains
from .plant import PlantParams, PlantState, hover_current
from .sim import Pulse, ScenarioConfig


class ConfigError(ValueError):
    pass


PLANT_KEYS = tuple(f.name for f in fields(PlantParams) if f.init)
GAIN_KEYS = tuple(f.name for f in fields(Gains)) + ("enforce_conditions",)
SCENARIO_KEYS = ("kind", "A_r", "f_r", "duration", "seed", "noise_variance",
                 "noise_interpretation", "q_i")
PULSE_KEYS = ("t_on", "t_off", "amplitude")
INITIAL_KEYS = ("z", "z_dot", "i", "i_ref")
SIM_KEYS = ("dt", "integrator", "sgn_mode", "position_sgn_mode", "inversion_sgn_mode",
            "current_sgn_mode", "epsilon_grad", "on_singularity", "u_max", "convergence_tol")

SCHEMA: dict[str, Any] = {
    "plant": PLANT_KEYS,
    "gains": GAIN_KEYS,
    "scenario": {"": SCENARIO_KEYS, "pulse": PULSE_KEYS, "initial_state": INITIAL_KEYS},
    "sim": SIM_KEYS,
}


def _all_paths():
    for section, keys in SCHEMA.items():
        if isinstance(keys, dict):
            for sub, subkeys in keys.items():
                for key in subkeys:
                    yield (section, sub, key) if sub else (section, key)
        else:
            for key in keys:
                yield (section, key)


KEY_PATHS = {".".join(path): path for path in _all_paths()}
_SHORT = {}
for _dotted, _path in KEY_PATHS.items():
    _SHORT.setdefault(_path[-1], []).append(_path)


def resolve_key(key: str) -> tuple[str, ...]:
    """Map ``"gains.k"`` or the bare ``"k"`` to its path in the schema."""
    if key in KEY_PATHS:
        return KEY_PATHS[key]
    matches = _SHORT.get(key, [])
    if len(matches) == 1:
        return matches[0]
    if matches:
        raise ConfigError(f"ambiguous key {key!r}; use one of "
                          + ", ".join(".".join(p) for p in matches))
    raise ConfigError(f"unknown key {key!r}")


def _check_table(table: dict, allowed, where: str = ""):
    if not isinstance(table, dict):
        raise ConfigError(f"{where} must be a table")
    subtables = allowed if isinstance(allowed, dict) else {"": allowed}
    for key, value in table.items():
        path = f"{where}.{key}" if where else key
        if key in subtables.get("", ()):
            continue
        if key in subtables and key != "":
            _check_table(value, subtables[key], path)
            continue
        raise ConfigError(f"unknown key {path}")


def config_from_mapping(data: dict) -> ScenarioConfig:
    """Build a validated config from parsed TOML-shaped data."""
    _check_table(data, {"": (), **SCHEMA})
    data = {k: dict(v) for k, v in data.items()}
    scenario = data.get("scenario", {})
    pulse = dict(scenario.pop("pulse", {}))
    initial = dict(scenario.pop("initial_state", {}))
    gains = data.get("gains", {})
    enforce = gains.pop("enforce_conditions", True)
    try:
        plant = PlantParams(**data.get("plant", {}))
        gain_obj = Gains(**gains)
        if enforce:
            gain_obj.check_conditions()
        initial_state = None
        i_ref0 = initial.pop("i_ref", None)
        if initial:
            initial_state = PlantState(initial.get("z", 0.0), initial.get("z_dot", 0.0),
                                       initial.get("i", hover_current(plant)))
        return ScenarioConfig(
            **scenario,
            pulse=Pulse(**pulse),
            initial_state=initial_state,
            i_ref0=i_ref0,
            gains=gain_obj,
            plant=plant,
            **data.get("sim", {}),
        )
    except GainConditionError as exc:
        raise ConfigError(str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def parse_config(text: str) -> ScenarioConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from exc
    return config_from_mapping(data)


def parse_value(text: str):
    """Interpret an override value as a TOML literal, falling back to a bare string."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def apply_overrides(data: dict, overrides) -> dict:
    """Return a copy of ``data`` with ``key=value`` assignments applied."""
    out = _deepcopy(data)
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not key=value")
        set_path(out, resolve_key(key.strip()), parse_value(value.strip()))
    return out


def set_path(data: dict, path, value):
    node = data
    for part in path[:-1]:
        node = node.setdefault(part, {})
    node[path[-1]] = value


def _deepcopy(data):
    return {k: _deepcopy(v) if isinstance(v, dict) else v for k, v in data.items()}


def load_mapping(text: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from exc


def config_to_mapping(cfg: ScenarioConfig) -> dict:
    """Fully materialised TOML-shaped mapping; ``None`` values are omitted."""
    cfg = cfg.resolved()
    gains = {f.name: getattr(cfg.gains, f.name) for f in fields(Gains)}
    try:
        cfg.gains.check_conditions()
    except GainConditionError:
        gains["enforce_conditions"] = False
    state = cfg.initial_state
    mapping = {
        "plant": {k: getattr(cfg.plant, k) for k in PLANT_KEYS},
        "gains": gains,
        "scenario": {
            **{k: getattr(cfg, k) for k in SCENARIO_KEYS},
            "pulse": {"t_on": cfg.pulse.t_on, "t_off": cfg.pulse.t_off,
                      "amplitude": cfg.pulse.amplitude},
            "initial_state": {"z": state.z, "z_dot": state.z_dot, "i": state.i,
                              "i_ref": cfg.i_ref0},
        },
        "sim": {k: getattr(cfg, k) for k in SIM_KEYS if getattr(cfg, k) is not None},
    }
    return mapping


def dump_config(cfg: ScenarioConfig) -> str:
    return tomli_w.dumps(config_to_mapping(cfg))
