"""Run configuration: INI-style files merged with command-line flags.

Schema (every key optional; rates and frequencies in units of Gamma)::

    [system]    N, J0, phi, Gamma, Gamma_f, theta, omega0, epsilon
    [run]       out, workers, seed
    [scatter]   delta, delta_min, delta_max, delta_count, direction, solver, allow_singular
    [dynamics]  sigma_t, t_center, delta_c, direction, plateau, t_max, dt_out,
                x_min, x_max, nx
    [sweep]     axes, observables, direction, delta
    [figures]   names

Angles (``phi``, ``theta``) accept radians or literals such as ``0.241pi``.
``axes`` is a ``;``-separated list of ``name:min:max:count[:spacing]``.
A JSON run manifest can be used in place of an INI file.
"""

from __future__ import annotations

import configparser
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .model import SystemParams, parse_angle, parse_pi_multiple

OUT_ENV = "QUASIBIC_OUT"


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def _bool(v) -> bool:
    if isinstance(v, bool):
        return v
    text = str(v).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


SCHEMA: dict[str, dict[str, type | callable]] = {
    "system": {"N": int, "J0": float, "phi": parse_angle, "Gamma": float, "Gamma_f": float,
               "theta": str, "omega0": float, "epsilon": float},
    "run": {"out": str, "workers": int, "seed": int},
    "scatter": {"delta": float, "delta_min": float, "delta_max": float, "delta_count": int,
                "direction": str, "solver": str, "allow_singular": _bool},
    "dynamics": {"sigma_t": float, "t_center": float, "delta_c": float, "direction": str,
                 "plateau": float, "t_max": float, "dt_out": float, "x_min": float,
                 "x_max": float, "nx": int},
    "sweep": {"axes": str, "observables": str, "direction": str, "delta": float},
    "figures": {"names": str},
}


@dataclass
class RunConfig:
    system: dict = field(default_factory=dict)
    run: dict = field(default_factory=dict)
    scatter: dict = field(default_factory=dict)
    dynamics: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    figures: dict = field(default_factory=dict)

    def section(self, name: str) -> dict:
        return getattr(self, name)

    def system_params(self) -> SystemParams:
        return _make_params(self.system)

    @property
    def out(self) -> Path:
        return Path(self.run.get("out") or os.environ.get(OUT_ENV) or "quasibic_out")

    @property
    def workers(self) -> int:
        return int(self.run.get("workers", 1))

    def to_dict(self) -> dict:
        """JSON-safe form that :func:`load_file` reads back unchanged."""
        out = {}
        for name in SCHEMA:
            sec = {}
            for k, v in self.section(name).items():
                if name == "system" and k == "theta":
                    v = f"{v}pi" if isinstance(v, Fraction) else repr(float(v) * math.pi)
                elif name == "system" and k == "phi":
                    v = repr(float(v))
                sec[k] = v
            out[name] = sec
        return out


def _make_params(system: dict) -> SystemParams:
    kw = dict(system)
    if "theta" in kw:
        kw["theta_pi"] = kw.pop("theta")
    return SystemParams(**kw)


def _theta(raw) -> Fraction | float:
    """Config ``theta`` to units of pi: ``pi`` literals stay exact, bare
    numbers are radians."""
    text = str(raw).strip()
    if text.lower().endswith("pi"):
        return parse_pi_multiple(text)
    return float(text) / math.pi


def _coerce(section: str, key: str, raw, problems: list[str]):
    try:
        if section == "system" and key == "theta":
            return _theta(raw)
        if section == "system" and key == "N":
            value = float(raw)
            if value != int(value):
                raise ValueError(f"not an integer: {raw!r}")
            return int(value)
        return SCHEMA[section][key](raw)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        problems.append(f"[{section}] {key}: {exc}")
        return None


def load_file(path: str | Path, problems: list[str]) -> dict[str, dict]:
    path = Path(path)
    if not path.exists():
        problems.append(f"config file not found: {path}")
        return {}
    if path.suffix == ".json":
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            problems.append(f"cannot parse {path}: {exc}")
            return {}
        data = data.get("config", data)
        return {sec: {k: str(v) for k, v in vals.items()} for sec, vals in data.items()}
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keys are case sensitive (N, J0, Gamma_f)
    try:
        parser.read(path)
    except configparser.Error as exc:
        problems.append(f"cannot parse {path}: {exc}")
        return {}
    return {sec: dict(parser[sec]) for sec in parser.sections()}


def build_config(file_values: dict[str, dict], flag_values: dict[str, dict]) -> RunConfig:
    """Merge file and flag values (flags win), validating every key.

    All values arrive as strings.  Raises :class:`ConfigError` listing every
    problem found, not just the first.
    """
    problems: list[str] = []
    merged: dict[str, dict] = {name: {} for name in SCHEMA}
    for source in (file_values, flag_values):
        for section, values in source.items():
            if section not in SCHEMA:
                problems.append(f"unknown section [{section}]")
                continue
            for key, raw in values.items():
                if raw is None:
                    continue
                if key not in SCHEMA[section]:
                    problems.append(f"[{section}] unknown key {key!r}")
                    continue
                value = _coerce(section, key, raw, problems)
                if value is not None:
                    merged[section][key] = value
    cfg = RunConfig(**merged)
    try:
        _make_params(cfg.system)
    except ValueError as exc:
        problems.extend(str(exc).removeprefix("invalid SystemParams: ").split("; "))
    if problems:
        raise ConfigError(problems)
    return cfg
