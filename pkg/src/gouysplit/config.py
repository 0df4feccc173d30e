"""Scenario configuration files.

A config is plain ``key = value`` text. ``scenario`` sits at the top, every
other key lives in one of the sections ``[pump]``, ``[geometry]``, ``[grid]``,
``[elements]`` or ``[output]``. Lines starting with ``#`` or ``;`` are
comments, as is anything after a whitespace-preceded ``#`` or ``;``. Lengths are in meters, angles in radians. Anything not given takes
the experimental defaults below.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields, replace
from typing import Optional

from .errors import ConfigError

SCENARIOS = ("selfsplit_map", "heralded_2d", "obstacle", "theta_sweep", "joint_counter",
             "glass_plate")

# Obstacle plane for the default geometry: first plane on a 1 cm grid where the
# heralded lobes of the theta_c = 0 pump are more than two strip widths apart
# (see scenarios.find_obstacle_plane).
OBSTACLE_PLANE = 0.48


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    pump_type: str = "selfsplit"
    theta_c: Optional[float] = None
    lambda_p: float = 405e-9
    lambda_s: float = 780e-9
    w0: float = 1e-4
    z_s: float = 0.6
    z_i: float = 0.6
    engine: str = "closed_form"
    scan_points: int = 401
    map_points: int = 101
    z_points: int = 201
    theta_points: int = 73
    crystal_points: int = 512
    strip_width: float = 1.2e-3
    strip_z: float = OBSTACLE_PLANE
    plate_z: float = 5e-3
    plate_width: float = 5e-3
    plate_phase: float = math.pi / 2
    plate_arms: str = "both"
    plate_side: str = "left"
    phase_steps: int = 8
    output_dir: str = "out"
    plot: bool = False

    def with_overrides(self, **kw) -> "ScenarioConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_text(self) -> str:
        """Canonical text form; parsing it returns an equal config."""
        lines = [f"scenario = {self.scenario}"]
        for section, keys in _LAYOUT.items():
            lines.append(f"[{section}]")
            for key, attr in keys.items():
                value = getattr(self, attr)
                if value is None:
                    continue
                lines.append(f"{key} = {_format(value)}")
        return "\n".join(lines) + "\n"


# section -> {file key: attribute}
_LAYOUT = {
    "pump": {"type": "pump_type", "theta_c": "theta_c"},
    "geometry": {"lambda_p": "lambda_p", "lambda_s": "lambda_s", "w0": "w0",
                 "z_s": "z_s", "z_i": "z_i"},
    "grid": {"engine": "engine", "scan_points": "scan_points", "map_points": "map_points",
             "z_points": "z_points", "theta_points": "theta_points",
             "crystal_points": "crystal_points"},
    "elements": {"strip_width": "strip_width", "strip_z": "strip_z", "plate_z": "plate_z",
                 "plate_width": "plate_width", "plate_phase": "plate_phase",
                 "plate_arms": "plate_arms", "plate_side": "plate_side",
                 "phase_steps": "phase_steps"},
    "output": {"dir": "output_dir", "plot": "plot"},
}

_CHOICES = {
    "pump_type": ("hg00", "selfsplit"),
    "engine": ("closed_form", "kernel"),
    "plate_arms": ("both", "signal", "idler"),
    "plate_side": ("left", "right", "centered"),
}
_LENGTHS = {"lambda_p", "lambda_s", "w0", "z_s", "z_i", "strip_width", "strip_z", "plate_z",
            "plate_width"}
_MIN_COUNT = {"scan_points": 16, "map_points": 2, "z_points": 2, "theta_points": 2,
              "crystal_points": 16, "phase_steps": 1}
_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}
_INLINE_COMMENT = re.compile(r"\s[#;].*$")


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _convert(attr, key, raw, line):
    kind = _TYPES[attr]
    if raw.startswith(("'", '"')) and raw.endswith(raw[0]) and len(raw) >= 2:
        raw = raw[1:-1]
    if attr in _CHOICES:
        if raw not in _CHOICES[attr]:
            raise ConfigError(f"{key} must be one of {', '.join(_CHOICES[attr])}; got {raw!r}",
                              line, key)
        return raw
    if kind == "bool":
        lowered = raw.lower()
        if lowered not in ("true", "false", "yes", "no", "1", "0"):
            raise ConfigError(f"{key} must be true or false; got {raw!r}", line, key)
        return lowered in ("true", "yes", "1")
    if kind == "int":
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(f"{key} must be an integer; got {raw!r}", line, key) from None
        if value < _MIN_COUNT.get(attr, 1):
            raise ConfigError(f"{key} must be at least {_MIN_COUNT.get(attr, 1)}", line, key)
        return value
    if kind in ("float", "Optional[float]"):
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"{key} must be a number; got {raw!r}", line, key) from None
        if not math.isfinite(value):
            raise ConfigError(f"{key} must be finite", line, key)
        if attr in _LENGTHS and not value > 0:
            raise ConfigError(f"{key} is a length and must be positive; got {raw}", line, key)
        return value
    if not raw:
        raise ConfigError(f"{key} is empty", line, key)
    return raw


def parse_config(text: str) -> ScenarioConfig:
    """Parse config text strictly.

    Raises
    ------
    ConfigError
        Unknown section or key, repeated key, bad value, or missing
        ``scenario``; the message carries the line number.
    """
    values = {}
    section = None
    seen = set()
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith(("#", ";")):
            continue
        line = _INLINE_COMMENT.sub("", line)
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {line!r}", lineno)
            section = line[1:-1].strip()
            if section not in _LAYOUT:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, raw = (part.strip() for part in line.split("=", 1))
        if section is None:
            if key != "scenario":
                raise ConfigError(f"unknown top-level key {key!r}", lineno, key)
            if raw not in SCENARIOS:
                raise ConfigError(f"unknown scenario {raw!r}; expected one of "
                                  f"{', '.join(SCENARIOS)}", lineno, key)
            attr, value = "scenario", raw
        else:
            if key not in _LAYOUT[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]", lineno, key)
            attr = _LAYOUT[section][key]
            value = _convert(attr, key, raw, lineno)
        if attr in seen:
            raise ConfigError(f"duplicate key {key!r}", lineno, key)
        seen.add(attr)
        values[attr] = value
    if "scenario" not in values:
        raise ConfigError("missing required key 'scenario'")
    cfg = ScenarioConfig(**values)
    if not cfg.lambda_s > cfg.lambda_p:
        raise ConfigError("lambda_s must exceed lambda_p for down-conversion", key="lambda_s")
    return cfg


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
