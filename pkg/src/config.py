# Copyright 2023 Canonical
# See LICENSE file for licensing details.

"""Run configuration: defaults from config.yaml, an optional key=value file, then flags."""

import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from errors import ConfigError
from numerics import Tolerance

logger = logging.getLogger(__name__)

CONFIG_YAML = Path(__file__).resolve().parent.parent / "config.yaml"

# Keys of the key=value configuration file and the config.yaml options they set.
FILE_KEYS = {
    "ABS_EPS": "abs-eps",
    "REL_EPS": "rel-eps",
    "QUAD_LEVELS": "quad-levels",
    "THETA_TRUNC_EPS": "theta-trunc-eps",
    "FORMAT": "format",
    "GRID": "grid",
    "WORKERS": "workers",
}

_ConfigValue = Optional[Union[bool, int, float, str]]


def _cast_config_to_float(config_value: _ConfigValue) -> float:
    """Casts a config value to a float."""
    if isinstance(config_value, bool):
        raise ConfigError(f"Config value is not a float: {config_value}")
    try:
        return float(config_value)
    except (TypeError, ValueError):
        raise ConfigError(f"Config value is not a float: {config_value}")


def _cast_config_to_int(config_value: _ConfigValue) -> int:
    """Casts a config value to an int."""
    if isinstance(config_value, int) and not isinstance(config_value, bool):
        return config_value
    if isinstance(config_value, str) and config_value.strip().lstrip("-").isdigit():
        return int(config_value)
    raise ConfigError(f"Config value is not an int: {config_value}")


def _cast_config_to_string(config_value: _ConfigValue) -> str:
    """Casts a config value to a str."""
    if isinstance(config_value, str):
        return config_value
    raise ConfigError(f"Config value is not a string: {config_value}")


_CASTS = {
    "float": _cast_config_to_float,
    "int": _cast_config_to_int,
    "string": _cast_config_to_string,
}


class GridSpec(BaseModel):
    """Evenly spaced values start, start + step, ..., up to stop."""

    model_config = ConfigDict(frozen=True)

    start: float
    stop: float
    step: float = Field(gt=0)

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid must be start:stop:step, got {text!r}")
        try:
            return cls(start=float(parts[0]), stop=float(parts[1]), step=float(parts[2]))
        except (ValueError, ValidationError) as e:
            raise ConfigError(f"invalid grid {text!r}: {e}") from e

    def values(self) -> List[float]:
        """Grid values computed in exact decimal arithmetic."""
        start, stop, step = (Fraction(str(v)) for v in (self.start, self.stop, self.step))
        values = []
        current = start
        while current <= stop:
            values.append(float(current))
            current += step
        return values

    def __str__(self) -> str:
        return f"{self.start}:{self.stop}:{self.step}"


class RunConfig(BaseModel):
    """Everything a command needs besides its positional arguments."""

    model_config = ConfigDict(frozen=True)

    abs_eps: float = Field(gt=0)
    rel_eps: float = Field(gt=0)
    quad_levels: int = Field(ge=1, le=16)
    theta_trunc_eps: float = Field(gt=0)
    format: Literal["json", "csv"]
    grid: GridSpec
    workers: int = Field(ge=1)
    unvalidated: bool = False

    @field_validator("grid", mode="before")
    @classmethod
    def _parse_grid(cls, value: Any) -> Any:
        return GridSpec.parse(value) if isinstance(value, str) else value

    @property
    def tolerance(self) -> Tolerance:
        return Tolerance(
            abs_eps=self.abs_eps,
            rel_eps=self.rel_eps,
            quad_levels=self.quad_levels,
            theta_trunc_eps=self.theta_trunc_eps,
        )

    def check_grid(self) -> None:
        """Grids stay inside 0 < x < 1 unless unvalidated evaluation was requested."""
        if self.unvalidated:
            return
        values = self.grid.values()
        if not values or min(values) <= 0 or max(values) >= 1:
            raise ConfigError(f"grid {self.grid} leaves (0, 1); pass --unvalidated to allow it")


def load_defaults(path: Path = CONFIG_YAML) -> Dict[str, _ConfigValue]:
    """Read the option defaults, cast to their declared types, from config.yaml."""
    try:
        with open(path) as stream:
            options = yaml.safe_load(stream)["options"]
    except (OSError, KeyError, TypeError, yaml.YAMLError) as e:
        logger.error(f"Failed to read option defaults from {path}: {e}")
        raise ConfigError(f"cannot read option defaults from {path}: {e}") from e
    return {name: _CASTS[spec["type"]](spec["default"]) for name, spec in options.items()}


def load_config_file(path: str) -> Dict[str, _ConfigValue]:
    """Parse a key=value configuration file into option values."""
    if not Path(path).is_file():
        raise ConfigError(f"config file {path} does not exist")
    # Filter out keys with values set to None (see dotenv_values docs for why).
    values: Dict[str, str] = {
        key: value for key, value in dotenv_values(path).items() if value is not None
    }
    if not values:
        raise ConfigError("The config file is empty or has invalid formatting.")
    unknown = sorted(set(values) - set(FILE_KEYS))
    if unknown:
        raise ConfigError(f"Unknown config keys: {', '.join(unknown)}")
    logger.debug("Loaded %d settings from %s", len(values), path)
    return {FILE_KEYS[key]: value for key, value in values.items()}


def build_config(
    flags: Optional[Dict[str, _ConfigValue]] = None,
    config_path: Optional[str] = None,
    defaults_path: Path = CONFIG_YAML,
) -> RunConfig:
    """Merge config.yaml defaults, the optional config file and flags, in increasing priority.

    Keys of `flags` use the config.yaml option names; None values are ignored.
    """
    merged: Dict[str, _ConfigValue] = load_defaults(defaults_path)
    if config_path:
        merged.update(load_config_file(config_path))
    merged.update({key: value for key, value in (flags or {}).items() if value is not None})
    try:
        return RunConfig(**{key.replace("-", "_"): value for key, value in merged.items()})
    except ValidationError as e:
        logger.error(f"Invalid configuration: {e}")
        raise ConfigError(f"invalid configuration: {e}") from e
