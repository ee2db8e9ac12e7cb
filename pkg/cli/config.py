"""
Run Configuration
Every tunable of a CLI run in one frozen record: dataclass defaults, then an
optional JSON file, then command-line flags
"""
import json
import logging
import math
from dataclasses import dataclass, fields

from analysis.metrics import LambdaConfig
from analysis.inversion import QuadratureSpec
from core.errors import ConfigError, InputError
from core.limits import DEFAULT_SCHEDULE, validate_schedule

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "iddlab-report/1"


@dataclass(frozen=True)
class RunConfig:
    t_max: float = 50.0
    grid_size: int = 2048
    t_schedule: tuple = DEFAULT_SCHEDULE
    s_schedule: tuple = DEFAULT_SCHEDULE
    s_max: float = 1e3
    s_grid_size: int = 1024
    tol: float = 1e-4
    tie_tol: float = 1e-4
    lambda_t_min: float = 1e-3
    lambda_t_max: float = 50.0
    lambda_grid_size: int = 4096
    small_t_policy: str = "taylor-bound"
    quad_nodes: int = 4096
    eps_tail: float = 1e-12
    output: str = None
    schema: str = SCHEMA_VERSION

    def __post_init__(self):
        for name in ("t_max", "s_max", "tol", "tie_tol", "lambda_t_min", "lambda_t_max", "eps_tail"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) \
                    or not math.isfinite(value) or value <= 0:
                raise ConfigError(f"{name} must be a finite number > 0, got {value!r}")
            object.__setattr__(self, name, float(value))
        for name in ("grid_size", "s_grid_size", "lambda_grid_size", "quad_nodes"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 3:
                raise ConfigError(f"{name} must be an integer >= 3, got {value!r}")
        for name in ("t_schedule", "s_schedule"):
            try:
                schedule = validate_schedule(getattr(self, name), name)
            except InputError as e:
                raise ConfigError(str(e)) from e
            object.__setattr__(self, name, tuple(schedule.tolist()))
        if self.schema != SCHEMA_VERSION:
            raise ConfigError(f"unsupported report schema {self.schema!r}")
        # validated by the module configs they feed
        self.lambda_config()
        self.quadrature()

    def lambda_config(self, r=3.0):
        return LambdaConfig(
            r=r,
            t_min=self.lambda_t_min,
            t_max=self.lambda_t_max,
            grid_size=self.lambda_grid_size,
            small_t_policy=self.small_t_policy,
        )

    def quadrature(self, truncation=None):
        return QuadratureSpec(truncation=truncation, nodes=self.quad_nodes, eps_tail=self.eps_tail)

    def to_dict(self):
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out


def _config_keys():
    return {f.name for f in fields(RunConfig)}


def _coerce(overrides):
    coerced = {}
    for key, value in overrides.items():
        if key in ("t_schedule", "s_schedule") and isinstance(value, list):
            value = tuple(value)
        coerced[key] = value
    return coerced


def load_config(path=None, overrides=None):
    """Defaults, then the JSON file at path, then non-None overrides"""
    values = {}
    if path is not None:
        try:
            with open(path, "r") as handle:
                data = json.load(handle)
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        unknown = set(data) - _config_keys()
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)} in {path}")
        values.update(data)
        logger.debug("loaded %d config values from %s", len(data), path)
    for key, value in (overrides or {}).items():
        if key not in _config_keys():
            raise ConfigError(f"unknown config key {key!r}")
        if value is not None:
            values[key] = value
    try:
        return RunConfig(**_coerce(values))
    except TypeError as e:
        raise ConfigError(str(e)) from e
