"""Run configuration: one YAML (or JSON) file per run,
with command-line flags layered on top.

A flag that was not given never overrides the file.
The effective configuration is echoed next to the run's outputs.
"""

from typing import Any, Dict, List, Literal, Optional, Tuple, Union
from pathlib import Path
import logging

import simplejson
import yaml
from deepmerge import Merger
from django.conf import settings
from pydantic import (
    BaseModel,
    Field,
    PositiveInt,
    ValidationError,
    confloat,
    root_validator,
    validator,
)

from acceptance.types import AcceptanceConfig
from common.pydantic import format_validation_errors
from guide_trainer.types import TrainConfig
from llm_gateway.types import ProviderConfig
from policy_core.loaders import read_structured
from reward_engine.types import ShapingConfig

from .exceptions import ConfigError


__all__ = (
    'RoleConfig',
    'CoveragePoint',
    'VerifyConfig',
    'CurateConfig',
    'SuiteConfig',
    'PolicyPoint',
    'FrontierConfig',
    'RunConfig',
    'config_merger',
    'nested_overrides',
    'load_run_config',
    'write_effective_config',
    'EFFECTIVE_CONFIG_NAME',
)


log = logging.getLogger(__name__)


EFFECTIVE_CONFIG_NAME = 'effective-config.yaml'


def _existing_file(path: Optional[Path]) -> Optional[Path]:
    if path is not None and not path.is_file():
        raise ValueError(f"file {path} does not exist")
    return path


class RoleConfig(BaseModel):
    """Who plays a role (teacher, executor, judge):
    a script file for offline runs, or a model endpoint."""

    script: Optional[Path] = None

    provider: Optional[ProviderConfig] = None

    class Config:
        allow_mutation = False

    _script_exists = validator('script', allow_reuse=True)(_existing_file)

    @root_validator(skip_on_failure=True)
    def _exactly_one(cls, values):
        if (values.get('script') is None) == \
                (values.get('provider') is None):
            raise ValueError("give either a script or a provider")
        return values


class CoveragePoint(BaseModel):
    m_samples: PositiveInt
    epsilon: confloat(gt=0)  # type: ignore[valid-type]
    a_s: confloat(ge=0, le=1)  # type: ignore[valid-type]


class VerifyConfig(BaseModel):
    """Sizes of the bound-verification sweeps."""

    instances: PositiveInt = 1000

    max_states: PositiveInt = 6
    max_actions: PositiveInt = 4
    max_horizon: PositiveInt = 4
    max_strategies: PositiveInt = 5

    grid_strategies: PositiveInt = 10_000
    k_values: Tuple[PositiveInt, ...] = (10, 50, 200)
    tau_values: Tuple[confloat(gt=0, lt=1), ...] = (  # type: ignore
        0.5, 0.8)
    eta: confloat(gt=0) = 0.05  # type: ignore[valid-type]

    coverage: List[CoveragePoint] = [
        CoveragePoint(m_samples=100, epsilon=0.05, a_s=0.4),
        CoveragePoint(m_samples=500, epsilon=0.05, a_s=0.4),
    ]
    replications: PositiveInt = 10_000

    bound_scale: confloat(gt=0) = 1.0  # type: ignore[valid-type]
    """Multiplier on the value-gap bound; values below 1 exercise
    the failure path."""

    class Config:
        allow_mutation = False


class CurateConfig(BaseModel):
    problems: Optional[Path] = None
    """Problem file, one record per line."""

    teacher: Optional[RoleConfig] = None
    executor: Optional[RoleConfig] = None

    budget: PositiveInt = settings.DEFAULT_STRATEGY_TOKEN_BUDGET
    """Strategy token budget for teacher replies."""

    class Config:
        allow_mutation = False

    _problems_exist = validator('problems', allow_reuse=True)(_existing_file)


class SuiteConfig(BaseModel):
    """The synthetic benchmark trained on."""

    tasks: PositiveInt = 20
    budget: PositiveInt = 64

    start: Literal['base', 'sft'] = 'sft'
    """Guide that training starts from."""

    class Config:
        allow_mutation = False


class PolicyPoint(BaseModel):
    name: str
    value: float
    cost: confloat(ge=0)  # type: ignore[valid-type]


class FrontierConfig(BaseModel):
    points: List[Path] = []
    """CSV files with ``name``, ``value`` and ``cost`` columns."""

    policies: List[PolicyPoint] = []
    """Inline measurements, added to those read from ``points``."""

    class Config:
        allow_mutation = False

    @validator('points', each_item=True)
    def _points_exist(cls, v):
        return _existing_file(v)


class RunConfig(BaseModel):
    seed: Optional[int] = None
    """Required by every stochastic command."""

    out: Path = Path('out')

    lam: confloat(ge=0) = Field(1e-4, alias='lambda')  # type: ignore
    """Cost sensitivity λ of net utility."""

    acceptance: AcceptanceConfig = AcceptanceConfig()
    shaping: ShapingConfig = ShapingConfig()
    train: TrainConfig = TrainConfig()
    suite: SuiteConfig = SuiteConfig()
    verify: VerifyConfig = VerifyConfig()
    curate: CurateConfig = CurateConfig()
    frontier: FrontierConfig = FrontierConfig()

    judge: Optional[RoleConfig] = None
    """Judge for shaped rewards; the rule-based judge if not given."""

    class Config:
        allow_mutation = False
        allow_population_by_field_name = True
        extra = 'forbid'


config_merger = Merger(
    [
        (dict, ['merge']),
        (list, ['override']),
    ],
    ['override'],
    ['override'],
)
"""A ``deepmerge`` merger layering command-line overrides onto
file values: mappings merge key by key, anything else is replaced."""


def nested_overrides(flags: Dict[Tuple[str, ...], Any]) -> Dict[str, Any]:
    """Turns ``{(section, key): value}`` pairs into a nested mapping,
    leaving out flags that were not given (``None``)."""
    result: Dict[str, Any] = {}
    for path, value in flags.items():
        if value is None:
            continue
        target = result
        for part in path[:-1]:
            target = target.setdefault(part, {})
        target[path[-1]] = value
    return result


def load_run_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> RunConfig:
    """Reads ``path`` (if given), applies ``overrides`` and validates.

    :raises cli.exceptions.ConfigError:
    """
    data: Dict[str, Any] = {}
    if path is not None:
        try:
            data = read_structured(path)
        except (OSError, yaml.YAMLError, ValueError) as err:
            raise ConfigError([f"cannot read {path}: {err}"])
    if overrides:
        data = config_merger.merge(data, overrides)
    try:
        return RunConfig.parse_obj(data)
    except ValidationError as err:
        raise ConfigError(format_validation_errors(err))


def write_effective_config(config: RunConfig, out: Path) -> Path:
    """Echoes ``config`` as YAML into ``out``."""
    out.mkdir(parents=True, exist_ok=True)
    path = out / EFFECTIVE_CONFIG_NAME
    data = simplejson.loads(config.json(by_alias=True))
    with open(path, 'w', encoding='utf-8') as fh:
        yaml.safe_dump(data, fh, sort_keys=True)
    return path
