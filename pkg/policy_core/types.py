"""Policies, environments, trajectories and cost/utility accounting.

All models are immutable after construction; tabular distributions
store probabilities (not logits) and are checked at construction time.
"""

from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple
from decimal import Decimal, Inexact, localcontext
import threading

import numpy as np
from pydantic import (
    BaseModel,
    Field,
    NonNegativeInt,
    PositiveInt,
    confloat,
    root_validator,
    validator,
)

from common.pydantic import FrozenModel, readonly_array


__all__ = (
    'ROW_TOLERANCE',
    'check_distribution_rows',
    'default_strategy_space',
    'EnvSpec',
    'TabularPolicy',
    'GuidePolicy',
    'CorePolicy',
    'ComposedPolicy',
    'Step',
    'Trajectory',
    'LedgerEntry',
    'CostLedger',
    'UtilityReport',
)


ROW_TOLERANCE = 1e-12
"""Maximum deviation of a distribution row sum from 1."""


def check_distribution_rows(arr: np.ndarray, name: str) -> np.ndarray:
    """Verifies that every row along the last axis is a distribution.

    :raises ValueError: negative or non-finite entries,
        or a row that does not sum to 1 within :data:`ROW_TOLERANCE`
    """
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite probabilities")
    if np.any(arr < 0):
        raise ValueError(f"{name} contains negative probabilities")
    deviation = np.abs(arr.sum(axis=-1) - 1.0)
    if np.any(deviation > ROW_TOLERANCE):
        worst = np.unravel_index(np.argmax(deviation), deviation.shape)
        raise ValueError(
            f"{name} row {tuple(int(i) for i in worst)} sums to "
            f"{1.0 + float(deviation[worst]):.15g}, not 1")
    return arr


def default_strategy_space(size: int) -> Tuple[str, ...]:
    """Strategy identifiers used when none are given: ``z0``, ``z1``, …"""
    return tuple(f'z{idx}' for idx in range(size))


# Environment
# ===========

class EnvSpec(FrozenModel):
    """A finite-horizon controlled process."""

    state_count: PositiveInt
    action_count: PositiveInt

    horizon: PositiveInt
    """Number of steps per episode, H."""

    reward_table: np.ndarray
    """Shape ``(S, A)``; rewards in ``[0, r_max]``."""

    r_max: confloat(gt=0)  # type: ignore[valid-type]

    transition: np.ndarray
    """Shape ``(S, A, S)``; each ``transition[s, a]`` is a distribution."""

    initial_dist: np.ndarray
    """Shape ``(S,)``; the initial state distribution μ."""

    state_labels: Tuple[str, ...] = ()
    action_labels: Tuple[str, ...] = ()

    @validator('reward_table', pre=True)
    def _rewards_2d(cls, v):
        return readonly_array(v, 2)

    @validator('transition', pre=True)
    def _transition_3d(cls, v):
        return readonly_array(v, 3)

    @validator('initial_dist', pre=True)
    def _initial_1d(cls, v):
        return readonly_array(v, 1)

    @root_validator(skip_on_failure=True)
    def _check_shapes_and_rows(cls, values):
        s, a = values['state_count'], values['action_count']
        rewards = values['reward_table']
        transition = values['transition']
        initial = values['initial_dist']
        if rewards.shape != (s, a):
            raise ValueError(
                f"reward table has shape {rewards.shape}, expected {(s, a)}")
        if transition.shape != (s, a, s):
            raise ValueError(
                f"transition has shape {transition.shape}, "
                f"expected {(s, a, s)}")
        if initial.shape != (s, ):
            raise ValueError(
                f"initial distribution has shape {initial.shape}, "
                f"expected {(s, )}")
        r_max = values['r_max']
        if not np.all(np.isfinite(rewards)) \
                or np.any(rewards < 0) or np.any(rewards > r_max):
            raise ValueError(f"rewards must lie within [0, {r_max}]")
        check_distribution_rows(transition, 'transition')
        check_distribution_rows(initial, 'initial distribution')
        for field, size in (('state_labels', s), ('action_labels', a)):
            if values.get(field) and len(values[field]) != size:
                raise ValueError(f"{field} must have {size} entries")
        return values


# Policies
# ========

class TabularPolicy(FrozenModel):
    """A state-conditional action distribution, shape ``(S, A)``."""

    probabilities: np.ndarray

    @validator('probabilities', pre=True)
    def _probabilities_2d(cls, v):
        return check_distribution_rows(readonly_array(v, 2), 'policy')

    @property
    def state_count(self) -> int:
        return self.probabilities.shape[0]

    @property
    def action_count(self) -> int:
        return self.probabilities.shape[1]


class GuidePolicy(FrozenModel):
    """Guide π_g(z | s): produces a strategy given a state.

    A tabular guide holds a ``(S, Z)`` probability table over a finite
    strategy space; an external guide wraps an endpoint producing
    free-text strategies.
    """

    kind: Literal['tabular', 'external']

    strategy_space: Tuple[str, ...] = ()
    """Strategy identifiers (or texts) indexing the table's columns.
    Empty for external guides."""

    probabilities: Optional[np.ndarray] = None

    endpoint: Optional[Any] = None
    """For external guides: an object offering ``propose(problem)``."""

    @validator('probabilities', pre=True)
    def _guide_table(cls, v):
        if v is None:
            return v
        return check_distribution_rows(readonly_array(v, 2), 'guide')

    @root_validator(skip_on_failure=True)
    def _kind_consistency(cls, values):
        probs = values.get('probabilities')
        if values['kind'] == 'tabular':
            if probs is None:
                raise ValueError("tabular guide requires probabilities")
            if not values.get('strategy_space'):
                values['strategy_space'] = \
                    default_strategy_space(probs.shape[1])
            if len(values['strategy_space']) != probs.shape[1]:
                raise ValueError(
                    "guide table has %s columns for %s strategies" % (
                        probs.shape[1], len(values['strategy_space'])))
        elif values.get('endpoint') is None:
            raise ValueError("external guide requires an endpoint")
        return values

    @classmethod
    def tabular(
        cls,
        probabilities: Any,
        strategy_space: Optional[Sequence[str]] = None,
    ) -> 'GuidePolicy':
        return cls(
            kind='tabular',
            probabilities=probabilities,
            strategy_space=tuple(strategy_space or ()),
        )

    @classmethod
    def external(cls, endpoint: Any) -> 'GuidePolicy':
        return cls(kind='external', endpoint=endpoint)

    @property
    def is_tabular(self) -> bool:
        return self.kind == 'tabular'

    @property
    def state_count(self) -> int:
        assert self.probabilities is not None
        return self.probabilities.shape[0]


class CorePolicy(FrozenModel):
    """Core π_c(a | s, z): executes a strategy.

    A tabular core holds an ``(S, Z, A)`` table; an external core wraps
    a black-box endpoint.
    """

    kind: Literal['tabular', 'external']

    strategy_space: Tuple[str, ...] = ()

    probabilities: Optional[np.ndarray] = None

    endpoint: Optional[Any] = None
    """For external cores: an object offering
    ``run(problem, strategy, seed)``."""

    @validator('probabilities', pre=True)
    def _core_table(cls, v):
        if v is None:
            return v
        return check_distribution_rows(readonly_array(v, 3), 'core')

    @root_validator(skip_on_failure=True)
    def _kind_consistency(cls, values):
        probs = values.get('probabilities')
        if values['kind'] == 'tabular':
            if probs is None:
                raise ValueError("tabular core requires probabilities")
            if not values.get('strategy_space'):
                values['strategy_space'] = \
                    default_strategy_space(probs.shape[1])
            if len(values['strategy_space']) != probs.shape[1]:
                raise ValueError(
                    "core table has %s strategy slots for %s strategies" % (
                        probs.shape[1], len(values['strategy_space'])))
        elif values.get('endpoint') is None:
            raise ValueError("external core requires an endpoint")
        return values

    @classmethod
    def tabular(
        cls,
        probabilities: Any,
        strategy_space: Optional[Sequence[str]] = None,
    ) -> 'CorePolicy':
        return cls(
            kind='tabular',
            probabilities=probabilities,
            strategy_space=tuple(strategy_space or ()),
        )

    @classmethod
    def external(cls, endpoint: Any) -> 'CorePolicy':
        return cls(kind='external', endpoint=endpoint)

    @property
    def is_tabular(self) -> bool:
        return self.kind == 'tabular'


class ComposedPolicy(TabularPolicy):
    """The action policy induced by composing a guide with a core,
    π_gc(a | s) = Σ_z π_g(z | s) · π_c(a | s, z).

    Produced by :func:`policy_core.composition.compose`.
    """

    strategy_space: Tuple[str, ...]
    guide: GuidePolicy
    core: CorePolicy


# Trajectories
# ============

class Step(BaseModel):
    state: int
    action: int
    reward: float

    class Config:
        allow_mutation = False


class Trajectory(BaseModel):
    """Exactly H steps of one episode."""

    seed: int
    steps: Tuple[Step, ...]

    class Config:
        allow_mutation = False

    @property
    def total_return(self) -> float:
        return float(sum(step.reward for step in self.steps))

    def to_record(self) -> Dict[str, Any]:
        return {
            'seed': self.seed,
            'return': self.total_return,
            'steps': [
                {'t': t, 'state': step.state,
                 'action': step.action, 'reward': step.reward}
                for t, step in enumerate(self.steps)
            ],
        }


# Cost accounting
# ===============

class LedgerEntry(BaseModel):
    """One charge in a :class:`.CostLedger`."""

    label: str

    unit_count: NonNegativeInt

    unit_price: Optional[Decimal]
    """Price per unit. ``None`` for token charges billed at separate
    input and output rates, see ``input_tokens`` / ``output_tokens``."""

    charge: Decimal = Field(ge=0)

    input_tokens: NonNegativeInt = 0
    output_tokens: NonNegativeInt = 0

    class Config:
        allow_mutation = False

    def to_record(self) -> Dict[str, Any]:
        return self.dict()


def exact_sum(values: Sequence[Decimal]) -> Decimal:
    """Sums decimals, raising :class:`decimal.Inexact` rather than
    rounding, so the result does not depend on summation order."""
    with localcontext() as ctx:
        ctx.prec = 80
        ctx.traps[Inexact] = True
        return sum(values, Decimal(0))


class CostLedger:
    """Append-only list of charges with an exact decimal total.

    Appends are linearizable (mutex-guarded);
    the ledger may be shared across threads.
    """

    def __init__(self, entries: Sequence[LedgerEntry] = ()):
        self._lock = threading.Lock()
        self._entries: List[LedgerEntry] = list(entries)

    def append(self, entry: LedgerEntry) -> LedgerEntry:
        with self._lock:
            self._entries.append(entry)
        return entry

    def charge(
        self,
        label: str,
        unit_count: int,
        unit_price: Decimal,
    ) -> LedgerEntry:
        """Appends a plain ``unit_count × unit_price`` charge."""
        with localcontext() as ctx:
            ctx.prec = 80
            ctx.traps[Inexact] = True
            amount = Decimal(unit_count) * Decimal(unit_price)
        return self.append(LedgerEntry(
            label=label,
            unit_count=unit_count,
            unit_price=unit_price,
            charge=amount,
        ))

    @property
    def entries(self) -> Tuple[LedgerEntry, ...]:
        with self._lock:
            return tuple(self._entries)

    @property
    def total(self) -> Decimal:
        return exact_sum([entry.charge for entry in self.entries])

    def __len__(self) -> int:
        return len(self.entries)


class UtilityReport(FrozenModel):
    """Net utility J = V − λ·T of a policy."""

    value: float
    cost: float
    lam: float = Field(alias='lambda', ge=0)
    net_utility: float

    class Config:
        allow_population_by_field_name = True

    @root_validator(skip_on_failure=True)
    def _affine(cls, values):
        expected = values['value'] - values['lam'] * values['cost']
        if values['net_utility'] != expected:
            raise ValueError("net_utility must equal value - lambda * cost")
        return values
