"""Types for the student–teacher mixture model."""

from typing import Optional, Tuple

import numpy as np
from pydantic import root_validator, validator

from common.pydantic import FrozenModel, readonly_array
from policy_core.types import (
    TabularPolicy,
    check_distribution_rows,
    default_strategy_space,
)


__all__ = (
    'MixtureModel',
    'ExecutabilityProfile',
    'GapReport',
    'GapRow',
)


class MixtureModel(FrozenModel):
    """Core behaviour as a mixture of teacher-level (good) execution
    and strategy-specific bad execution.

    Good execution is teacher-aligned by construction: whenever
    execution is good, the core acts as the teacher ``π_L(· | s)``,
    so no separate good-execution table is kept.
    """

    teacher: TabularPolicy
    """π_L, shape ``(S, A)``."""

    bad_exec: np.ndarray
    """π_bad(a | s, z), shape ``(S, Z, A)``."""

    success_prob: np.ndarray
    """q(s, z) ∈ [0, 1], shape ``(S, Z)``."""

    strategy_space: Tuple[str, ...] = ()

    @validator('bad_exec', pre=True)
    def _bad_exec_table(cls, v):
        return check_distribution_rows(readonly_array(v, 3), 'bad execution')

    @validator('success_prob', pre=True)
    def _success_table(cls, v):
        q = readonly_array(v, 2)
        if not np.all(np.isfinite(q)) or np.any(q < 0) or np.any(q > 1):
            raise ValueError("success probabilities must lie within [0, 1]")
        return q

    @root_validator(skip_on_failure=True)
    def _shapes(cls, values):
        teacher = values['teacher'].probabilities
        bad, q = values['bad_exec'], values['success_prob']
        s, a = teacher.shape
        if q.shape[0] != s or bad.shape[0] != s:
            raise ValueError("teacher, bad execution and success tables "
                             "must cover the same states")
        if bad.shape != (s, q.shape[1], a):
            raise ValueError(
                f"bad execution table has shape {bad.shape}, "
                f"expected {(s, q.shape[1], a)}")
        if not values.get('strategy_space'):
            values['strategy_space'] = default_strategy_space(q.shape[1])
        if len(values['strategy_space']) != q.shape[1]:
            raise ValueError("strategy space size must match success table")
        return values

    @property
    def state_count(self) -> int:
        return self.success_prob.shape[0]

    @property
    def strategy_count(self) -> int:
        return self.success_prob.shape[1]

    @property
    def action_count(self) -> int:
        return self.teacher.probabilities.shape[1]


class ExecutabilityProfile(FrozenModel):
    """Guide-averaged executability α(s) and the aggregated
    bad-execution distribution ρ_s."""

    alpha: np.ndarray
    """Shape ``(S,)``."""

    rho: Tuple[Optional[np.ndarray], ...]
    """One action distribution per state, or ``None`` where α(s) = 1
    (ρ_s is undefined there)."""

    @validator('alpha', pre=True)
    def _alpha_range(cls, v):
        alpha = readonly_array(v, 1)
        if np.any(alpha < 0) or np.any(alpha > 1):
            raise ValueError("alpha must lie within [0, 1]")
        return alpha

    @validator('rho', each_item=True)
    def _rho_rows(cls, v):
        if v is None:
            return v
        return check_distribution_rows(readonly_array(v, 1), 'rho')

    @property
    def mean_alpha(self) -> float:
        return float(self.alpha.mean())


class GapReport(FrozenModel):
    """Outcome of checking the value gap against its executability bound."""

    teacher_value: float
    composed_value: float

    gap: float
    """V^{π_L} − V^{π_gc}."""

    bound: float
    """2·H·R_max·E_{s∼d_L}[1 − α(s)]."""

    holds: bool
    """``gap ≤ bound + 1e-9``."""

    visitation: np.ndarray
    """d_L, the teacher's average state visitation distribution."""

    alpha: np.ndarray

    tv_holds: bool = True
    """Whether TV(π_gc(·|s), π_L(·|s)) ≤ 1 − α(s)
    on every state, up to 1e-12."""

    @validator('visitation', 'alpha', pre=True)
    def _vectors(cls, v):
        return readonly_array(v, 1)

    @property
    def alpha_mean(self) -> float:
        return float(self.alpha.mean())


class GapRow(FrozenModel):
    """One instance of a value-gap sweep, as exported to CSV."""

    instance_seed: int
    gap: float
    bound: float
    alpha_mean: float
    holds: bool
    tv_holds: bool
