"""Exact finite-horizon dynamic programming on tabular instances."""

from typing import Any

import numpy as np

from policy_core.exceptions import DimensionMismatch, NotTabular
from policy_core.types import EnvSpec, TabularPolicy

from .exceptions import SupportMismatch


__all__ = (
    'exact_value_dp',
    'state_values',
    'visitation',
    'tv_distance',
)


def _policy_table(policy: Any, env: EnvSpec) -> np.ndarray:
    if not isinstance(policy, TabularPolicy):
        raise NotTabular(
            "Exact evaluation requires a tabular action policy, got %s"
            % type(policy).__name__)
    table = policy.probabilities
    if table.shape != (env.state_count, env.action_count):
        raise DimensionMismatch(
            "Policy table has shape %s, environment expects %s" % (
                table.shape, (env.state_count, env.action_count)))
    return table


def state_values(policy: TabularPolicy, env: EnvSpec) -> np.ndarray:
    """Per-state H-step values from t = 0, by backward induction.

    :raises policy_core.exceptions.NotTabular:
    :raises policy_core.exceptions.DimensionMismatch:
    """
    table = _policy_table(policy, env)
    values = np.zeros(env.state_count)
    for _ in range(env.horizon):
        q_values = env.reward_table + env.transition @ values
        values = (table * q_values).sum(axis=1)
    return values


def exact_value_dp(policy: TabularPolicy, env: EnvSpec) -> float:
    """Exact V_H = Σ_s μ(s)·V_0(s)."""
    return float(env.initial_dist @ state_values(policy, env))


def visitation(policy: TabularPolicy, env: EnvSpec) -> np.ndarray:
    """Average state visitation distribution
    d = (1/H)·Σ_{t<H} d_t with d_0 = μ.

    :raises policy_core.exceptions.NotTabular:
    """
    table = _policy_table(policy, env)
    state_transition = np.einsum('sa,sap->sp', table, env.transition)

    current = np.array(env.initial_dist)
    total = np.zeros(env.state_count)
    for _ in range(env.horizon):
        total += current
        current = current @ state_transition
    return total / env.horizon


def tv_distance(p: Any, q: Any) -> float:
    """Total variation distance ½·Σ|p − q|, capped at 1.

    :raises mixture_sim.exceptions.SupportMismatch:
    """
    p_arr = np.asarray(p, dtype=float)
    q_arr = np.asarray(q, dtype=float)
    if p_arr.shape != q_arr.shape:
        raise SupportMismatch(
            "Cannot compare distributions over %s and %s outcomes" % (
                p_arr.size, q_arr.size),
            p_arr.size, q_arr.size)
    return min(1.0, 0.5 * float(np.abs(p_arr - q_arr).sum()))
