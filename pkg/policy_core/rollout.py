"""Episode rollouts and Monte-Carlo value estimation."""

from typing import Iterable, List, Tuple
from pathlib import Path
import logging
import math

import numpy as np

from common.records import write_jsonl
from common.rng import make_rng

from .exceptions import DimensionMismatch
from .types import EnvSpec, Step, TabularPolicy, Trajectory


__all__ = (
    'sample_rows',
    'rollout',
    'rollout_returns',
    'estimate_value',
    'write_trajectories',
)


log = logging.getLogger(__name__)


NORMAL_95 = 1.959963984540054
"""Two-sided 95% standard normal quantile."""


def sample_rows(rng: np.random.Generator, rows: np.ndarray) -> np.ndarray:
    """Samples one index per row of a ``(N, K)`` probability matrix
    by inverse CDF, using exactly one uniform draw per row."""
    cdf = np.cumsum(rows, axis=1)
    u = rng.random(rows.shape[0])
    idx = (u[:, None] >= cdf).sum(axis=1)
    # Row sums may fall short of 1 by rounding.
    return np.minimum(idx, rows.shape[1] - 1)


def _check_dimensions(policy: TabularPolicy, env: EnvSpec) -> None:
    if policy.probabilities.shape != (env.state_count, env.action_count):
        raise DimensionMismatch(
            "Policy table has shape %s, environment expects %s" % (
                policy.probabilities.shape,
                (env.state_count, env.action_count)))


def rollout(policy: TabularPolicy, env: EnvSpec, seed: int) -> Trajectory:
    """Runs one episode of exactly ``env.horizon`` steps.

    Deterministic given ``seed``.

    :raises policy_core.exceptions.DimensionMismatch:
    """
    _check_dimensions(policy, env)
    rng = make_rng(seed)

    steps: List[Step] = []
    state = int(sample_rows(rng, env.initial_dist[None, :])[0])
    for _ in range(env.horizon):
        action = int(sample_rows(rng, policy.probabilities[[state]])[0])
        reward = float(env.reward_table[state, action])
        steps.append(Step(state=state, action=action, reward=reward))
        state = int(sample_rows(rng, env.transition[state, [action]])[0])

    return Trajectory(seed=seed, steps=tuple(steps))


def rollout_returns(
    policy: TabularPolicy,
    env: EnvSpec,
    episodes: int,
    seed: int,
) -> np.ndarray:
    """Simulates ``episodes`` independent episodes in lockstep
    and returns their returns.

    :raises policy_core.exceptions.DimensionMismatch:
    """
    _check_dimensions(policy, env)
    rng = make_rng(seed)

    states = sample_rows(rng, np.broadcast_to(
        env.initial_dist, (episodes, env.state_count)))
    returns = np.zeros(episodes)
    for _ in range(env.horizon):
        actions = sample_rows(rng, policy.probabilities[states])
        returns += env.reward_table[states, actions]
        states = sample_rows(rng, env.transition[states, actions])
    return returns


def estimate_value(
    policy: TabularPolicy,
    env: EnvSpec,
    episodes: int,
    seed: int,
) -> Tuple[float, float]:
    """Monte-Carlo estimate of the H-step value.

    :returns: ``(mean, half_width)`` where ``half_width`` is
        the 95% normal-approximation half-interval
        (zero for a single episode or zero variance)
    :raises ValueError: ``episodes`` is less than 1
    """
    if episodes < 1:
        raise ValueError("At least one episode is required")

    returns = rollout_returns(policy, env, episodes, seed)
    mean = float(returns.mean())
    if episodes == 1:
        return mean, 0.0
    std = float(returns.std(ddof=1))
    half_width = NORMAL_95 * std / math.sqrt(episodes)

    log.debug(
        "Estimated value %.6f ± %.6f over %s episodes",
        mean, half_width, episodes)

    # Clamp float drift at the reward range.
    upper = env.horizon * env.r_max
    return min(max(mean, 0.0), upper), half_width


def write_trajectories(path: Path, trajectories: Iterable[Trajectory]) -> int:
    """Exports trajectories as line-delimited records."""
    return write_jsonl(path, (t.to_record() for t in trajectories))
