"""Estimating how much a strategy helps (or hurts) the core:
mean guided reward minus mean unguided reward."""

from typing import Optional
import logging
import uuid

from django.core.cache import caches

from acceptance.exceptions import TrialError
from acceptance.types import Executor, Problem
from common.rng import derive_seed
from llm_gateway.exceptions import GatewayError

from .exceptions import DeltaRAborted


__all__ = (
    'mean_reward',
    'delta_r',
    'DeltaREstimator',
)


log = logging.getLogger(__name__)


def _draws(executor: Executor, samples: int) -> int:
    return 1 if getattr(executor, 'deterministic', False) else samples


def mean_reward(
    executor: Executor,
    problem: Problem,
    strategy: Optional[str],
    samples: int,
    seed: int,
) -> float:
    """Mean task reward over ``samples`` executions
    (one for deterministic executors).

    :raises reward_engine.exceptions.DeltaRAborted:
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    arm = 'guided' if strategy else 'unguided'
    draws = _draws(executor, samples)
    total = 0.0
    for idx in range(draws):
        try:
            outcome = executor.run(
                problem,
                strategy,
                derive_seed(seed, problem.id, arm, strategy or '', idx))
        except (TrialError, GatewayError) as err:
            raise DeltaRAborted(problem.id, err) from err
        total += outcome.reward
    return total / draws


def delta_r(
    executor: Executor,
    problem: Problem,
    strategy: str,
    samples: int,
    seed: int,
) -> float:
    """Guided minus unguided mean reward, with independent draws
    for the two arms.

    :raises reward_engine.exceptions.DeltaRAborted:
    """
    return (
        mean_reward(executor, problem, strategy, samples, seed)
        - mean_reward(executor, problem, None, samples, seed))


class DeltaREstimator:
    """:func:`.delta_r` with the unguided baseline cached per problem
    for the duration of a run (keyed by ``run_id``).

    The cache is Django's default cache; concurrent writers of the same
    key store the same value.
    """

    def __init__(
        self,
        executor: Executor,
        samples: int,
        seed: int,
        run_id: Optional[str] = None,
    ):
        self.executor = executor
        self.samples = samples
        self.seed = seed
        self.run_id = run_id or uuid.uuid4().hex
        self.cache = caches['default']

    def _key(self, problem: Problem) -> str:
        return f'baseline:{self.run_id}:{problem.id}'

    def baseline(self, problem: Problem) -> float:
        key = self._key(problem)
        value = self.cache.get(key)
        if value is None:
            value = mean_reward(
                self.executor, problem, None, self.samples, self.seed)
            self.cache.set(key, value)
        return value

    def __call__(self, problem: Problem, strategy: str) -> float:
        guided = mean_reward(
            self.executor, problem, strategy, self.samples, self.seed)
        return guided - self.baseline(problem)

    def clear(self, problem: Problem):
        self.cache.delete(self._key(problem))
