"""Empirical validation of a strategy against the core."""

from typing import List, NamedTuple, Optional
import logging

import numpy as np
import tenacity

from common.rng import SEED_MASK, make_rng
from llm_gateway.exceptions import GatewayError

from .exceptions import TrialAborted, TrialError
from .types import Executor, Problem, TrialOutcome


__all__ = (
    'ValidationResult',
    'trial_seeds',
    'run_trials',
    'validate_strategy',
)


log = logging.getLogger(__name__)


class ValidationResult(NamedTuple):
    q_hat: float
    successes: int
    k_trials: int
    feedback: Optional[str]
    """Feedback of the last failed trial, if the executor gave any."""


def trial_seeds(seed: int, problem_id: str, k_trials: int) -> List[int]:
    """Per-trial seeds, independent of trial scheduling."""
    rng = make_rng(seed, problem_id, 'trials')
    return [
        int(s) for s in rng.integers(
            0, SEED_MASK, size=k_trials, dtype=np.uint64, endpoint=True)
    ]


def run_trials(
    executor: Executor,
    problem: Problem,
    strategy: Optional[str],
    k_trials: int,
    seed: int,
    retries: int = 2,
) -> ValidationResult:
    """Runs ``k_trials`` sequential executions of ``problem``
    guided by ``strategy``.

    A trial whose executor raises :class:`.TrialError` is retried up to
    ``retries`` times. Gateway errors abort at once: the gateway has
    already retried. Errors are never counted as failures.

    :raises ValueError: ``k_trials`` < 1
    :raises acceptance.exceptions.TrialAborted:
    """
    if k_trials < 1:
        raise ValueError("k_trials must be at least 1")

    retrying = tenacity.Retrying(
        stop=tenacity.stop_after_attempt(retries + 1),
        retry=tenacity.retry_if_exception_type(TrialError),
        reraise=True,
    )

    successes = 0
    feedback: Optional[str] = None
    for idx, trial_seed in enumerate(
            trial_seeds(seed, problem.id, k_trials)):
        try:
            outcome: TrialOutcome = retrying(
                executor.run, problem, strategy, trial_seed)
        except (TrialError, GatewayError) as err:
            log.error(
                "Trial %s of problem %s failed: %s", idx, problem.id, err)
            raise TrialAborted(problem.id, idx, err) from err
        if outcome.success:
            successes += 1
        elif outcome.feedback:
            feedback = outcome.feedback

    return ValidationResult(
        q_hat=successes / k_trials,
        successes=successes,
        k_trials=k_trials,
        feedback=feedback,
    )


def validate_strategy(
    executor: Executor,
    problem: Problem,
    strategy: Optional[str],
    k_trials: int,
    seed: int,
    retries: int = 2,
) -> float:
    """Empirical success rate q̂ of ``strategy`` over ``k_trials``
    i.i.d. executions; one of ``0, 1/K, …, 1``.

    How trials differ (core sampling, environment, or both)
    is up to the executor; trial ``i`` receives its own derived seed.

    :raises ValueError: ``k_trials`` < 1
    :raises acceptance.exceptions.TrialAborted: an executor call
        kept failing
    """
    return run_trials(
        executor, problem, strategy, k_trials, seed, retries).q_hat
