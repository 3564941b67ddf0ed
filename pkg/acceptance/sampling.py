"""Concentration bounds behind acceptance sampling.

A strategy is accepted when its empirical success rate over K trials
reaches τ. Hoeffding's inequality limits how often a strategy with true
success rate at most τ − η slips through (δ = exp(−2Kη²)), which gives
a lower bound on the expected success of accepted strategies as long as
δ stays below the acceptance rate.
"""

from typing import Sequence
import logging
import math
import sys

from .exceptions import ZeroAcceptanceRate
from .types import (
    AcceptanceCertificate,
    AcceptanceConfig,
    AcceptanceRateBound,
)


__all__ = (
    'hoeffding_delta',
    'accepted_success_lower_bound',
    'acceptance_rate_lcb',
    'certify',
)


log = logging.getLogger(__name__)


MIN_DELTA = sys.float_info.min
"""Floor of the Hoeffding probability, which underflows for large Kη²."""


def hoeffding_delta(k_trials: int, eta: float) -> float:
    """Probability bound ``exp(−2Kη²)`` on a K-trial empirical rate
    overshooting the true rate by η or more, floored at
    :data:`MIN_DELTA`.

    :raises ValueError: negative arguments
    """
    if k_trials < 0 or eta < 0:
        raise ValueError("k_trials and eta must be non-negative")
    return max(math.exp(-2 * k_trials * eta ** 2), MIN_DELTA)


def accepted_success_lower_bound(
    tau: float,
    eta: float,
    k_trials: int,
    acceptance_rate: float,
) -> float:
    """Lower bound ``(τ − η)·(1 − δ / A)`` on the expected success
    of accepted strategies, with acceptance rate ``A``.

    The bound is not clamped: it is negative (vacuous) when δ > A.

    :raises acceptance.exceptions.ZeroAcceptanceRate:
    :raises ValueError: acceptance rate above 1
    """
    if acceptance_rate <= 0:
        raise ZeroAcceptanceRate(
            "The bound is undefined without accepted strategies")
    if acceptance_rate > 1:
        raise ValueError(f"acceptance rate {acceptance_rate} exceeds 1")
    delta = hoeffding_delta(k_trials, eta)
    return (tau - eta) * (1 - delta / acceptance_rate)


def acceptance_rate_lcb(
    accept_flags: Sequence[bool],
    epsilon: float,
) -> AcceptanceRateBound:
    """Empirical acceptance rate over M proposals, with the lower bound
    ``max(â − ε, 0)`` holding with probability ``1 − exp(−2Mε²)``.

    :raises ValueError: no flags, or ε not positive
    """
    m = len(accept_flags)
    if m == 0:
        raise ValueError("At least one acceptance decision is required")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    a_hat = sum(1 for flag in accept_flags if flag) / m
    return AcceptanceRateBound(
        m_samples=m,
        a_hat=a_hat,
        a_lcb=max(a_hat - epsilon, 0.0),
        confidence=1 - math.exp(-2 * m * epsilon ** 2),
    )


def certify(
    accept_flags: Sequence[bool],
    config: AcceptanceConfig,
) -> AcceptanceCertificate:
    """Builds a certificate from the first M (``config.m_samples``)
    first-round acceptance decisions.

    The bound uses the acceptance-rate lower confidence bound,
    so it holds with the reported confidence.
    """
    flags = list(accept_flags[:config.m_samples])
    if len(flags) < config.m_samples:
        log.warning(
            "Acceptance rate estimated from %s of %s requested decisions",
            len(flags), config.m_samples)
    delta = hoeffding_delta(config.k_trials, config.eta)
    rate = acceptance_rate_lcb(flags, config.epsilon)
    bound = None
    if rate.a_lcb > 0:
        bound = accepted_success_lower_bound(
            config.tau, config.eta, config.k_trials, rate.a_lcb)
    return AcceptanceCertificate(
        delta=delta,
        a_hat=rate.a_hat,
        a_lcb=rate.a_lcb,
        confidence=rate.confidence,
        m_samples=rate.m_samples,
        bound=bound,
        nonvacuous=rate.a_lcb > 0 and delta <= rate.a_lcb,
    )
