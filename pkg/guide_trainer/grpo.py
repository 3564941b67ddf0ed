"""Group-relative policy-gradient updates for a tabular softmax guide.

For each state, G strategies are sampled from the current row and
scored; each sample's advantage is its reward standardized within
the group. The row's logits then move along

    (1/G)·Σ_i A_i·∇log π(z_i) − kl_coefficient·∇KL(π ‖ π_ref)

scaled by the learning rate.
"""

from typing import Sequence
import logging

import numpy as np

from .exceptions import GroupTooSmall, NonFiniteGradient
from .types import TabularGuideParams, TrainConfig


__all__ = (
    'group_advantage',
    'reverse_kl',
    'sample_groups',
    'grpo_step',
)


log = logging.getLogger(__name__)


def group_advantage(
    rewards: Sequence[float],
    epsilon: float = 1e-8,
) -> np.ndarray:
    """Standardizes rewards within a group, ``(r − mean)/(std + ε)``
    with the population standard deviation.

    A group with identical rewards gets zero advantages.

    :raises guide_trainer.exceptions.GroupTooSmall:
    """
    arr = np.asarray(rewards, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise GroupTooSmall(
            f"A group needs at least two rewards, got {arr.size}")
    centered = arr - arr.mean()
    std = arr.std()
    if std == 0:
        return np.zeros_like(arr)
    return centered / (std + epsilon)


def reverse_kl(probs: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Per-row KL(probs ‖ reference)."""
    ratio = np.log(np.maximum(probs, 1e-300)) \
        - np.log(np.maximum(reference, 1e-300))
    kl = np.where(probs > 0, probs * ratio, 0.0).sum(axis=-1)
    return np.maximum(kl, 0.0)


def sample_groups(
    probs: np.ndarray,
    group_size: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draws ``group_size`` strategy indices per state row,
    shape ``(S, G)``."""
    cdf = np.cumsum(probs, axis=1)
    draws = rng.random((probs.shape[0], group_size))
    picks = (draws[:, :, None] >= cdf[:, None, :]).sum(axis=2)
    return np.minimum(picks, probs.shape[1] - 1)


def grpo_step(
    params: TabularGuideParams,
    samples: np.ndarray,
    rewards: np.ndarray,
    config: TrainConfig,
    step: int = 0,
) -> TabularGuideParams:
    """Applies one update from sampled groups.

    :param samples: strategy indices, shape ``(S, G)``
    :param rewards: shaped rewards of the samples, shape ``(S, G)``
    :raises guide_trainer.exceptions.NonFiniteGradient:
    :raises guide_trainer.exceptions.GroupTooSmall:
    """
    samples = np.asarray(samples, dtype=int)
    rewards = np.asarray(rewards, dtype=float)
    state_count, strategy_count = params.logits.shape
    if samples.shape != rewards.shape or samples.shape[0] != state_count:
        raise ValueError(
            f"Expected samples and rewards of shape ({state_count}, G), "
            f"got {samples.shape} and {rewards.shape}")
    group_size = samples.shape[1]
    temperature = params.temperature

    probs = params.probabilities()
    reference = params.reference_probabilities()

    advantages = np.stack([
        group_advantage(row, config.advantage_epsilon) for row in rewards])
    chosen = np.zeros((state_count, strategy_count))
    rows = np.repeat(np.arange(state_count), group_size)
    np.add.at(chosen, (rows, samples.ravel()), advantages.ravel())
    # Σ_i A_i·(e_{z_i} − p) / (G·T)
    policy_gradient = (
        chosen - advantages.sum(axis=1, keepdims=True) * probs
    ) / (group_size * temperature)

    kl = reverse_kl(probs, reference)
    log_ratio = np.log(np.maximum(probs, 1e-300)) \
        - np.log(np.maximum(reference, 1e-300))
    kl_gradient = probs * (log_ratio - kl[:, None]) / temperature

    update = config.learning_rate * (
        policy_gradient - config.kl_coefficient * kl_gradient)
    logits = params.logits + update

    if not np.all(np.isfinite(logits)):
        bad_state = int(np.argmax(~np.isfinite(logits).all(axis=1)))
        raise NonFiniteGradient(
            step,
            bad_state,
            f"rewards {rewards[bad_state].tolist()}, "
            f"logits {params.logits[bad_state].tolist()}")
    return params.with_logits(logits)
