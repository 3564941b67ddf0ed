"""The structure-aware shaped reward.

For a guide output with structure indicator ``I`` (1 iff it carries
exactly one well-formed, non-empty, within-budget strategy block)::

    R̃ = I · (R + β + γ·J − κ·max(−ΔR, 0))

so a malformed output earns nothing, however good the final answer.
"""

from typing import Optional
import math

from .types import RewardBreakdown, ShapingConfig


__all__ = (
    'hinge',
    'shaped_reward',
    'simple_shaped_reward',
)


def hinge(delta_r: float) -> float:
    """``max(−ΔR, 0)``: the part of ΔR that counts as harm."""
    return max(-delta_r, 0.0)


def _check_inputs(i_str: int, task_reward: float, judge_score: float):
    if i_str not in (0, 1):
        raise ValueError(f"i_str must be 0 or 1, got {i_str!r}")
    if not math.isfinite(task_reward) or task_reward < 0:
        raise ValueError(f"task reward must be ≥ 0, got {task_reward}")
    if not 0 <= judge_score <= 1:
        raise ValueError(f"judge score must lie in [0, 1], got {judge_score}")


def shaped_reward(
    i_str: int,
    task_reward: float,
    judge_score: float,
    delta_r: float,
    config: ShapingConfig,
    problem_id: Optional[str] = None,
) -> RewardBreakdown:
    """Computes the shaped reward with its itemization.

    :raises ValueError: out-of-range inputs
    """
    _check_inputs(i_str, task_reward, judge_score)
    if not math.isfinite(delta_r):
        raise ValueError(f"delta_r must be finite, got {delta_r}")
    penalty = hinge(delta_r)
    if i_str:
        shaped = (
            task_reward
            + config.beta
            + config.gamma * judge_score
            - config.kappa * penalty)
    else:
        shaped = 0.0
    return RewardBreakdown(
        problem_id=problem_id,
        i_str=i_str,
        task_reward=task_reward,
        judge_score=judge_score,
        delta_r=delta_r,
        hinge_penalty=penalty,
        shaped=shaped,
    )


def simple_shaped_reward(task_reward: float, i_str: int, beta: float) \
        -> float:
    """``R·I + β·I``: task reward plus a format bonus, both gated
    on a valid strategy block. Equals :func:`.shaped_reward`
    with γ = κ = 0."""
    _check_inputs(i_str, task_reward, 0.0)
    if beta < 0:
        raise ValueError("beta must be non-negative")
    return task_reward * i_str + beta * i_str
