from typing import Any, Dict, Literal, Optional, Protocol

from pydantic import (
    BaseModel,
    PositiveInt,
    confloat,
    root_validator,
)

from acceptance.types import Problem


__all__ = (
    'ShapingConfig',
    'RewardBreakdown',
    'JudgeVerdict',
    'Judge',
)


class ShapingConfig(BaseModel):
    """Weights of the shaped reward.

    Defaults are declared choices for desk-scale experiments.
    """

    beta: confloat(ge=0) = 0.1  # type: ignore[valid-type]
    """Bonus for a well-formed strategy block."""

    gamma: confloat(ge=0) = 0.5  # type: ignore[valid-type]
    """Weight of the judge score."""

    kappa: confloat(ge=0) = 1.0  # type: ignore[valid-type]
    """Weight of the penalty for degrading the core."""

    delta_r_samples: PositiveInt = 8
    """Draws per arm when estimating the reward difference."""

    judge_fallback: Literal['zero', 'fail'] = 'zero'
    """What to do when the judge is unavailable:
    score 0 (as if γ were 0), or fail the batch."""

    class Config:
        allow_mutation = False


class RewardBreakdown(BaseModel):
    """Itemized shaped reward for one guide output."""

    problem_id: Optional[str] = None

    i_str: Literal[0, 1]

    task_reward: confloat(ge=0)  # type: ignore[valid-type]

    judge_score: confloat(ge=0, le=1)  # type: ignore[valid-type]

    delta_r: float

    hinge_penalty: confloat(ge=0)  # type: ignore[valid-type]
    """``max(−delta_r, 0)``."""

    shaped: float

    class Config:
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def _hinge(cls, values):
        if values['hinge_penalty'] != max(-values['delta_r'], 0.0):
            raise ValueError("hinge_penalty must equal max(-delta_r, 0)")
        return values

    def to_record(self) -> Dict[str, Any]:
        return self.dict()


class JudgeVerdict(BaseModel):
    score: confloat(ge=0, le=1)  # type: ignore[valid-type]

    leaked: bool = False
    """The strategy gives away the answer or the implementation."""

    class Config:
        allow_mutation = False


class Judge(Protocol):
    """Scores the quality of a parsed strategy body."""

    def judge(self, problem: Problem, strategy_body: str) -> JudgeVerdict:
        ...
