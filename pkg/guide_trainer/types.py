"""Guide parameters, training configuration and learning curves."""

from typing import Any, List, Optional, Sequence, Tuple
from pathlib import Path

import numpy as np
from pydantic import (
    BaseModel,
    NonNegativeInt,
    PositiveInt,
    confloat,
    conint,
    root_validator,
    validator,
)

from common.pydantic import FrozenModel, readonly_array
from common.records import write_csv
from policy_core.types import GuidePolicy, default_strategy_space


__all__ = (
    'softmax_rows',
    'TabularGuideParams',
    'TrainConfig',
    'TrainRecord',
    'TrainHistory',
)


def softmax_rows(logits: np.ndarray, temperature: float = 1.0) \
        -> np.ndarray:
    """Row-wise softmax of ``logits / temperature``."""
    scaled = np.asarray(logits, dtype=float) / temperature
    scaled = scaled - scaled.max(axis=-1, keepdims=True)
    weights = np.exp(scaled)
    return weights / weights.sum(axis=-1, keepdims=True)


class TabularGuideParams(FrozenModel):
    """Softmax guide over a finite strategy space,
    one row of logits per state.

    ``reference_logits`` is the frozen starting point
    the KL penalty pulls towards; updates only replace ``logits``.
    """

    logits: np.ndarray
    """Shape ``(S, Z)``."""

    reference_logits: np.ndarray

    temperature: confloat(gt=0) = 1.0  # type: ignore[valid-type]

    strategy_space: Tuple[str, ...] = ()

    @validator('logits', 'reference_logits', pre=True)
    def _finite_table(cls, v):
        arr = readonly_array(v, 2)
        if not np.all(np.isfinite(arr)):
            raise ValueError("logits must be finite")
        return arr

    @root_validator(skip_on_failure=True)
    def _shapes(cls, values):
        logits, reference = values['logits'], values['reference_logits']
        if logits.shape != reference.shape:
            raise ValueError(
                f"reference logits have shape {reference.shape}, "
                f"expected {logits.shape}")
        if not values.get('strategy_space'):
            values['strategy_space'] = \
                default_strategy_space(logits.shape[1])
        if len(values['strategy_space']) != logits.shape[1]:
            raise ValueError("strategy space size must match logits")
        return values

    @classmethod
    def uniform(
        cls,
        state_count: int,
        strategy_space: Sequence[str],
        temperature: float = 1.0,
    ) -> 'TabularGuideParams':
        zeros = np.zeros((state_count, len(strategy_space)))
        return cls(
            logits=zeros,
            reference_logits=zeros,
            temperature=temperature,
            strategy_space=tuple(strategy_space),
        )

    @classmethod
    def from_guide(
        cls,
        guide: GuidePolicy,
        temperature: float = 1.0,
        floor: float = 1e-12,
    ) -> 'TabularGuideParams':
        """Logits reproducing a tabular guide's rows
        (zero probabilities are raised to ``floor``)."""
        assert guide.probabilities is not None
        logits = temperature * np.log(np.maximum(guide.probabilities, floor))
        return cls(
            logits=logits,
            reference_logits=logits,
            temperature=temperature,
            strategy_space=guide.strategy_space,
        )

    @property
    def state_count(self) -> int:
        return self.logits.shape[0]

    @property
    def strategy_count(self) -> int:
        return self.logits.shape[1]

    def probabilities(self) -> np.ndarray:
        return softmax_rows(self.logits, self.temperature)

    def reference_probabilities(self) -> np.ndarray:
        return softmax_rows(self.reference_logits, self.temperature)

    def to_guide(self) -> GuidePolicy:
        return GuidePolicy.tabular(self.probabilities(), self.strategy_space)

    def with_logits(self, logits: np.ndarray) -> 'TabularGuideParams':
        return TabularGuideParams(
            logits=logits,
            reference_logits=self.reference_logits,
            temperature=self.temperature,
            strategy_space=self.strategy_space,
        )


class TrainConfig(BaseModel):
    """Group-relative policy-gradient settings.

    Defaults are declared choices for the tabular setting,
    except for the KL coefficient.
    """

    group_size: conint(ge=2) = 8  # type: ignore[valid-type]
    """Strategies sampled per state and step, G."""

    learning_rate: confloat(ge=0) = 1.0  # type: ignore[valid-type]

    kl_coefficient: confloat(ge=0) = 0.004  # type: ignore[valid-type]

    steps: NonNegativeInt = 500

    advantage_epsilon: confloat(gt=0) = 1e-8  # type: ignore[valid-type]

    seed: int = 0

    temperature: confloat(gt=0) = 1.0  # type: ignore[valid-type]

    lam: confloat(ge=0) = 1e-4  # type: ignore[valid-type]
    """Cost sensitivity λ for the net utility recorded in history."""

    max_in_flight: Optional[PositiveInt] = None
    """Concurrent reward computations, for stochastic executors."""

    class Config:
        allow_mutation = False


class TrainRecord(BaseModel):
    step: NonNegativeInt

    mean_reward: float
    """Mean shaped reward over the step's samples."""

    mean_alpha: confloat(ge=0, le=1)  # type: ignore[valid-type]
    """Mean executability over training states, after the update."""

    validity_rate: confloat(ge=0, le=1)  # type: ignore[valid-type]
    """Share of the step's samples with a valid strategy block."""

    kl: confloat(ge=0)  # type: ignore[valid-type]
    """Mean KL divergence of guide rows from the reference."""

    net_utility: float

    class Config:
        allow_mutation = False


class TrainHistory(BaseModel):
    records: List[TrainRecord] = []

    def append(self, record: TrainRecord):
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def final(self) -> Optional[TrainRecord]:
        return self.records[-1] if self.records else None

    def column(self, name: str) -> List[Any]:
        return [getattr(record, name) for record in self.records]

    def to_csv(self, path: Path) -> int:
        fields = list(TrainRecord.__fields__)
        return write_csv(path, fields, (
            [getattr(record, field) for field in fields]
            for record in self.records
        ))

