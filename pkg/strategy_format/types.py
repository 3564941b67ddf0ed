from typing import Any, Dict, Optional
from enum import Enum

from pydantic import BaseModel, NonNegativeInt


__all__ = (
    'FailureReason',
    'ParsedStrategy',
)


class FailureReason(str, Enum):
    """Why a guide output has no usable strategy block.

    Listed in the order checks are applied: when several apply,
    the earliest is reported.
    """

    MISSING_OPEN = 'missing_open'
    IMPROPER_NESTING = 'improper_nesting'
    MISSING_CLOSE = 'missing_close'
    MULTIPLE_BLOCKS = 'multiple_blocks'
    EMPTY_BODY = 'empty_body'
    OVER_BUDGET = 'over_budget'


class ParsedStrategy(BaseModel):
    raw_text: str

    strategy_body: Optional[str]
    """Stripped text between the strategy tags.
    Absent when the block structure itself is broken."""

    think_body: Optional[str]
    """Stripped text of the first reasoning block outside the strategy,
    if any."""

    token_count: NonNegativeInt
    """Whitespace-delimited tokens in ``strategy_body``."""

    budget: int

    failure_reason: Optional[FailureReason] = None

    class Config:
        allow_mutation = False

    @property
    def valid(self) -> bool:
        return self.failure_reason is None

    def to_record(self) -> Dict[str, Any]:
        return {
            'raw_text': self.raw_text,
            'strategy_body': self.strategy_body,
            'think_body': self.think_body,
            'token_count': self.token_count,
            'budget': self.budget,
            'valid': self.valid,
            'failure_reason': (
                self.failure_reason.value
                if self.failure_reason else None),
        }
