from typing import Any, Dict, Optional
from decimal import Decimal

from pydantic import (
    BaseModel,
    Field,
    NonNegativeInt,
    PositiveInt,
    confloat,
    validator,
)

from .exceptions import UnknownModel


__all__ = (
    'CompletionRequest',
    'RawCompletion',
    'CompletionResponse',
    'ModelPrice',
    'PriceTable',
    'ProviderConfig',
)


class CompletionRequest(BaseModel):
    """A single-turn chat completion: one system and one user message."""

    model_id: str

    system_prompt: str = ''

    user_content: str

    max_tokens: PositiveInt = 2048

    temperature: confloat(ge=0) = 0.6  # type: ignore[valid-type]

    top_p: confloat(gt=0, le=1) = 0.95  # type: ignore[valid-type]

    seed: Optional[int] = None
    """Passed to providers that support seeded sampling;
    scripted endpoints key their answers on it."""

    class Config:
        allow_mutation = False

    def to_record(self) -> Dict[str, Any]:
        return self.dict()


class RawCompletion(BaseModel):
    """What an endpoint returns for one attempt."""

    text: str
    input_tokens: NonNegativeInt
    output_tokens: NonNegativeInt

    class Config:
        allow_mutation = False


class CompletionResponse(BaseModel):
    text: str

    input_tokens: NonNegativeInt
    output_tokens: NonNegativeInt

    latency_ms: NonNegativeInt
    """Wall time across all attempts, backoff included."""

    attempt_count: PositiveInt

    model_id: str

    correlation_id: str

    class Config:
        allow_mutation = False


class ModelPrice(BaseModel):
    """Prices per million tokens."""

    input: Decimal = Field(ge=0)
    output: Decimal = Field(ge=0)

    class Config:
        allow_mutation = False

    @validator('input', 'output', pre=True)
    def _exact(cls, v):
        # Floats from YAML would carry binary rounding into the ledger.
        if isinstance(v, float):
            return Decimal(repr(v))
        return v


class PriceTable(BaseModel):
    """User-supplied prices by model ID; no vendor prices are built in."""

    prices: Dict[str, ModelPrice] = {}

    class Config:
        allow_mutation = False

    def price_for(self, model_id: str) -> ModelPrice:
        """:raises llm_gateway.exceptions.UnknownModel:"""
        try:
            return self.prices[model_id]
        except KeyError:
            raise UnknownModel(model_id)


class ProviderConfig(BaseModel):
    """Where and how to reach a model endpoint.

    The credential is never part of this; it comes from
    ``GCOP_API_KEY``.
    """

    provider: str
    """ID of a registered adapter, e.g. ``openai-chat``."""

    base_url: str = ''

    model_id: str

    prices: PriceTable = PriceTable()

    max_tokens: PositiveInt = 2048

    temperature: confloat(ge=0) = 0.6  # type: ignore[valid-type]

    top_p: confloat(gt=0, le=1) = 0.95  # type: ignore[valid-type]

    script: Dict[str, Any] = {}
    """Canned responses for the ``scripted`` provider,
    keyed by user content."""

    class Config:
        allow_mutation = False
