from decimal import Decimal, Inexact, localcontext

from policy_core.types import LedgerEntry

from .types import CompletionResponse, PriceTable


__all__ = (
    'TOKENS_PER_PRICE_UNIT',
    'meter_cost',
)


TOKENS_PER_PRICE_UNIT = Decimal(1_000_000)


def meter_cost(
    response: CompletionResponse,
    price_table: PriceTable,
    model_id: str,
) -> LedgerEntry:
    """Prices a response's token usage exactly:
    ``(input_tokens × input_price + output_tokens × output_price) / 10⁶``.

    :raises llm_gateway.exceptions.UnknownModel:
    :raises decimal.Inexact: the charge is not representable exactly
        (not expected for decimal prices)
    """
    price = price_table.price_for(model_id)
    with localcontext() as ctx:
        ctx.prec = 80
        ctx.traps[Inexact] = True
        charge = (
            Decimal(response.input_tokens) * price.input
            + Decimal(response.output_tokens) * price.output
        ) / TOKENS_PER_PRICE_UNIT
    return LedgerEntry(
        label=model_id,
        unit_count=response.input_tokens + response.output_tokens,
        unit_price=None,
        charge=charge,
        input_tokens=response.input_tokens,
        output_tokens=response.output_tokens,
    )
