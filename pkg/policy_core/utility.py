"""Net-utility objective and reward–cost frontier."""

from typing import List, NamedTuple, Sequence, Union
import numbers
from decimal import Decimal

from .exceptions import NegativeLambda
from .types import UtilityReport


__all__ = (
    'net_utility',
    'composed_cost',
    'state_utility_condition',
    'FrontierPoint',
    'pareto_frontier',
)


def net_utility(
    value: float,
    cost: Union[float, Decimal],
    lam: float,
) -> UtilityReport:
    """Computes J = V − λ·T.

    :param value: task value V (e.g. accuracy or expected return)
    :param cost: inference cost T (tokens, latency or money);
        decimals from a ledger are accepted
    :param lam: cost sensitivity λ ≥ 0
    :raises policy_core.exceptions.NegativeLambda:
    """
    if lam < 0:
        raise NegativeLambda(f"lambda must be non-negative, got {lam}")
    value, cost, lam = float(value), float(cost), float(lam)
    return UtilityReport(
        value=value,
        cost=cost,
        lam=lam,
        net_utility=value - lam * cost,
    )


def composed_cost(
    guide_tokens: Union[float, Sequence[float]],
    core_tokens: Union[float, Sequence[float]],
) -> float:
    """Per-episode cost of a composed policy: the guide's usage plus
    the core's. Sequences are per-turn charges and are summed.

    :raises ValueError: negative usage
    """
    def total(usage) -> float:
        if isinstance(usage, numbers.Real):
            usage = [usage]
        values = [float(u) for u in usage]
        if any(u < 0 for u in values):
            raise ValueError("token usage must be non-negative")
        return sum(values)

    return total(guide_tokens) + total(core_tokens)


def state_utility_condition(
    lam: float,
    cost_large: float,
    cost_composed: float,
    value_large: float,
    value_composed: float,
) -> bool:
    """Sufficient condition for a composed policy to have higher net
    utility than a large baseline policy from a fixed initial state:
    the cost advantage must dominate the value gap,
    λ·(T_L − T_gc) > V_L − V_gc.
    """
    if lam < 0:
        raise NegativeLambda(f"lambda must be non-negative, got {lam}")
    return lam * (cost_large - cost_composed) > value_large - value_composed


class FrontierPoint(NamedTuple):
    name: str
    value: float
    cost: float
    net_utility: float
    on_frontier: bool


def pareto_frontier(
    reports: Sequence[UtilityReport],
    names: Sequence[str],
) -> List[FrontierPoint]:
    """Flags the non-dominated policies in (value ↑, cost ↓) space.

    A policy is dominated if another has value at least as high and cost
    at least as low, with at least one of the two strictly better.

    :raises ValueError: empty input, or ``names``/``reports`` differ in length
    """
    if not reports:
        raise ValueError("At least one policy is required")
    if len(names) != len(reports):
        raise ValueError("Each report needs a name")

    def dominated(idx: int) -> bool:
        me = reports[idx]
        return any(
            other.value >= me.value and other.cost <= me.cost
            and (other.value > me.value or other.cost < me.cost)
            for jdx, other in enumerate(reports)
            if jdx != idx
        )

    return [
        FrontierPoint(
            name=name,
            value=report.value,
            cost=report.cost,
            net_utility=report.net_utility,
            on_frontier=not dominated(idx),
        )
        for idx, (name, report) in enumerate(zip(names, reports))
    ]
