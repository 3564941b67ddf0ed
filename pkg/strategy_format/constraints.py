"""Pluggable registry of extra interface constraints on strategies.

A constraint is a binary check over an already valid
:class:`~strategy_format.types.ParsedStrategy`, for example
requiring enumerated steps. Enabled constraints multiply
into the structure indicator.

No constraints are registered by default.
"""

from typing import Callable, Dict
from dataclasses import dataclass

from .types import ParsedStrategy


def register(id: str, description: str = ''):
    """Parametrized decorator that, given ID,
    returns a function that will register a constraint check.

    The check takes a valid
    :class:`~strategy_format.types.ParsedStrategy`
    and returns whether the strategy satisfies the constraint.
    """
    def wrapper(func: Callable[[ParsedStrategy], bool]):
        registry[id] = Constraint(
            check=func,
            description=description or (func.__doc__ or '').strip(),
        )
        return func
    return wrapper


@dataclass
class Constraint:
    """A registered constraint.
    Instantiated automatically by
    :func:`~strategy_format.constraints.register`.
    """
    check: Callable[[ParsedStrategy], bool]

    description: str


def get(id: str) -> Constraint:
    """Get previously registered constraint by ID.

    :raises ConstraintNotFound:"""

    try:
        return registry[id]
    except KeyError:
        raise ConstraintNotFound(id)


class ConstraintNotFound(RuntimeError):
    """No registered constraint with given ID."""
    pass


registry: Dict[str, Constraint] = {}
"""Registry of constraints."""
