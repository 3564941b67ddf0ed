"""Pydantic-related utilities."""

from typing import Any, List, Tuple, TypeAlias, TypedDict, Union, cast

import numpy as np
from pydantic import BaseModel, ValidationError


__all__ = (
    'ValidationErrorDict',
    'PydanticLoc',
    'pretty_print_loc',
    'format_validation_errors',
    'FrozenModel',
    'readonly_array',
)


PydanticLoc: TypeAlias = Tuple[Union[int, str], ...]
"""Normalized Pydantic-style field location,
e.g. ``("acceptance", "tau")`` for ``{acceptance: {tau: …}}``.
"""


class ValidationErrorDict(TypedDict):
    """A Pydantic validation error;
    a list of these is returned by :class:`pydantic.ValidationError`’s
    ``errors()`` method.
    """

    loc: PydanticLoc
    """Normalized representation of field path."""

    msg: str
    """Error description, e.g. ``value is not a valid list``."""

    type: str
    """Error type; e.g., ``type_error.list``."""


def pretty_print_loc(loc: PydanticLoc) -> str:
    """Given a Pydantic ``loc``, formats it as a string,
    e.g. ``("policies", 1, "cost")`` becomes ``policies#2.cost``.
    """
    result = ''
    for part in loc:
        if isinstance(part, str):
            result += f'.{part}'
        elif isinstance(part, int):
            result += f'#{part + 1}'
    return result.removeprefix('.')


def format_validation_errors(err: ValidationError) -> List[str]:
    """Turns a validation error into one human-readable line per problem,
    each prefixed with the offending field location."""
    errors = cast(List[ValidationErrorDict], err.errors())
    return [
        f"{pretty_print_loc(e['loc']) or '(root)'}: {e['msg']}"
        for e in errors
    ]


def readonly_array(value: Any, ndim: int, dtype=float) -> np.ndarray:
    """Coerces nested lists (or an array) into a read-only array
    of given dimensionality.

    :raises ValueError: wrong number of dimensions or ragged input
    """
    try:
        arr = np.array(value, dtype=dtype)
    except (TypeError, ValueError) as err:
        raise ValueError(f"not a regular {ndim}-dimensional table: {err}")
    if arr.ndim != ndim:
        raise ValueError(
            f"expected {ndim} dimensions, got {arr.ndim} "
            f"(shape {arr.shape})")
    arr.setflags(write=False)
    return arr


class FrozenModel(BaseModel):
    """Base for immutable models that may hold numpy arrays.

    Arrays are expected to be made read-only by validators
    (see :func:`.readonly_array`), so that instances are safe to share
    across threads.
    """

    class Config:
        allow_mutation = False
        arbitrary_types_allowed = True
        copy_on_model_validation = 'none'
