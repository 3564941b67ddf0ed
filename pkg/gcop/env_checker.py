from typing import List, Tuple, Callable, Any
from os import environ

from django.core import checks


def _is_positive_number(val: str) -> bool:
    try:
        return float(val) > 0
    except ValueError:
        return False


def env_checker(**kwargs):
    """Checks that environment variables, where given, are well-formed.

    None are required: commands that reach a real endpoint
    verify the credential themselves (see :mod:`llm_gateway.adapters`).
    """

    env_checks: List[Tuple[
        str,
        Callable[[Any], bool],
        str
    ]] = [(
        'GCOP_MAX_IN_FLIGHT',
        lambda val: val.isdigit() and int(val) >= 1,
        "in-flight cap must be a positive integer",
    ), (
        'GCOP_RETRY_ATTEMPTS',
        lambda val: val.isdigit() and int(val) >= 1,
        "retry attempts must be a positive integer",
    ), (
        'GCOP_RETRY_BASE_MS',
        lambda val: val.isdigit(),
        "retry base delay must be a non-negative integer (milliseconds)",
    ), (
        'GCOP_RETRY_FACTOR',
        _is_positive_number,
        "retry factor must be a positive number",
    ), (
        'GCOP_REQUEST_TIMEOUT_SEC',
        _is_positive_number,
        "request timeout must be a positive number",
    ), (
        'GCOP_API_KEY',
        lambda val: val.strip() != '',
        "API key, when set, must not be blank",
    )]

    failed_env_checks: List[Tuple[str, str]] = [
        (name, err)
        for name, check, err in env_checks
        if name in environ and check(str(environ[name])) is False
    ]

    return [
        checks.Error(
            f'{failed_check[1]}',
            hint=f'(variable {failed_check[0]})',
        )
        for failed_check in failed_env_checks
    ]
