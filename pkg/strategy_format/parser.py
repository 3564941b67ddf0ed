"""Deterministic checker for the ``<strategy>…</strategy>`` block
in guide output.

A valid output contains exactly one strategy block that is properly
nested, non-empty after trimming, and within the token budget.
A ``<think>…</think>`` block may appear before or after it and is
otherwise ignored, but strategy and think tags may not interleave.
Tags are literal and case-sensitive.
"""

from typing import List, Optional, Sequence, Tuple
import functools
import re

from common.util import whitespace_token_count

from . import constraints as registered
from .types import FailureReason, ParsedStrategy


__all__ = (
    'STRATEGY_OPEN',
    'STRATEGY_CLOSE',
    'parse_strategy',
    'structure_indicator',
)


STRATEGY_OPEN = '<strategy>'
STRATEGY_CLOSE = '</strategy>'

TAG_RE = re.compile(r'<(/?)(strategy|think)>')


def _scan(text: str) -> Tuple[
    Optional[FailureReason],
    List[Tuple[int, int]],
    Optional[str],
]:
    """Walks the tags of ``text``.

    :returns: a structural failure (if any), spans of complete strategy
        bodies, and the first think body outside any strategy
    """
    tags = list(TAG_RE.finditer(text))
    if not any(m.group(0) == STRATEGY_OPEN for m in tags):
        return FailureReason.MISSING_OPEN, [], None

    blocks: List[Tuple[int, int]] = []
    think_body: Optional[str] = None
    strategy_start: Optional[int] = None
    think_start: Optional[int] = None

    for match in tags:
        closing, name = bool(match.group(1)), match.group(2)

        if name == 'strategy':
            if not closing:
                if strategy_start is not None or think_start is not None:
                    return FailureReason.IMPROPER_NESTING, blocks, think_body
                strategy_start = match.end()
            else:
                if strategy_start is None:
                    return FailureReason.IMPROPER_NESTING, blocks, think_body
                blocks.append((strategy_start, match.start()))
                strategy_start = None

        else:
            if strategy_start is not None:
                return FailureReason.IMPROPER_NESTING, blocks, think_body
            if not closing:
                # A repeated opening tag restarts the reasoning block.
                think_start = match.end()
            elif think_start is not None:
                if think_body is None:
                    think_body = text[think_start:match.start()].strip()
                think_start = None

    if strategy_start is not None:
        return FailureReason.MISSING_CLOSE, blocks, think_body
    if len(blocks) > 1:
        return FailureReason.MULTIPLE_BLOCKS, blocks, think_body
    return None, blocks, think_body


@functools.lru_cache(maxsize=4096)
def parse_strategy(text: str, budget: int) -> ParsedStrategy:
    """Parses guide output into a
    :class:`~strategy_format.types.ParsedStrategy`.

    Invalidity is reported through ``failure_reason``, never raised.
    Content semantics are not consulted.

    :param budget: maximum whitespace-delimited tokens in the body
    :raises ValueError: ``budget`` is less than 1
    """
    if budget < 1:
        raise ValueError("Token budget must be positive")

    failure, blocks, think_body = _scan(text)

    if failure is not None:
        return ParsedStrategy(
            raw_text=text,
            strategy_body=None,
            think_body=think_body,
            token_count=0,
            budget=budget,
            failure_reason=failure,
        )

    start, end = blocks[0]
    body = text[start:end].strip()
    token_count = whitespace_token_count(body)

    if not body:
        failure = FailureReason.EMPTY_BODY
    elif token_count > budget:
        failure = FailureReason.OVER_BUDGET

    return ParsedStrategy(
        raw_text=text,
        strategy_body=body,
        think_body=think_body,
        token_count=token_count,
        budget=budget,
        failure_reason=failure,
    )


def structure_indicator(
    text: str,
    budget: int,
    constraints: Sequence[str] = (),
) -> int:
    """Returns 1 if ``text`` holds exactly one valid strategy block
    that also satisfies every named interface constraint, else 0.

    :param constraints: IDs of constraints registered in
        :mod:`strategy_format.constraints`
    :raises strategy_format.constraints.ConstraintNotFound:
    """
    parsed = parse_strategy(text, budget)
    if not parsed.valid:
        return 0
    checks = [registered.get(constraint_id) for constraint_id in constraints]
    return int(all(check.check(parsed) for check in checks))
