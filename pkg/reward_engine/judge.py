"""Judging parsed strategies.

A judge scores a strategy body in ``[0, 1]`` and may flag it as
leaking the answer; a leaked strategy always scores 0.
"""

from typing import Optional
import logging
import re

from acceptance.types import Problem
from common.util import clamp
from llm_gateway.exceptions import GatewayError
from llm_gateway.gateway import Gateway
from llm_gateway.templates import load_prompt
from llm_gateway.types import CompletionRequest

from .exceptions import JudgeUnavailable
from .types import Judge, JudgeVerdict


__all__ = (
    'RuleBasedJudge',
    'GatewayJudge',
    'judge_score',
)


log = logging.getLogger(__name__)


STEP_RE = re.compile(r'(?:^|\s)(\d+)[.)](?=\s)', re.MULTILINE)
FENCE = '```'
BOXED = '\\boxed{'
BARE_NUMBER_RE = re.compile(r'^\s*[-+]?\d+(?:[.,]\d+)*\s*$')


class RuleBasedJudge:
    """Deterministic judge for offline runs.

    Scores 0.2 per enumerated step (``1.``, ``2)``, …), up to 1,
    and flags leakage on a fenced code block, a ``\\boxed{}`` answer,
    or a final line that is a bare number.
    """

    step_weight = 0.2

    def judge(self, problem: Problem, strategy_body: str) -> JudgeVerdict:
        lines = [line for line in strategy_body.splitlines() if line.strip()]
        leaked = (
            FENCE in strategy_body
            or BOXED in strategy_body
            or (bool(lines) and BARE_NUMBER_RE.match(lines[-1]) is not None)
        )
        steps = len(STEP_RE.findall(strategy_body))
        return JudgeVerdict(
            score=clamp(self.step_weight * steps),
            leaked=leaked,
        )


SCORE_RE = re.compile(r'SCORE:\s*([0-9]*\.?[0-9]+)', re.IGNORECASE)
LEAK_RE = re.compile(r'LEAK:\s*(yes|no)', re.IGNORECASE)


class GatewayJudge:
    """Asks a model to grade a strategy with the ``judge`` prompt.

    The reply must contain a ``SCORE:`` line; a missing ``LEAK:`` line
    counts as no leak.
    """

    def __init__(self, gateway: Gateway, model_id: str):
        self.gateway = gateway
        self.model_id = model_id

    def judge(self, problem: Problem, strategy_body: str) -> JudgeVerdict:
        system, user = load_prompt('judge').render(
            problem=problem.text, strategy=strategy_body)
        try:
            response = self.gateway.complete(CompletionRequest(
                model_id=self.model_id,
                system_prompt=system,
                user_content=user,
                max_tokens=64,
                temperature=0,
            ))
        except GatewayError as err:
            raise JudgeUnavailable(f"Judge request failed: {err}") from err

        score = SCORE_RE.search(response.text)
        if not score:
            raise JudgeUnavailable(
                f"Judge reply has no score "
                f"(request {response.correlation_id})")
        leak = LEAK_RE.search(response.text)
        return JudgeVerdict(
            score=clamp(float(score.group(1))),
            leaked=bool(leak) and leak.group(1).lower() == 'yes',
        )


def judge_score(
    judge: Optional[Judge],
    problem: Problem,
    strategy_body: str,
    fallback: str = 'zero',
) -> float:
    """Judge score of a parsed strategy body, 0 when leaked.

    Only bodies of valid strategies are to be judged;
    the judge never sees the tags.

    :param judge: ``None`` disables judging (score 0)
    :param fallback: ``zero`` scores an unavailable judge as 0,
        ``fail`` re-raises
    :raises reward_engine.exceptions.JudgeUnavailable:
        with ``fallback='fail'``
    """
    if judge is None:
        return 0.0
    try:
        verdict = judge.judge(problem, strategy_body)
    except JudgeUnavailable:
        if fallback == 'fail':
            raise
        log.warning(
            "Judge unavailable for problem %s, scoring 0", problem.id)
        return 0.0
    if verdict.leaked:
        return 0.0
    return verdict.score
