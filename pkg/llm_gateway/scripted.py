"""Deterministic stand-ins for model endpoints.

:class:`.ScriptedEndpoint` answers completion requests from a table,
and :class:`.ScriptedPolicy` plays the teacher, core or judge role
directly. Both are keyed by content and seed only,
so runs using them are reproducible without network access.
"""

from typing import (
    Any,
    Callable,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)
from pathlib import Path
import logging
import threading

import yaml

from acceptance.types import Problem, TrialOutcome
from common.rng import derive_seed, uniform_draw
from common.util import clamp, whitespace_token_count
from reward_engine.types import JudgeVerdict

from .adapters import register
from .exceptions import ScriptMiss, TransientError
from .types import CompletionRequest, ProviderConfig, RawCompletion


__all__ = (
    'ScriptedEndpoint',
    'ScriptedPolicy',
    'scripted_policy',
    'load_script',
)


log = logging.getLogger(__name__)


Responses = Union[
    Mapping[str, Union[str, Sequence[str]]],
    Callable[[CompletionRequest], str],
]


class ScriptedEndpoint:
    """An :class:`~llm_gateway.gateway.Endpoint` answering from a table
    keyed by user content.

    Where the table lists several answers for one prompt,
    the request seed picks one.
    """

    def __init__(
        self,
        responses: Responses,
        seed: int = 0,
        fail_first: int = 0,
        usage: Optional[Tuple[int, int]] = None,
    ):
        """
        :param fail_first: number of initial calls that fail
            with a transient error
        :param usage: fixed ``(input_tokens, output_tokens)`` to report;
            by default whitespace token counts are reported
        """
        self.responses = responses
        self.seed = seed
        self.fail_first = fail_first
        self.usage = usage
        self.calls = 0
        self._lock = threading.Lock()

    def send(
        self,
        request: CompletionRequest,
        correlation_id: str,
    ) -> RawCompletion:
        with self._lock:
            self.calls += 1
            call_number = self.calls
        if call_number <= self.fail_first:
            raise TransientError(
                f"Scripted failure {call_number} of {self.fail_first}",
                correlation_id,
                503)

        text = self._answer(request)
        if self.usage:
            input_tokens, output_tokens = self.usage
        else:
            input_tokens = (
                whitespace_token_count(request.system_prompt)
                + whitespace_token_count(request.user_content))
            output_tokens = whitespace_token_count(text)
        return RawCompletion(
            text=text,
            input_tokens=input_tokens,
            output_tokens=output_tokens,
        )

    def _answer(self, request: CompletionRequest) -> str:
        if callable(self.responses):
            return self.responses(request)
        key = request.user_content
        try:
            entry = self.responses[key]
        except KeyError:
            raise ScriptMiss('completion', key[:80])
        if isinstance(entry, str):
            return entry
        if not entry:
            raise ScriptMiss('completion', key[:80])
        pick = derive_seed(self.seed, key, request.seed or 0) % len(entry)
        return entry[pick]


@register('scripted')
def build_scripted_endpoint(config: ProviderConfig) -> ScriptedEndpoint:
    return ScriptedEndpoint(config.script)


class ScriptedPolicy:
    """A black-box policy driven by a script, one section per role:

    ``propose``
        problem ID → strategy text
    ``refine``
        strategy text → refined strategy text
    ``success``
        problem ID → success probability, either one number
        or a mapping of strategy text → probability
        (the empty string standing for unguided execution)
    ``feedback``
        problem ID → failure message
    ``judge``
        ``score`` (default score), ``scores`` (strategy body → score)
        and ``leak_markers`` (substrings flagging leakage)

    Any section may instead be a callable taking the same arguments
    as the corresponding method (without ``self``).
    A key missing from a section raises
    :class:`~llm_gateway.exceptions.ScriptMiss`.
    """

    def __init__(self, script: Mapping[str, Any], seed: int = 0):
        self.script = script
        self.seed = seed
        self.deterministic = bool(script.get('deterministic', False))

    def _section(self, role: str) -> Any:
        try:
            return self.script[role]
        except KeyError:
            raise ScriptMiss(role, '(no such section)')

    def _lookup(self, role: str, key: str, *args) -> Any:
        section = self._section(role)
        if callable(section):
            return section(*args)
        try:
            return section[key]
        except KeyError:
            raise ScriptMiss(role, key)

    def propose(self, problem: Problem) -> str:
        return self._lookup('propose', problem.id, problem)

    def refine(self, problem: Problem, strategy: str, feedback: str) -> str:
        return self._lookup('refine', strategy, problem, strategy, feedback)

    def success_probability(
        self,
        problem: Problem,
        strategy: Optional[str],
    ) -> float:
        entry = self._lookup('success', problem.id, problem, strategy)
        if isinstance(entry, Mapping):
            key = strategy or ''
            try:
                entry = entry[key]
            except KeyError:
                raise ScriptMiss('success', f'{problem.id}/{key[:80]}')
        return clamp(float(entry))

    def run(
        self,
        problem: Problem,
        strategy: Optional[str],
        seed: int,
    ) -> TrialOutcome:
        q = self.success_probability(problem, strategy)
        if q >= 1:
            success = True
        elif q <= 0:
            success = False
        else:
            draw = uniform_draw(self.seed, seed, problem.id, strategy or '')
            success = draw < q

        feedback = None
        if not success and 'feedback' in self.script:
            try:
                feedback = self._lookup('feedback', problem.id, problem)
            except ScriptMiss:
                pass
        return TrialOutcome(success=success, feedback=feedback)

    def judge(self, problem: Problem, strategy_body: str) -> JudgeVerdict:
        section = self._section('judge')
        if callable(section):
            verdict = section(problem, strategy_body)
            if isinstance(verdict, JudgeVerdict):
                return verdict
            score, leaked = verdict
            return JudgeVerdict(score=clamp(score), leaked=leaked)

        leaked = any(
            marker in strategy_body
            for marker in section.get('leak_markers', ()))
        scores = section.get('scores', {})
        if strategy_body in scores:
            score = scores[strategy_body]
        elif 'score' in section:
            score = section['score']
        else:
            raise ScriptMiss('judge', strategy_body[:80])
        return JudgeVerdict(score=clamp(float(score)), leaked=leaked)


def scripted_policy(script: Mapping[str, Any], seed: int = 0) \
        -> ScriptedPolicy:
    """Builds a black-box teacher/core/judge from a script.
    See :class:`.ScriptedPolicy` for the script layout."""
    return ScriptedPolicy(script, seed)


def load_script(path: Path) -> Mapping[str, Any]:
    """Reads a script from a YAML (or JSON) file."""
    with open(path, 'r', encoding='utf-8') as fh:
        script = yaml.safe_load(fh)
    if not isinstance(script, Mapping):
        raise ValueError(f"{path} does not contain a mapping")
    log.debug("Loaded script with sections %s", ', '.join(script))
    return script
