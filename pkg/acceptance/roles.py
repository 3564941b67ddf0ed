"""Teacher and executor backed by model endpoints."""

from typing import Optional
import logging

from llm_gateway.exceptions import ProtocolError
from llm_gateway.gateway import Gateway
from llm_gateway.templates import load_prompt
from llm_gateway.types import CompletionRequest
from strategy_format.parser import parse_strategy

from .types import Problem, TrialOutcome


__all__ = (
    'GatewayTeacher',
    'GatewayExecutor',
)


log = logging.getLogger(__name__)


class GatewayTeacher:
    """Proposes and refines strategies by prompting a (large) model.

    Replies must carry a well-formed strategy block;
    its body becomes the strategy.
    """

    def __init__(
        self,
        gateway: Gateway,
        model_id: str,
        budget: int = 1024,
        max_tokens: int = 2048,
    ):
        self.gateway = gateway
        self.model_id = model_id
        self.budget = budget
        self.max_tokens = max_tokens

    def _ask(self, prompt: str, **values: str) -> str:
        system, user = load_prompt(prompt).render(**values)
        response = self.gateway.complete(CompletionRequest(
            model_id=self.model_id,
            system_prompt=system,
            user_content=user,
            max_tokens=self.max_tokens,
        ))
        parsed = parse_strategy(response.text, self.budget)
        if not parsed.valid:
            raise ProtocolError(
                f"Teacher reply has no usable strategy block "
                f"({parsed.failure_reason})",
                response.correlation_id)
        assert parsed.strategy_body is not None
        return parsed.strategy_body

    def propose(self, problem: Problem) -> str:
        return self._ask('propose', problem=problem.text)

    def refine(self, problem: Problem, strategy: str, feedback: str) -> str:
        return self._ask(
            'refine',
            problem=problem.text,
            strategy=strategy,
            feedback=feedback)


class GatewayExecutor:
    """Runs problems on a (small) core model and checks the output
    with the problem's validator."""

    deterministic = False

    def __init__(
        self,
        gateway: Gateway,
        model_id: str,
        max_tokens: int = 2048,
        temperature: Optional[float] = None,
    ):
        self.gateway = gateway
        self.model_id = model_id
        self.max_tokens = max_tokens
        self.temperature = temperature

    def run(
        self,
        problem: Problem,
        strategy: Optional[str],
        seed: int,
    ) -> TrialOutcome:
        if problem.validator is None:
            raise ValueError(f"Problem {problem.id} has no validator")
        if strategy:
            prompt = load_prompt(f'guided_{problem.domain}')
            system, user = prompt.render(
                problem=problem.text, strategy=strategy)
        else:
            prompt = load_prompt(f'unguided_{problem.domain}')
            system, user = prompt.render(problem=problem.text)

        extra = {}
        if self.temperature is not None:
            extra['temperature'] = self.temperature
        response = self.gateway.complete(CompletionRequest(
            model_id=self.model_id,
            system_prompt=system,
            user_content=user,
            max_tokens=self.max_tokens,
            seed=seed,
            **extra,
        ))
        success = problem.validator.check(response.text)
        return TrialOutcome(
            success=success,
            feedback=None if success else (
                f"core output did not pass the "
                f"{problem.validator.kind} check"),
            output_tokens=response.output_tokens,
        )
