"""Scoring guide outputs end to end: parse, execute, judge, compare
with the unguided baseline, and shape."""

from typing import Optional, Sequence
from pathlib import Path
import logging

from acceptance.types import Executor, Problem
from common.records import write_csv
from common.rng import derive_seed
from strategy_format.parser import parse_strategy, structure_indicator

from .delta import DeltaREstimator
from .judge import judge_score
from .shaping import shaped_reward
from .types import Judge, RewardBreakdown, ShapingConfig


__all__ = (
    'ShapedRewardEngine',
    'BREAKDOWN_CSV_HEADER',
    'write_breakdowns',
)


log = logging.getLogger(__name__)


class ShapedRewardEngine:
    """Turns a raw guide output for a problem into a
    :class:`~reward_engine.types.RewardBreakdown`.

    The task reward comes from one core execution guided by the parsed
    strategy (unguided when the output is malformed).
    The judge and the reward-difference estimate are only consulted
    for well-formed outputs, and only when their weight is non-zero.
    """

    def __init__(
        self,
        executor: Executor,
        judge: Optional[Judge],
        config: ShapingConfig,
        budget: int,
        seed: int,
        constraints: Sequence[str] = (),
    ):
        self.executor = executor
        self.judge = judge
        self.config = config
        self.budget = budget
        self.seed = seed
        self.constraints = tuple(constraints)
        self.delta_r = DeltaREstimator(
            executor, config.delta_r_samples, seed)

    @property
    def deterministic(self) -> bool:
        """Whether scoring the same output twice gives the same result."""
        return bool(getattr(self.executor, 'deterministic', False))

    def score(
        self,
        problem: Problem,
        guide_output: str,
        sample_seed: int = 0,
    ) -> RewardBreakdown:
        """
        :raises reward_engine.exceptions.DeltaRAborted:
        :raises reward_engine.exceptions.JudgeUnavailable:
            with the ``fail`` fallback
        """
        i_str = structure_indicator(
            guide_output, self.budget, self.constraints)
        body = parse_strategy(guide_output, self.budget).strategy_body \
            if i_str else None

        outcome = self.executor.run(
            problem,
            body,
            derive_seed(self.seed, problem.id, 'task', sample_seed))

        judged = 0.0
        difference = 0.0
        if i_str:
            assert body is not None
            if self.config.gamma > 0:
                judged = judge_score(
                    self.judge, problem, body, self.config.judge_fallback)
            if self.config.kappa > 0:
                difference = self.delta_r(problem, body)

        return shaped_reward(
            i_str,
            outcome.reward,
            judged,
            difference,
            self.config,
            problem_id=problem.id,
        )


BREAKDOWN_CSV_HEADER = (
    'problem_id',
    'i_str',
    'task_reward',
    'judge_score',
    'delta_r',
    'hinge_penalty',
    'shaped',
)


def write_breakdowns(path: Path, rows: Sequence[RewardBreakdown]) -> int:
    """Writes reward breakdowns as an audit table."""
    return write_csv(path, BREAKDOWN_CSV_HEADER, (
        (row.problem_id or '', row.i_str, row.task_reward, row.judge_score,
         row.delta_r, row.hinge_penalty, row.shaped)
        for row in rows
    ))
