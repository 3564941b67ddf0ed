"""A desk-scale benchmark for guide training.

Each task is a one-step episode: the guide picks one of a handful of
canned strategy outputs, and the core answers correctly exactly when
the task's designated strategy reaches it. Every fifth task the core
also solves unguided, so a wrong strategy there degrades it. The
strategy space deliberately includes a malformed output (no closing
tag), a leaky one (a fenced code block) and a vague one, so that every
term of the shaped reward is exercised.
"""

from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import PositiveInt, validator

from acceptance.types import Problem, TrialOutcome
from common.pydantic import FrozenModel, readonly_array
from common.rng import derive_seed
from common.util import whitespace_token_count
from mixture_sim.dp import exact_value_dp
from mixture_sim.mixture import build_mixture_core, executability
from mixture_sim.types import MixtureModel
from policy_core.composition import compose
from policy_core.types import (
    EnvSpec,
    GuidePolicy,
    TabularPolicy,
    UtilityReport,
)
from policy_core.utility import composed_cost, net_utility
from strategy_format.parser import parse_strategy


__all__ = (
    'STRATEGIES',
    'SyntheticSuite',
    'SuiteCore',
    'SuiteTeacher',
    'build_suite',
)


STRATEGIES: Tuple[Tuple[str, str], ...] = (
    ('stepwise', (
        "<think>Work through it in order.</think>"
        "<strategy>1. Restate what is asked.\n"
        "2. List the given quantities.\n"
        "3. Set up the computation.\n"
        "4. Check the result against the question.</strategy>")),
    ('sketch', (
        "<strategy>1. Find the key quantity.\n"
        "2. Compute it.</strategy>")),
    ('leaky', (
        "<strategy>1. Compute the total.\n"
        "2. Divide.\n"
        "```\nanswer = 12 / 3\n```</strategy>")),
    ('malformed', (
        "<strategy>1. Restate the question.\n"
        "2. Solve it.")),
    ('vague', "<strategy>Think carefully and answer.</strategy>"),
)
"""Strategy labels and the raw guide output each stands for."""


ACTIONS = ('wrong', 'right')


class SyntheticSuite(FrozenModel):
    """Tasks, strategies and the core's behaviour on each pair."""

    problems: Tuple[Problem, ...]

    labels: Tuple[str, ...]

    outputs: Tuple[str, ...]
    """Raw guide output for each label."""

    budget: PositiveInt = 64

    success: np.ndarray
    """Whether the core answers task ``s`` correctly given strategy
    ``z``, shape ``(S, Z)``, in {0, 1}. A malformed output counts as a
    failure: the structure gate gives it no credit."""

    unguided_success: np.ndarray
    """Whether the core answers task ``s`` correctly with no strategy,
    shape ``(S,)``."""

    episode_cost: np.ndarray
    """Guide plus core tokens for task ``s`` under strategy ``z``,
    shape ``(S, Z)``."""

    teacher_tokens: PositiveInt = 600
    """Tokens a large model spends answering a task on its own."""

    @validator('success', 'episode_cost', pre=True)
    def _tables(cls, v):
        return readonly_array(v, 2)

    @validator('unguided_success', pre=True)
    def _vector(cls, v):
        return readonly_array(v, 1)

    @property
    def state_count(self) -> int:
        return len(self.problems)

    @property
    def strategy_count(self) -> int:
        return len(self.labels)

    def body(self, index: int) -> Optional[str]:
        """Parsed strategy body of a label, ``None`` when malformed."""
        parsed = parse_strategy(self.outputs[index], self.budget)
        return parsed.strategy_body if parsed.valid else None

    @property
    def valid_indices(self) -> List[int]:
        return [
            idx for idx in range(self.strategy_count)
            if self.body(idx) is not None]

    def state_of(self, problem_id: str) -> int:
        for idx, problem in enumerate(self.problems):
            if problem.id == problem_id:
                return idx
        raise KeyError(problem_id)

    def env(self) -> EnvSpec:
        """One-step episodes, one state per task, reward 1 for
        the right answer."""
        count = self.state_count
        return EnvSpec(
            state_count=count,
            action_count=len(ACTIONS),
            horizon=1,
            reward_table=[[0.0, 1.0]] * count,
            r_max=1.0,
            transition=[
                [np.eye(count)[s]] * len(ACTIONS) for s in range(count)],
            initial_dist=np.full(count, 1.0 / count),
            state_labels=tuple(p.id for p in self.problems),
            action_labels=ACTIONS,
        )

    def teacher_policy(self) -> TabularPolicy:
        return TabularPolicy(
            probabilities=[[0.0, 1.0]] * self.state_count)

    def mixture_model(self) -> MixtureModel:
        """The core as a mixture: teacher-level execution with the
        suite's success probability, a wrong answer otherwise."""
        bad = np.zeros((self.state_count, self.strategy_count, 2))
        bad[:, :, 0] = 1.0
        return MixtureModel(
            teacher=self.teacher_policy(),
            bad_exec=bad,
            success_prob=self.success,
            strategy_space=self.labels,
        )

    def evaluate(
        self,
        guide: GuidePolicy,
        lam: float,
        model: Optional[MixtureModel] = None,
        env: Optional[EnvSpec] = None,
    ) -> UtilityReport:
        """Exact value, expected token cost and net utility of
        ``guide`` composed with the suite's core.

        :param model: prebuilt :meth:`.mixture_model`
        :param env: prebuilt :meth:`.env`
        """
        model = model or self.mixture_model()
        composed = compose(guide, build_mixture_core(model))
        value = exact_value_dp(composed, env or self.env())
        assert guide.probabilities is not None
        cost = float(np.mean(
            (guide.probabilities * self.episode_cost).sum(axis=1)))
        return net_utility(value, cost, lam)

    def mean_alpha(
        self,
        guide: GuidePolicy,
        model: Optional[MixtureModel] = None,
    ) -> float:
        return executability(guide, model or self.mixture_model()).mean_alpha

    def teacher_report(self, lam: float) -> UtilityReport:
        value = exact_value_dp(self.teacher_policy(), self.env())
        return net_utility(value, self.teacher_tokens, lam)


class SuiteCore:
    """Executes suite tasks: success is read off the suite's table."""

    deterministic = True

    def __init__(self, suite: SyntheticSuite):
        self.suite = suite
        self.columns: Dict[str, int] = {
            str(suite.body(idx)): idx for idx in suite.valid_indices}

    def run(
        self,
        problem: Problem,
        strategy: Optional[str],
        seed: int,
    ) -> TrialOutcome:
        state = self.suite.state_of(problem.id)
        column = self.columns.get(strategy) if strategy else None
        if column is None:
            success = bool(self.suite.unguided_success[state])
        else:
            success = bool(self.suite.success[state, column])
        return TrialOutcome(
            success=success,
            feedback=None if success else "wrong final answer",
        )


class SuiteTeacher:
    """Proposes well-formed suite strategies, starting from a
    seeded pick per task and cycling through the rest on refinement."""

    def __init__(self, suite: SyntheticSuite, seed: int):
        self.suite = suite
        self.seed = seed
        self.bodies = [suite.body(idx) for idx in suite.valid_indices]

    def propose(self, problem: Problem) -> str:
        start = derive_seed(self.seed, problem.id) % len(self.bodies)
        return str(self.bodies[start])

    def refine(self, problem: Problem, strategy: str, feedback: str) -> str:
        position = self.bodies.index(strategy) \
            if strategy in self.bodies else -1
        return str(self.bodies[(position + 1) % len(self.bodies)])


GOOD_CORE_TOKENS = 150
OTHER_CORE_TOKENS = 300

UNGUIDED_PERIOD = 5


def build_suite(tasks: int = 20, budget: int = 64) -> SyntheticSuite:
    """Builds the benchmark: ``tasks`` tasks, each solved by exactly
    one well-formed strategy, assigned in rotation.

    The core solves every :data:`UNGUIDED_PERIOD`-th task unguided
    (and the rest not at all), spends
    :data:`GOOD_CORE_TOKENS` when the strategy works and
    :data:`OTHER_CORE_TOKENS` otherwise.
    """
    if tasks < 1:
        raise ValueError("At least one task is required")
    labels = tuple(label for label, _ in STRATEGIES)
    outputs = tuple(output for _, output in STRATEGIES)
    problems = tuple(
        Problem(id=f'task-{idx:02d}', text=f"Synthetic task {idx}.")
        for idx in range(tasks))

    valid = [
        idx for idx, output in enumerate(outputs)
        if parse_strategy(output, budget).valid]

    success = np.zeros((tasks, len(labels)))
    for state in range(tasks):
        success[state, valid[state % len(valid)]] = 1.0

    unguided = np.array([
        1.0 if state % UNGUIDED_PERIOD == UNGUIDED_PERIOD - 1 else 0.0
        for state in range(tasks)])

    guide_tokens = [whitespace_token_count(output) for output in outputs]
    episode_cost = np.array([
        [
            composed_cost(
                guide_tokens[z],
                GOOD_CORE_TOKENS if success[state, z]
                else OTHER_CORE_TOKENS)
            for z in range(len(labels))
        ]
        for state in range(tasks)
    ])

    return SyntheticSuite(
        problems=problems,
        labels=labels,
        outputs=outputs,
        budget=budget,
        success=success,
        unguided_success=unguided,
        episode_cost=episode_cost,
    )
