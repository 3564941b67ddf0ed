"""Training loop and the guide variants compared on the frontier."""

from typing import Callable, Dict, List, NamedTuple, Optional, Tuple
from concurrent.futures import ThreadPoolExecutor
import logging

import numpy as np
from django.conf import settings

from acceptance.curation import CurationResult, curate, fit_sft_guide
from acceptance.types import AcceptanceConfig
from common.rng import derive_seed, make_rng
from mixture_sim.gap import check_value_gap
from mixture_sim.types import GapReport
from policy_core.types import GuidePolicy, UtilityReport
from prometheus import metrics
from reward_engine.engine import ShapedRewardEngine

from .grpo import grpo_step, reverse_kl, sample_groups
from .synthetic import SuiteCore, SuiteTeacher, SyntheticSuite
from .types import TabularGuideParams, TrainConfig, TrainHistory, TrainRecord


__all__ = (
    'RewardTable',
    'reward_table',
    'train',
    'value_gap',
    'Variant',
    'sft_params',
    'train_variants',
)


log = logging.getLogger(__name__)


class RewardTable(NamedTuple):
    """Shaped reward, structure indicator and hinge penalty
    per (task, strategy)."""

    shaped: np.ndarray
    valid: np.ndarray
    hinge: np.ndarray


def reward_table(
    engine: ShapedRewardEngine,
    suite: SyntheticSuite,
) -> RewardTable:
    """Scores every (task, strategy) pair once.
    Only meaningful for a deterministic engine."""
    shaped = np.zeros((suite.state_count, suite.strategy_count))
    valid = np.zeros_like(shaped)
    hinge = np.zeros_like(shaped)
    for state, problem in enumerate(suite.problems):
        for column, output in enumerate(suite.outputs):
            breakdown = engine.score(problem, output)
            shaped[state, column] = breakdown.shaped
            valid[state, column] = breakdown.i_str
            hinge[state, column] = breakdown.hinge_penalty
    return RewardTable(shaped, valid, hinge)


def _score_groups(
    engine: ShapedRewardEngine,
    suite: SyntheticSuite,
    samples: np.ndarray,
    step: int,
    config: TrainConfig,
) -> Tuple[np.ndarray, np.ndarray]:
    def score_state(state: int) -> List[Tuple[float, int]]:
        problem = suite.problems[state]
        scored = []
        for idx, column in enumerate(samples[state]):
            breakdown = engine.score(
                problem,
                suite.outputs[column],
                sample_seed=derive_seed(config.seed, step, idx))
            scored.append((breakdown.shaped, breakdown.i_str))
        return scored

    workers = config.max_in_flight or settings.DEFAULT_CURATION_IN_FLIGHT
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(score_state, range(suite.state_count)))
    scores = np.array(rows, dtype=float)
    return scores[:, :, 0], scores[:, :, 1]


def train(
    params: TabularGuideParams,
    suite: SyntheticSuite,
    engine: ShapedRewardEngine,
    config: TrainConfig,
    on_step: Optional[Callable[[TrainRecord], None]] = None,
) -> Tuple[TabularGuideParams, TrainHistory]:
    """Runs ``config.steps`` group-relative updates of ``params``
    against the shaped reward on ``suite``'s tasks.

    With a deterministic engine every (task, strategy) pair is scored
    once up front; otherwise samples are scored as they are drawn,
    several tasks at a time. One history record is kept per step.

    :raises guide_trainer.exceptions.NonFiniteGradient:
    :raises reward_engine.exceptions.DeltaRAborted:
    """
    if params.strategy_space != suite.labels:
        raise ValueError("Guide and suite strategy spaces differ")
    if params.state_count != suite.state_count:
        raise ValueError(
            "Guide covers %s states, suite has %s tasks" % (
                params.state_count, suite.state_count))

    rng = make_rng(config.seed, 'grpo')
    model = suite.mixture_model()
    env = suite.env()
    table = reward_table(engine, suite) if engine.deterministic else None
    rows = np.arange(suite.state_count)[:, None]
    history = TrainHistory()

    initial_alpha = suite.mean_alpha(params.to_guide(), model)
    log.info(
        "Training for %s steps from mean executability %.4f",
        config.steps, initial_alpha)

    for step in range(config.steps):
        samples = sample_groups(
            params.probabilities(), config.group_size, rng)
        if table is not None:
            rewards = table.shaped[rows, samples]
            valid = table.valid[rows, samples]
        else:
            rewards, valid = _score_groups(
                engine, suite, samples, step, config)

        params = grpo_step(params, samples, rewards, config, step)
        metrics.training_steps.inc()

        guide = params.to_guide()
        report = suite.evaluate(guide, config.lam, model, env)
        record = TrainRecord(
            step=step,
            mean_reward=float(rewards.mean()),
            mean_alpha=suite.mean_alpha(guide, model),
            validity_rate=float(valid.mean()),
            kl=float(reverse_kl(
                params.probabilities(),
                params.reference_probabilities()).mean()),
            net_utility=report.net_utility,
        )
        history.append(record)
        if on_step:
            on_step(record)

    final_alpha = suite.mean_alpha(params.to_guide(), model)
    log.info(
        "Mean executability %.4f -> %.4f", initial_alpha, final_alpha)
    return params, history


def value_gap(params: TabularGuideParams, suite: SyntheticSuite) \
        -> GapReport:
    """Gap between the large model and the composed policy,
    with its executability bound."""
    return check_value_gap(
        params.to_guide(), suite.mixture_model(), suite.env())


class Variant(NamedTuple):
    name: str
    params: TabularGuideParams
    report: UtilityReport
    mean_alpha: float


def sft_params(
    suite: SyntheticSuite,
    seed: int,
    acceptance: Optional[AcceptanceConfig] = None,
    temperature: float = 1.0,
) -> Tuple[TabularGuideParams, CurationResult]:
    """Curates strategies for the suite's tasks and fits a guide
    to the accepted ones."""
    result = curate(
        SuiteTeacher(suite, seed),
        SuiteCore(suite),
        suite.problems,
        acceptance or AcceptanceConfig(),
        seed,
    )
    space = [
        suite.body(idx) or suite.outputs[idx]
        for idx in range(suite.strategy_count)]
    fitted = fit_sft_guide(
        result.corpus,
        [problem.id for problem in suite.problems],
        space)
    assert fitted.probabilities is not None
    guide = GuidePolicy.tabular(fitted.probabilities, suite.labels)
    return TabularGuideParams.from_guide(guide, temperature), result


def train_variants(
    suite: SyntheticSuite,
    engine: ShapedRewardEngine,
    config: TrainConfig,
    acceptance: Optional[AcceptanceConfig] = None,
    start: str = 'sft',
) -> Tuple[Dict[str, Variant], TrainHistory]:
    """Builds the three guides compared on the frontier:

    - ``base``: uniform over the strategy space
    - ``sft``: fitted to curated strategies
    - ``exectune``: ``sft`` (or ``base``, see ``start``) refined
      by :func:`.train`

    :returns: variants by name, and the training history
    """
    base = TabularGuideParams.uniform(
        suite.state_count, suite.labels, config.temperature)
    sft, _ = sft_params(suite, config.seed, acceptance, config.temperature)
    if start not in ('base', 'sft'):
        raise ValueError(f"Unknown starting guide {start!r}")
    initial = sft if start == 'sft' else base
    tuned, history = train(initial, suite, engine, config)

    model = suite.mixture_model()
    env = suite.env()
    variants = {}
    for name, params in (('base', base), ('sft', sft), ('exectune', tuned)):
        guide = params.to_guide()
        variants[name] = Variant(
            name=name,
            params=params,
            report=suite.evaluate(guide, config.lam, model, env),
            mean_alpha=suite.mean_alpha(guide, model),
        )
    return variants, history
