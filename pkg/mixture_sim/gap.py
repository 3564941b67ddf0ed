"""Checking the value gap between a teacher policy and a composed policy
against the executability bound, on single instances and in sweeps."""

from typing import List, NamedTuple, Optional, Sequence, Tuple
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
import logging

import numpy as np

from common.records import write_csv
from common.rng import derive_seed, make_rng
from policy_core.composition import compose
from policy_core.exceptions import DimensionMismatch
from policy_core.types import (
    EnvSpec, GuidePolicy, TabularPolicy, UtilityReport,
)
from policy_core.utility import net_utility
from prometheus import metrics

from .dp import exact_value_dp, tv_distance, visitation
from .mixture import build_mixture_core, executability
from .types import GapReport, GapRow, MixtureModel


__all__ = (
    'GAP_TOLERANCE',
    'TV_TOLERANCE',
    'check_value_gap',
    'UtilityComparison',
    'utility_condition',
    'InstanceLimits',
    'random_instance',
    'sweep_value_gap',
    'write_gap_rows',
    'GAP_CSV_HEADER',
)


log = logging.getLogger(__name__)


GAP_TOLERANCE = 1e-9
TV_TOLERANCE = 1e-12


def check_value_gap(
    guide: GuidePolicy,
    model: MixtureModel,
    env: EnvSpec,
    bound_scale: float = 1.0,
) -> GapReport:
    """Compares the exact values of the teacher and of the guide
    composed with the mixture core, and evaluates the bound
    ``2·H·R_max·Σ_s d_L(s)·(1 − α(s))``.

    :param bound_scale: multiplier applied to the bound before
        comparison; 1 checks the bound as stated, values below 1
        probe how much slack an instance has
    :raises policy_core.exceptions.StrategySpaceMismatch:
    :raises policy_core.exceptions.NotTabular:
    :raises policy_core.exceptions.DimensionMismatch:
    """
    if (model.state_count, model.action_count) != \
            (env.state_count, env.action_count):
        raise DimensionMismatch(
            "Mixture model covers %s states × %s actions, "
            "environment has %s × %s" % (
                model.state_count, model.action_count,
                env.state_count, env.action_count))

    profile = executability(guide, model)
    composed = compose(guide, build_mixture_core(model))

    teacher_value = exact_value_dp(model.teacher, env)
    composed_value = exact_value_dp(composed, env)
    d_teacher = visitation(model.teacher, env)

    bound = bound_scale * 2.0 * env.horizon * env.r_max * float(
        d_teacher @ (1.0 - profile.alpha))
    gap = teacher_value - composed_value

    tv_holds = all(
        tv_distance(composed.probabilities[s], model.teacher.probabilities[s])
        <= 1.0 - profile.alpha[s] + TV_TOLERANCE
        for s in range(env.state_count)
    )

    report = GapReport(
        teacher_value=teacher_value,
        composed_value=composed_value,
        gap=gap,
        bound=bound,
        holds=gap <= bound + GAP_TOLERANCE,
        visitation=d_teacher,
        alpha=profile.alpha,
        tv_holds=tv_holds,
    )
    if not report.holds:
        metrics.verification_violations.labels('value_gap').inc()
        log.warning("Value gap %.12g exceeds bound %.12g", gap, bound)
    if not report.tv_holds:
        metrics.verification_violations.labels('tv_bound').inc()
        log.warning("Per-state TV bound violated")
    return report


class UtilityComparison(NamedTuple):
    condition: bool
    """λ·(T_L − T_gc) > bound."""

    teacher: UtilityReport
    composed: UtilityReport


def utility_condition(
    report: GapReport,
    lam: float,
    cost_teacher: float,
    cost_composed: float,
) -> UtilityComparison:
    """Evaluates the executability form of the utility condition and
    the two net utilities it compares.

    Whenever ``condition`` holds and the value gap is within its bound,
    the composed policy has strictly higher net utility.

    :raises policy_core.exceptions.NegativeLambda:
    """
    teacher = net_utility(report.teacher_value, cost_teacher, lam)
    composed = net_utility(report.composed_value, cost_composed, lam)
    return UtilityComparison(
        condition=lam * (cost_teacher - cost_composed) > report.bound,
        teacher=teacher,
        composed=composed,
    )


class InstanceLimits(NamedTuple):
    max_states: int = 6
    max_actions: int = 4
    max_horizon: int = 4
    max_strategies: int = 5


def _dirichlet_rows(rng: np.random.Generator, shape: Tuple[int, ...]):
    rows = rng.dirichlet(np.ones(shape[-1]), size=shape[:-1] or None)
    return rows / rows.sum(axis=-1, keepdims=True)


def random_instance(
    seed: int,
    limits: InstanceLimits = InstanceLimits(),
) -> Tuple[EnvSpec, GuidePolicy, MixtureModel]:
    """Draws a random tabular instance.

    Sizes are uniform up to ``limits``; every distribution row is
    Dirichlet(1); success probabilities and rewards are
    uniform on ``[0, 1]`` (so R_max = 1).
    """
    rng = make_rng(seed)
    s = int(rng.integers(1, limits.max_states + 1))
    a = int(rng.integers(1, limits.max_actions + 1))
    h = int(rng.integers(1, limits.max_horizon + 1))
    z = int(rng.integers(1, limits.max_strategies + 1))

    env = EnvSpec(
        state_count=s,
        action_count=a,
        horizon=h,
        r_max=1.0,
        reward_table=rng.random((s, a)),
        transition=_dirichlet_rows(rng, (s, a, s)),
        initial_dist=_dirichlet_rows(rng, (s, )),
    )
    model = MixtureModel(
        teacher=TabularPolicy(probabilities=_dirichlet_rows(rng, (s, a))),
        bad_exec=_dirichlet_rows(rng, (s, z, a)),
        success_prob=rng.random((s, z)),
    )
    guide = GuidePolicy.tabular(
        _dirichlet_rows(rng, (s, z)),
        model.strategy_space)
    return env, guide, model


def _instance_row(
    instance_seed: int,
    limits: InstanceLimits,
    bound_scale: float,
) -> GapRow:
    env, guide, model = random_instance(instance_seed, limits)
    report = check_value_gap(guide, model, env, bound_scale)
    return GapRow(
        instance_seed=instance_seed,
        gap=report.gap,
        bound=report.bound,
        alpha_mean=report.alpha_mean,
        holds=report.holds,
        tv_holds=report.tv_holds,
    )


def sweep_value_gap(
    instances: int,
    seed: int,
    limits: InstanceLimits = InstanceLimits(),
    max_workers: Optional[int] = None,
    bound_scale: float = 1.0,
) -> List[GapRow]:
    """Checks the bound on ``instances`` random instances.

    Instance ``i`` is drawn from a seed derived from ``(seed, i)``,
    so results do not depend on scheduling.

    :raises ValueError: ``instances`` is less than 1
    """
    if instances < 1:
        raise ValueError("At least one instance is required")

    seeds = [derive_seed(seed, idx) for idx in range(instances)]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        rows = list(pool.map(
            lambda instance_seed: _instance_row(
                instance_seed, limits, bound_scale),
            seeds))

    failures = sum(1 for row in rows if not (row.holds and row.tv_holds))
    log.info(
        "Checked value-gap bound on %s instances, %s failing",
        instances, failures)
    return rows


GAP_CSV_HEADER = (
    'instance_seed', 'gap', 'bound', 'alpha_mean', 'holds', 'tv_holds',
)


def write_gap_rows(path: Path, rows: Sequence[GapRow]) -> int:
    return write_csv(path, GAP_CSV_HEADER, (
        (row.instance_seed, row.gap, row.bound, row.alpha_mean,
         str(row.holds).lower(), str(row.tv_holds).lower())
        for row in rows
    ))
