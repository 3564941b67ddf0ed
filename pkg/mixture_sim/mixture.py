"""Mixture-model core and guide-averaged executability."""

from typing import List, Optional

import numpy as np

from policy_core.exceptions import (
    DimensionMismatch,
    NotTabular,
    StrategySpaceMismatch,
)
from policy_core.types import CorePolicy, GuidePolicy

from .types import ExecutabilityProfile, MixtureModel


__all__ = (
    'UNDEFINED_RHO_THRESHOLD',
    'build_mixture_core',
    'executability',
    'mixture_marginal',
)


UNDEFINED_RHO_THRESHOLD = 1e-12
"""ρ_s is left undefined where the bad-execution mass 1 − α(s)
does not exceed this."""


def build_mixture_core(model: MixtureModel) -> CorePolicy:
    """Builds the tabular core
    π_c(a | s, z) = q(s, z)·π_L(a | s) + (1 − q(s, z))·π_bad(a | s, z).
    """
    q = model.success_prob[:, :, None]
    teacher = model.teacher.probabilities[:, None, :]
    table = q * teacher + (1.0 - q) * model.bad_exec
    return CorePolicy.tabular(table, model.strategy_space)


def _check_guide(guide: GuidePolicy, model: MixtureModel) -> np.ndarray:
    if not guide.is_tabular:
        raise NotTabular("Executability requires a tabular guide")
    if guide.strategy_space != model.strategy_space:
        raise StrategySpaceMismatch(
            "Guide and mixture model strategy spaces differ",
            guide.strategy_space,
            model.strategy_space)
    probs = guide.probabilities
    assert probs is not None
    if probs.shape[0] != model.state_count:
        raise DimensionMismatch(
            "Guide covers %s states, mixture model covers %s" % (
                probs.shape[0], model.state_count))
    return probs


def executability(
    guide: GuidePolicy,
    model: MixtureModel,
) -> ExecutabilityProfile:
    """Computes α(s) = Σ_z π_g(z | s)·q(s, z) and the aggregated bad
    execution distribution
    ρ_s(a) ∝ Σ_z π_g(z | s)·(1 − q(s, z))·π_bad(a | s, z).

    :raises policy_core.exceptions.StrategySpaceMismatch:
    :raises policy_core.exceptions.NotTabular:
    """
    guide_probs = _check_guide(guide, model)

    alpha = np.einsum('sz,sz->s', guide_probs, model.success_prob)
    # Float error may step just outside the unit interval.
    alpha = np.clip(alpha, 0.0, 1.0)

    bad_weight = guide_probs * (1.0 - model.success_prob)
    unnormalized = np.einsum('sz,sza->sa', bad_weight, model.bad_exec)
    mass = unnormalized.sum(axis=1)

    rho: List[Optional[np.ndarray]] = []
    for s in range(model.state_count):
        if mass[s] <= UNDEFINED_RHO_THRESHOLD:
            rho.append(None)
        else:
            rho.append(unnormalized[s] / mass[s])

    return ExecutabilityProfile(alpha=alpha, rho=tuple(rho))


def mixture_marginal(
    guide: GuidePolicy,
    model: MixtureModel,
) -> np.ndarray:
    """The composed action policy rewritten through executability,
    α(s)·π_L(· | s) + (1 − α(s))·ρ_s, shape ``(S, A)``.

    Equal to composing ``guide`` with :func:`build_mixture_core`.
    """
    profile = executability(guide, model)
    teacher = model.teacher.probabilities
    rows = []
    for s in range(model.state_count):
        row = profile.alpha[s] * teacher[s]
        rho = profile.rho[s]
        if rho is not None:
            row = row + (1.0 - profile.alpha[s]) * rho
        rows.append(row)
    return np.array(rows)
