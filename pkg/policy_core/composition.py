"""Exact guide–core composition."""

import logging

import numpy as np

from .exceptions import DimensionMismatch, NotTabular, StrategySpaceMismatch
from .types import ComposedPolicy, CorePolicy, GuidePolicy


__all__ = (
    'compose',
    'check_strategy_spaces',
)


log = logging.getLogger(__name__)


def check_strategy_spaces(guide: GuidePolicy, core: CorePolicy) -> None:
    """:raises policy_core.exceptions.StrategySpaceMismatch:"""
    if guide.strategy_space != core.strategy_space:
        raise StrategySpaceMismatch(
            "Guide and core strategy spaces differ",
            guide.strategy_space,
            core.strategy_space)


def compose(guide: GuidePolicy, core: CorePolicy) -> ComposedPolicy:
    """Composes a tabular guide with a tabular core into
    the induced action policy
    π_gc(a | s) = Σ_z π_g(z | s) · π_c(a | s, z).

    :raises policy_core.exceptions.NotTabular:
        either policy is external (exact composition needs tables)
    :raises policy_core.exceptions.StrategySpaceMismatch:
    :raises policy_core.exceptions.DimensionMismatch:
        guide and core cover different numbers of states
    """
    if not guide.is_tabular or not core.is_tabular:
        raise NotTabular("Exact composition requires tabular guide and core")

    check_strategy_spaces(guide, core)

    guide_probs = guide.probabilities
    core_probs = core.probabilities
    assert guide_probs is not None and core_probs is not None

    if guide_probs.shape[0] != core_probs.shape[0]:
        raise DimensionMismatch(
            "Guide covers %s states, core covers %s" % (
                guide_probs.shape[0], core_probs.shape[0]))

    composed = np.einsum('sz,sza->sa', guide_probs, core_probs)

    log.debug(
        "Composed %s states × %s strategies × %s actions",
        *core_probs.shape)

    return ComposedPolicy(
        probabilities=composed,
        strategy_space=guide.strategy_space,
        guide=guide,
        core=core,
    )
