"""Loading environments and tabular policies from YAML/JSON files.

Environment files use the keys ``states``, ``actions``, ``horizon``,
``r_max``, ``rewards``, ``transitions`` and ``initial``.
``states`` and ``actions`` are either counts or lists of labels.
"""

from typing import Any, Dict, Tuple, Union
from pathlib import Path

import yaml

from .types import CorePolicy, EnvSpec, GuidePolicy, TabularPolicy


__all__ = (
    'read_structured',
    'env_from_dict',
    'load_env',
    'load_guide',
    'load_core',
    'load_tabular_policy',
)


def read_structured(path: Union[str, Path]) -> Dict[str, Any]:
    """Reads a YAML (or JSON, being a subset) mapping from ``path``.

    :raises ValueError: the document is not a mapping
    """
    with open(path, 'r', encoding='utf-8') as fh:
        data = yaml.load(fh.read(), Loader=yaml.SafeLoader)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a mapping at top level")
    return data


def _count_and_labels(value: Any) -> Tuple[int, Tuple[str, ...]]:
    if isinstance(value, list):
        return len(value), tuple(str(v) for v in value)
    return int(value), ()


def env_from_dict(data: Dict[str, Any]) -> EnvSpec:
    """Builds an :class:`~policy_core.types.EnvSpec` from a mapping
    with the file key names.

    :raises pydantic.ValidationError:
    """
    state_count, state_labels = _count_and_labels(data.get('states'))
    action_count, action_labels = _count_and_labels(data.get('actions'))
    return EnvSpec(
        state_count=state_count,
        action_count=action_count,
        horizon=data.get('horizon'),
        r_max=data.get('r_max'),
        reward_table=data.get('rewards'),
        transition=data.get('transitions'),
        initial_dist=data.get('initial'),
        state_labels=state_labels,
        action_labels=action_labels,
    )


def load_env(path: Union[str, Path]) -> EnvSpec:
    return env_from_dict(read_structured(path))


def load_guide(path: Union[str, Path]) -> GuidePolicy:
    """Loads a tabular guide: ``strategies`` (list of ids)
    and ``probabilities`` (one row per state)."""
    data = read_structured(path)
    return GuidePolicy.tabular(
        data.get('probabilities'),
        data.get('strategies'))


def load_core(path: Union[str, Path]) -> CorePolicy:
    """Loads a tabular core: ``strategies`` and ``probabilities``
    indexed ``[state][strategy][action]``."""
    data = read_structured(path)
    return CorePolicy.tabular(
        data.get('probabilities'),
        data.get('strategies'))


def load_tabular_policy(path: Union[str, Path]) -> TabularPolicy:
    """Loads a plain action policy: ``probabilities`` indexed
    ``[state][action]``."""
    return TabularPolicy(probabilities=read_structured(path).get(
        'probabilities'))
