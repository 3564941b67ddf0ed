"""Saving and restoring trained guides as YAML."""

from typing import Tuple, Union
from pathlib import Path

import yaml
from pydantic import ValidationError

from common.pydantic import format_validation_errors

from .exceptions import CheckpointError
from .types import TabularGuideParams, TrainConfig


__all__ = (
    'save_checkpoint',
    'load_checkpoint',
)


def save_checkpoint(
    path: Union[str, Path],
    params: TabularGuideParams,
    config: TrainConfig,
) -> None:
    """Writes logits, reference logits and training settings.

    Floats are written with full precision,
    so that a reloaded guide is identical.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = {
        'strategy_space': list(params.strategy_space),
        'temperature': params.temperature,
        'logits': params.logits.tolist(),
        'reference_logits': params.reference_logits.tolist(),
        'config': config.dict(),
    }
    with open(path, 'w', encoding='utf-8') as fh:
        yaml.safe_dump(data, fh, sort_keys=True)


def load_checkpoint(path: Union[str, Path]) \
        -> Tuple[TabularGuideParams, TrainConfig]:
    """
    :raises guide_trainer.exceptions.CheckpointError:
    """
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            data = yaml.safe_load(fh)
    except (OSError, yaml.YAMLError) as err:
        raise CheckpointError(f"Cannot read checkpoint {path}: {err}")
    if not isinstance(data, dict):
        raise CheckpointError(f"Checkpoint {path} is not a mapping")

    try:
        config = TrainConfig(**(data.pop('config', None) or {}))
        params = TabularGuideParams(**data)
    except ValidationError as err:
        raise CheckpointError("Invalid checkpoint %s: %s" % (
            path, '; '.join(format_validation_errors(err))))
    return params, config
