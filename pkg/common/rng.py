"""Seeding helpers.

Every stochastic operation takes an explicit integer seed.
Generators use the counter-based Philox bit generator;
independent streams are derived by keying a :class:`numpy.random.SeedSequence`
with the parent seed plus integer keys, so that a stream depends only
on *what* it is for (e.g. problem, round, trial), not on execution order.
"""

from typing import Union
import hashlib

import numpy as np


__all__ = (
    'SEED_MASK',
    'make_rng',
    'derive_seed',
    'text_key',
    'uniform_draw',
)


SEED_MASK = (1 << 64) - 1
"""Seeds are 64-bit; larger integers are folded into this range."""


Key = Union[int, str]


def text_key(text: str) -> int:
    """Stable 64-bit key for a string (unlike :func:`hash`,
    independent of ``PYTHONHASHSEED``)."""
    digest = hashlib.sha256(text.encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'big')


def _entropy(seed: int, *keys: Key):
    return [
        seed & SEED_MASK,
        *(text_key(k) if isinstance(k, str) else (k & SEED_MASK)
          for k in keys),
    ]


def make_rng(seed: int, *keys: Key) -> np.random.Generator:
    """Returns a Philox-backed generator for ``seed``,
    optionally specialised by ``keys`` (ints or strings)."""
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence(_entropy(seed, *keys))))


def derive_seed(seed: int, *keys: Key) -> int:
    """Derives a child 64-bit seed from ``seed`` and ``keys``."""
    state = np.random.SeedSequence(
        _entropy(seed, *keys)).generate_state(1, np.uint64)
    return int(state[0])


def uniform_draw(seed: int, *keys: Key) -> float:
    """A single uniform ``[0, 1)`` draw determined by seed and keys.

    Cheaper than building a generator when only one number is needed.
    """
    return (derive_seed(seed, *keys) >> 11) * (1.0 / (1 << 53))
