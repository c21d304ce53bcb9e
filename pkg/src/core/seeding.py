import zlib
from typing import Union

import numpy as np

SeedKeyT = Union[int, float, str]


def _key_to_int(key: SeedKeyT) -> int:
    if isinstance(key, int) and key >= 0:
        return key
    return zlib.crc32(repr(key).encode("utf-8"))


def derive_rng(seed: int, *keys: SeedKeyT) -> np.random.Generator:
    """
    Derives an independent random generator from a base seed and a tuple of keys.

    The derivation only depends on its arguments, so work split across threads draws the same numbers
    whatever the scheduling.

    Args:
        seed (int): The base seed.
        *keys (SeedKeyT): Keys identifying the consumer (start index, exponent, experiment name...).

    Returns:
        np.random.Generator: A generator seeded from (seed, keys).
    """
    entropy = [_key_to_int(seed)] + [_key_to_int(key) for key in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(seed: int, *keys: SeedKeyT) -> int:
    """
    Derives a nonnegative integer seed from a base seed and a tuple of keys.
    """
    return int(derive_rng(seed, *keys).integers(2 ** 63))
