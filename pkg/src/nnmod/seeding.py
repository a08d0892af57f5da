"""Deterministic seed derivation shared by every stochastic operation.

All randomness in the library flows through a Philox counter-based generator
keyed by a 64-bit user seed plus integer stream tags. Deriving sub-keys with
splitmix64 keeps parallel Monte Carlo blocks reproducible regardless of
execution order or thread count.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 step; the standard 64-bit finalizer-style mixer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_key(seed: int, *stream: int) -> tuple[int, int]:
    """Mix a user seed and stream tags into a 2-word Philox key."""
    a = splitmix64(seed & _MASK64)
    b = splitmix64(a ^ 0xD6E8FEB86659FD93)
    for tag in stream:
        a = splitmix64(a ^ (tag & _MASK64))
        b = splitmix64(b ^ splitmix64(tag & _MASK64))
    return a, b


def rng_from_seed(seed: int, *stream: int) -> np.random.Generator:
    """Generator for (seed, stream...) that is stable across runs and platforms."""
    key = derive_key(seed, *stream)
    return np.random.Generator(np.random.Philox(key=np.array(key, dtype=np.uint64)))
