"""Single-knob seed derivation.

Every random choice in the package flows from one base seed.  Stage seeds are
derived with a fixed rule so results are reproducible across platforms and
numpy versions:

    derive_seed(seed, *parts) = first 8 bytes (big-endian) of
        SHA-256("seed/part1/part2/...")

Derived seeds feed ``numpy.random.Generator(PCG64(seed))``, the package's
fixed PRNG.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(base_seed: int, *parts: object) -> int:
    """Map (base seed, stage tags) to a 64-bit child seed."""
    text = "/".join(str(p) for p in (base_seed, *parts))
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def generator(seed: int) -> np.random.Generator:
    """The package-wide PRNG: PCG64 seeded directly with ``seed``."""
    return np.random.Generator(np.random.PCG64(seed))
