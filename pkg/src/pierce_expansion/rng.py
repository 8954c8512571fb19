"""Reproducible random streams.

Every sample gets its own generator: ``SeedSequence(seed, spawn_key=(stream,
index))`` is expanded to 256 bits of entropy that seed a Mersenne Twister
(:class:`random.Random`). A sample therefore does not depend on which worker
draws it or in what order, which keeps reports byte-identical for any number
of workers. Mersenne Twister gives exact uniform draws of arbitrarily large
integers.
"""
from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from ._validation import check_seed

# stream identifiers; distinct streams never share generator state
UNIFORM_STREAM = 1
ETA_STREAM = 2


def sample_generator(seed: int, stream: int, index: int) -> random.Random:
    seq = np.random.SeedSequence(check_seed(seed), spawn_key=(stream, index))
    state = seq.generate_state(8, dtype=np.uint32)
    return random.Random(int.from_bytes(state.tobytes(), "little"))


def randbits(gen: random.Random, bits: int) -> int:
    return gen.getrandbits(bits)


def randbelow(gen: random.Random, n: int) -> int:
    """Uniform integer in ``[0, n)`` for arbitrarily large ``n``."""
    if n <= 0:
        raise ValueError("n must be positive")
    return gen.randrange(n)


def bernoulli(gen: random.Random, p: Fraction) -> bool:
    """Exact Bernoulli(p) draw for a rational ``p``."""
    return gen.randrange(p.denominator) < p.numerator
