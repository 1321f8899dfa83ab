# src/utils/sampling.py
"""
Reproducible random streams for the Monte Carlo runners.

Every stream is PCG64 seeded from SeedSequence(seed, spawn_key=(index,)), so a
block of trials is fully determined by (seed, block index) no matter which
worker runs it. Gaussian pairs come from the Box-Muller transform:

    r = sqrt(-2 ln(1 - u1)),  z0 = r cos(2 pi u2),  z1 = r sin(2 pi u2)

with u1, u2 uniform on [0, 1) drawn in that order.
"""
from typing import Tuple

import numpy as np

SEED_MASK = (1 << 64) - 1


def substream(seed: int, index: int = 0) -> np.random.Generator:
    sequence = np.random.SeedSequence(entropy=int(seed) & SEED_MASK, spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(sequence))


def box_muller(rng: np.random.Generator, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """n independent standard normal pairs."""
    uniforms = rng.random((2, n))
    radius = np.sqrt(-2.0 * np.log1p(-uniforms[0]))
    angle = 2.0 * np.pi * uniforms[1]
    return radius * np.cos(angle), radius * np.sin(angle)
