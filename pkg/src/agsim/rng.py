"""Seeded random streams. One master seed per run, split into independent substreams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNIFORM_BLOCK = 4096


@dataclass
class RunStreams:
    shadowing: np.random.Generator
    per: np.random.Generator


def run_streams(seed: int) -> RunStreams:
    # Spawned children stay independent, so turning shadowing off does not
    # shift the PER draws and vice versa.
    shadow_seq, per_seq = np.random.SeedSequence(int(seed)).spawn(2)
    return RunStreams(np.random.Generator(np.random.PCG64(shadow_seq)),
                      np.random.Generator(np.random.PCG64(per_seq)))


def uniform_refill(rng: np.random.Generator, block: int = UNIFORM_BLOCK):
    """Callable handing out fresh blocks of U[0, 1) doubles from ``rng``."""

    def refill():
        return rng.random(block)

    return refill
