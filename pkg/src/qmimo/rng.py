"""Reproducible random number streams for parallel simulation.

Every stochastic routine in this package takes an explicit
``numpy.random.Generator``.  For parallel Monte Carlo runs we need one
independent stream per trial, reconstructible from a single master seed
regardless of how trials are distributed over workers.  ``substream``
builds such streams from a counter-based bit generator keyed by the
trial's position in the experiment, so trial ``i`` sees the same draws
whether it runs first on one process or last on eight.
"""

from __future__ import annotations

import numpy as np

__all__ = ["substream"]


def substream(master_seed: int, *key: int) -> np.random.Generator:
    """Return an independent Generator for the given master seed and key.

    Parameters
    ----------
    master_seed : int
        Experiment-level seed, nonnegative.
    *key : int
        Position of this stream within the experiment, for example
        ``(block_index, trial_index)``.  Streams with different keys are
        statistically independent; the same ``(master_seed, key)`` pair
        always yields identical draws.
    """
    if master_seed < 0:
        raise ValueError(f"master_seed must be nonnegative, got {master_seed}")
    if any(k < 0 for k in key):
        raise ValueError(f"stream key entries must be nonnegative, got {key}")
    seq = np.random.SeedSequence(master_seed, spawn_key=key)
    return np.random.Generator(np.random.Philox(seq))
