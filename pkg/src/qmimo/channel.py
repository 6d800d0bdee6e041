"""Rayleigh channel, symbol, and noise sampling.

Channel entries are i.i.d. circularly symmetric complex Gaussian with
unit variance (real and imaginary parts each N(0, 1/2)), the standard
rich-scattering model.  Transmit symbols and receiver noise use the same
distribution with their own variances.
"""

from __future__ import annotations

import numpy as np

from .config import SystemConfig

__all__ = [
    "complex_gaussian",
    "generate_channel",
    "sample_symbols",
    "sample_noise",
]


def complex_gaussian(shape, rng: np.random.Generator, variance: float = 1.0) -> np.ndarray:
    """Draw i.i.d. CN(0, variance) samples of the given shape."""
    scale = np.sqrt(variance / 2.0)
    return rng.normal(0.0, scale, shape) + 1j * rng.normal(0.0, scale, shape)


def generate_channel(cfg: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """Sample one (M, N) downlink channel matrix for the given scenario."""
    return complex_gaussian((cfg.n_users, cfg.n_antennas), rng)


def sample_symbols(n_users: int, rng: np.random.Generator, n_vectors: int | None = None) -> np.ndarray:
    """Draw unit-power Gaussian data symbols.

    Returns shape ``(n_users,)`` when ``n_vectors`` is None, else
    ``(n_users, n_vectors)`` with one column per channel use.
    """
    shape = (n_users,) if n_vectors is None else (n_users, n_vectors)
    return complex_gaussian(shape, rng)


def sample_noise(n_users: int, noise_power: float,
                 rng: np.random.Generator, n_vectors: int | None = None) -> np.ndarray:
    """Draw receiver noise with per-entry variance ``noise_power``.

    A zero noise power is allowed as a degenerate case and yields an
    all-zero array of the requested shape.
    """
    if noise_power < 0:
        raise ValueError(f"noise_power must be nonnegative, got {noise_power!r}")
    shape = (n_users,) if n_vectors is None else (n_users, n_vectors)
    if noise_power == 0:
        return np.zeros(shape, dtype=complex)
    return complex_gaussian(shape, rng, variance=noise_power)
