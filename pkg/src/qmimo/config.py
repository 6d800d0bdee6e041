"""System-level configuration shared by analysis and simulation."""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["SystemConfig"]


def _normalize_bits(value, name: str):
    """Validate a converter resolution: an integer >= 1 or math.inf."""
    if value == math.inf:
        return math.inf
    if isinstance(value, bool):
        raise ValueError(f"{name} must be an integer >= 1 or math.inf, got {value!r}")
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"{name} must be an integer >= 1 or math.inf, got {value!r}")
        value = int(value)
    if not isinstance(value, int):
        raise ValueError(f"{name} must be an integer >= 1 or math.inf, got {value!r}")
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return value


@dataclass(frozen=True)
class SystemConfig:
    """Downlink scenario: array size, user count, power budget, resolutions.

    Attributes
    ----------
    n_antennas : int
        Base station antennas N.
    n_users : int
        Single-antenna users M, strictly fewer than ``n_antennas``.
    total_power : float
        Transmit power budget P shared by all antennas.
    noise_power : float
        Receiver thermal noise variance per user.
    dac_bits, adc_bits : int or math.inf
        Converter resolution in bits per real dimension.  ``math.inf``
        selects the unquantized (ideal) converter.
    """

    n_antennas: int
    n_users: int
    total_power: float
    noise_power: float
    dac_bits: float = math.inf
    adc_bits: float = math.inf

    def __post_init__(self):
        if not isinstance(self.n_antennas, int) or self.n_antennas < 1:
            raise ValueError(f"n_antennas must be a positive integer, got {self.n_antennas!r}")
        if not isinstance(self.n_users, int) or self.n_users < 1:
            raise ValueError(f"n_users must be a positive integer, got {self.n_users!r}")
        if self.n_users >= self.n_antennas:
            raise ValueError(
                f"n_users must be smaller than n_antennas for zero-forcing, "
                f"got M={self.n_users}, N={self.n_antennas}"
            )
        if not self.total_power > 0:
            raise ValueError(f"total_power must be positive, got {self.total_power!r}")
        if not self.noise_power > 0:
            raise ValueError(f"noise_power must be positive, got {self.noise_power!r}")
        object.__setattr__(self, "dac_bits", _normalize_bits(self.dac_bits, "dac_bits"))
        object.__setattr__(self, "adc_bits", _normalize_bits(self.adc_bits, "adc_bits"))

    @property
    def load(self) -> float:
        """User load beta = M / N."""
        return self.n_users / self.n_antennas

    @property
    def snr(self) -> float:
        """Transmit SNR P / noise_power (linear scale)."""
        return self.total_power / self.noise_power

    @classmethod
    def with_snr(cls, n_antennas: int, n_users: int, snr: float,
                 dac_bits=math.inf, adc_bits=math.inf,
                 total_power: float = 1.0) -> "SystemConfig":
        """Build a config from a target transmit SNR at unit power."""
        if not snr > 0:
            raise ValueError(f"snr must be positive, got {snr!r}")
        return cls(
            n_antennas=n_antennas,
            n_users=n_users,
            total_power=total_power,
            noise_power=total_power / snr,
            dac_bits=dac_bits,
            adc_bits=adc_bits,
        )
