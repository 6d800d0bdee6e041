"""Closed-form asymptotic rate analysis and resolution planning.

Everything here is the large-array limit at fixed user load: the
effective signal to interference-plus-quantization-plus-noise ratio
(SIQNR) behind zero-forcing precoding with finite-bit converters at
both ends, the achievable rate, degradation benchmarks against the
one-sided and ideal systems, low and high SNR rate-loss limits, and the
inverse problem of picking the smallest converter resolution that keeps
the high-SNR rate loss inside a budget.

All rates are base-2 logarithms in bits/s/Hz.  Distortion factors enter
through ``distortion_factor`` (table values); the planners instead use
the high-resolution law ``distortion_factor_approx``, since that is the
model the planning formulas are derived under.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .config import SystemConfig
from .quantization import distortion_factor, distortion_factor_approx

__all__ = [
    "InfeasibleBudget",
    "RateReport",
    "asymptotic_siqnr",
    "asymptotic_rate",
    "benchmark_rates",
    "rate_loss_dac",
    "low_snr_loss_slope",
    "high_snr_loss_dac",
    "plan_dac_bits",
    "plan_dac_bits_approx",
    "plan_adc_bits",
    "rate_grid",
]

_LN2 = math.log(2.0)


class InfeasibleBudget(Exception):
    """Raised when the planning formula has no valid solution.

    The exact DAC planner inverts the high-SNR loss bound under the
    high-resolution distortion law; when the bound's denominator is
    nonpositive the formula's argument leaves its domain (this happens
    when the budget is so loose that the bound cannot bind), and no
    resolution can be computed from it.
    """


def _rho_pair(cfg: SystemConfig) -> tuple[float, float]:
    return distortion_factor(cfg.dac_bits), distortion_factor(cfg.adc_bits)


def _check_load(load: float) -> None:
    if not 0.0 < load < 1.0:
        raise ValueError(f"load must lie in (0, 1), got {load!r}")


def _gain_over_load(load: float) -> float:
    """Array gain factor 1/beta - 1 appearing in every limit."""
    _check_load(load)
    return 1.0 / load - 1.0


def asymptotic_siqnr(cfg: SystemConfig) -> float:
    """Large-array effective SIQNR with finite-bit DACs and ADCs.

    gamma = (1-rho_ad)(1-rho_da)(1/beta - 1) g0
            / (rho_da g0 + rho_ad (1-rho_da)(1/beta - 1) g0 + 1)

    with g0 the transmit SNR.  Reduces to the nominal (1/beta - 1) g0
    for ideal converters and vanishes only as the SNR does.
    """
    rho_da, rho_ad = _rho_pair(cfg)
    g0 = cfg.snr
    gain = _gain_over_load(cfg.load)
    num = (1.0 - rho_ad) * (1.0 - rho_da) * gain * g0
    den = rho_da * g0 + rho_ad * (1.0 - rho_da) * gain * g0 + 1.0
    return num / den


def asymptotic_rate(cfg: SystemConfig) -> float:
    """Achievable rate log2(1 + SIQNR) in bits/s/Hz."""
    return math.log2(1.0 + asymptotic_siqnr(cfg))


@dataclass(frozen=True)
class RateReport:
    """Rate of a converter pairing next to its one-sided benchmarks.

    ``alpha_adc`` and ``alpha_dac`` are the multiplicative SNR penalties
    of quantizing only at the receivers or only at the transmitter;
    ``rate_adc_limited`` and ``rate_dac_limited`` are the corresponding
    benchmark rates, and ``rate_ideal`` the unquantized reference.
    """

    siqnr: float
    rate: float
    rate_adc_limited: float
    rate_dac_limited: float
    rate_ideal: float
    alpha_adc: float
    alpha_dac: float
    nominal_snr: float


def benchmark_rates(cfg: SystemConfig) -> RateReport:
    """Evaluate the rate together with its degradation benchmarks."""
    rho_da, rho_ad = _rho_pair(cfg)
    g0 = cfg.snr
    nominal = _gain_over_load(cfg.load) * g0
    alpha_adc = (1.0 - rho_ad) / (rho_ad * nominal + 1.0)
    alpha_dac = (1.0 - rho_da) / (rho_da * g0 + 1.0)
    return RateReport(
        siqnr=asymptotic_siqnr(cfg),
        rate=asymptotic_rate(cfg),
        rate_adc_limited=math.log2(1.0 + alpha_adc * nominal),
        rate_dac_limited=math.log2(1.0 + alpha_dac * nominal),
        rate_ideal=math.log2(1.0 + nominal),
        alpha_adc=alpha_adc,
        alpha_dac=alpha_dac,
        nominal_snr=nominal,
    )


def rate_loss_dac(cfg: SystemConfig) -> float:
    """Rate lost to the finite-bit DAC at the given ADC resolution.

    The difference between the ideal-DAC benchmark and the actual rate;
    nonnegative, and zero for an ideal DAC.
    """
    report = benchmark_rates(cfg)
    return report.rate_adc_limited - report.rate


def low_snr_loss_slope(cfg: SystemConfig) -> float:
    """Leading coefficient of the DAC rate loss as the SNR goes to zero.

    The loss behaves like slope * g0 with
    slope = rho_da (1 - rho_ad)(1/beta - 1) / ln 2, so finite-bit DACs
    cost essentially nothing in the noise-limited regime.
    """
    rho_da, rho_ad = _rho_pair(cfg)
    return rho_da * (1.0 - rho_ad) * _gain_over_load(cfg.load) / _LN2


def high_snr_loss_dac(dac_bits, adc_bits, load: float, rho_source: str = "table") -> float:
    """Limit of the DAC rate loss as the SNR grows without bound.

    loss = log2(1 + (1/rho_ad - 1) / ((1/rho_da - 1)(1/beta - 1) + 1))

    ``rho_source`` selects where the distortion factors come from:
    ``"table"`` for the tabulated values the rate formulas use, or
    ``"approx"`` for the high-resolution law the planner is derived
    under.  Both views are worth reporting when auditing a plan.
    """
    if rho_source == "table":
        rho_da, rho_ad = distortion_factor(dac_bits), distortion_factor(adc_bits)
    elif rho_source == "approx":
        rho_da, rho_ad = distortion_factor_approx(dac_bits), distortion_factor_approx(adc_bits)
    else:
        raise ValueError(f"rho_source must be 'table' or 'approx', got {rho_source!r}")
    gain = _gain_over_load(load)
    if rho_da == 0.0:
        return 0.0
    return math.log2(1.0 + (1.0 / rho_ad - 1.0) / ((1.0 / rho_da - 1.0) * gain + 1.0))


def _ceil_guard(x: float) -> int:
    """Ceiling with a round-off guard so near-integers are not bumped."""
    return math.ceil(x - 1e-9)


def plan_dac_bits(adc_bits, loss_budget: float, load: float) -> int:
    """Smallest DAC resolution keeping the high-SNR rate loss in budget.

    Inverts the high-SNR loss bound exactly under the high-resolution
    distortion law.  Raises :class:`InfeasibleBudget` when the bound's
    denominator is nonpositive and the formula has no solution.
    """
    if loss_budget <= 0:
        raise ValueError(f"loss_budget must be positive, got {loss_budget!r}")
    gain = _gain_over_load(load)
    rho_ad = distortion_factor_approx(adc_bits)
    budget_factor = 2.0**loss_budget - 1.0
    den = budget_factor * gain + 1.0 / rho_ad - 2.0**loss_budget
    if den <= 0.0:
        raise InfeasibleBudget(
            f"planning bound degenerate for adc_bits={adc_bits}, "
            f"loss_budget={loss_budget}, load={load}: the loss bound cannot "
            f"bind (denominator {den:.6g} <= 0)"
        )
    rho_max = budget_factor * gain / den
    bits = _ceil_guard(-0.5 * math.log2(2.0 / (math.sqrt(3.0) * math.pi) * rho_max))
    return max(bits, 1)


def plan_dac_bits_approx(adc_bits, loss_budget: float, load: float, variant: str = "a") -> int:
    """High-resolution approximations of the DAC planner.

    Variant ``"a"`` keeps the (1/beta - 1) array gain; variant ``"b"``
    further replaces it by 1/beta, valid for small load.  Exposed for
    comparison against the exact inversion, not as substitutes.
    """
    if loss_budget <= 0:
        raise ValueError(f"loss_budget must be positive, got {loss_budget!r}")
    budget_term = 0.5 * math.log2(2.0**loss_budget - 1.0)
    if variant == "a":
        x = adc_bits - budget_term - 0.5 * math.log2(_gain_over_load(load))
    elif variant == "b":
        _check_load(load)
        x = adc_bits - budget_term + 0.5 * math.log2(load)
    else:
        raise ValueError(f"variant must be 'a' or 'b', got {variant!r}")
    return max(_ceil_guard(x), 1)


def plan_adc_bits(dac_bits, loss_budget: float, load: float) -> int:
    """ADC resolution keeping the high-SNR ADC-side loss in budget.

    Evaluates the high-resolution inversion, which is always defined;
    the result is floored at one bit.
    """
    if loss_budget <= 0:
        raise ValueError(f"loss_budget must be positive, got {loss_budget!r}")
    _check_load(load)
    x = dac_bits - 0.5 * math.log2(2.0**loss_budget - 1.0) - 0.5 * math.log2(load)
    return max(_ceil_guard(x), 1)


def rate_grid(cfg: SystemConfig, dac_bits_grid, adc_bits_grid) -> np.ndarray:
    """Closed-form rate over a grid of converter resolutions.

    Returns a matrix with one row per DAC resolution and one column per
    ADC resolution, evaluated at the template's load and SNR.
    """
    dac_bits_grid = list(dac_bits_grid)
    adc_bits_grid = list(adc_bits_grid)
    if not dac_bits_grid or not adc_bits_grid:
        raise ValueError("bit grids must be non-empty")
    out = np.empty((len(dac_bits_grid), len(adc_bits_grid)))
    for i, b_da in enumerate(dac_bits_grid):
        for j, b_ad in enumerate(adc_bits_grid):
            out[i, j] = asymptotic_rate(replace(cfg, dac_bits=b_da, adc_bits=b_ad))
    return out
