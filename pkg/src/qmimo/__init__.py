"""Massive MIMO downlink rate analysis with low-resolution converters.

The package splits into closed-form analysis (``analysis``), quantizer
design and converter models (``quantization``), channel and precoding
primitives (``channel``, ``precoding``), a reproducible Monte Carlo
engine (``montecarlo``), and a CSV-emitting command line (``cli``).
"""

from .analysis import (
    InfeasibleBudget,
    RateReport,
    asymptotic_rate,
    asymptotic_siqnr,
    benchmark_rates,
    high_snr_loss_dac,
    low_snr_loss_slope,
    plan_adc_bits,
    plan_dac_bits,
    plan_dac_bits_approx,
    rate_grid,
    rate_loss_dac,
)
from .channel import complex_gaussian, generate_channel, sample_noise, sample_symbols
from .config import SystemConfig
from .montecarlo import (
    ConvergencePoint,
    SimEstimate,
    SimulationError,
    TermBreakdown,
    TrialResult,
    convergence_study,
    estimate_rate,
    per_term_breakdown,
    simulate_trial,
)
from .precoding import SingularChannel, ZfPrecoder, diag_of_gram, wishart_trace, zf_precoder
from .quantization import (
    QuantizerCodebook,
    ZeroPowerInput,
    apply_adc,
    apply_dac,
    bussgang_adc,
    bussgang_dac,
    codebook_distortion,
    design_lloyd_max,
    distortion_factor,
    distortion_factor_approx,
    load_codebook,
    quantize_real,
    save_codebook,
)
from .rng import substream

__version__ = "0.1.0"
