import math

import numpy as np
import pytest
from scipy.stats import norm

from qmimo import (
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
    substream,
)
from qmimo.quantization import HIGH_RES_COEFF, REFERENCE_DISTORTION


# ---------------------------------------------------------------- lookups

def test_distortion_table_values():
    assert REFERENCE_DISTORTION == {
        1: 0.3634, 2: 0.1175, 3: 0.03454, 4: 0.009497,
        5: 0.002499, 6: 0.0006642, 7: 0.0001660, 8: 0.00004151,
    }
    assert distortion_factor(2) == 0.1175
    assert distortion_factor(5) == 0.002499


def test_distortion_factor_handles_ideal_and_high_resolution():
    assert distortion_factor(math.inf) == 0.0
    assert distortion_factor(9) == distortion_factor_approx(9)
    assert distortion_factor(4.0) == distortion_factor(4)


@pytest.mark.parametrize("bad", [0, -1, 2.5, True])
def test_distortion_factor_rejects_bad_bits(bad):
    with pytest.raises(ValueError):
        distortion_factor(bad)


def test_high_resolution_law_values():
    assert HIGH_RES_COEFF == pytest.approx(math.pi * math.sqrt(3.0) / 2.0, rel=1e-15)
    assert distortion_factor_approx(3) == pytest.approx(0.04251092259923948, rel=1e-14)
    assert distortion_factor_approx(10) == pytest.approx(2.5946608031762376e-06, rel=1e-14)
    assert distortion_factor_approx(math.inf) == 0.0
    # The law overshoots the designed value at low resolution; both are
    # legitimate and used in different places, so just pin the ordering.
    assert distortion_factor_approx(3) > REFERENCE_DISTORTION[3]


# ------------------------------------------------------------ design

def test_one_bit_codebook_in_closed_form():
    cb = design_lloyd_max(1)
    level = math.sqrt(2.0 / math.pi)
    assert cb.bits == 1
    np.testing.assert_allclose(cb.thresholds, [0.0], atol=1e-12)
    np.testing.assert_allclose(cb.levels, [-level, level], rtol=1e-10)
    assert cb.rho == pytest.approx(1.0 - 2.0 / math.pi, rel=1e-10)


@pytest.mark.parametrize("bits", [2, 4, 6, 8])
def test_codebook_structure(bits):
    cb = design_lloyd_max(bits)
    assert cb.thresholds.shape == (2**bits - 1,)
    assert cb.levels.shape == (2**bits,)
    assert np.all(np.diff(cb.thresholds) > 0)
    assert np.all(np.diff(cb.levels) > 0)
    # Symmetric about zero.
    np.testing.assert_allclose(cb.thresholds, -cb.thresholds[::-1], atol=1e-12)
    np.testing.assert_allclose(cb.levels, -cb.levels[::-1], atol=1e-12)
    # Each level sits inside its own cell.
    edges = np.concatenate(([-np.inf], cb.thresholds, [np.inf]))
    assert np.all(cb.levels > edges[:-1]) and np.all(cb.levels < edges[1:])


@pytest.mark.parametrize("bits", [2, 4, 6, 8])
def test_design_satisfies_the_fixed_point_conditions(bits):
    cb = design_lloyd_max(bits)
    edges = np.concatenate(([-np.inf], cb.thresholds, [np.inf]))
    p = np.diff(norm.cdf(edges))
    centroids = -np.diff(norm.pdf(edges)) / p
    np.testing.assert_allclose(cb.levels, centroids, atol=1e-8)
    midpoints = 0.5 * (cb.levels[:-1] + cb.levels[1:])
    np.testing.assert_allclose(cb.thresholds, midpoints, atol=1e-8)


def test_stored_rho_matches_the_analytic_distortion():
    for bits in range(1, 9):
        cb = design_lloyd_max(bits)
        assert abs(codebook_distortion(cb.thresholds, cb.levels) - cb.rho) < 1e-4


def test_distortion_decreases_with_resolution():
    rhos = [design_lloyd_max(b).rho for b in range(1, 13)]
    assert all(a > b for a, b in zip(rhos, rhos[1:]))
    # Quartering per extra bit in the high-resolution regime.
    for lo, hi in zip(rhos[4:-1], rhos[5:]):
        assert 3.5 < lo / hi < 4.5


def test_designed_distortion_tracks_a_sample_estimate():
    cb = design_lloyd_max(4)
    z = substream(31).standard_normal(10**6)
    sample = np.mean((quantize_real(z, cb) - z) ** 2)
    assert sample == pytest.approx(cb.rho, rel=0.02)


def test_design_is_cached_and_immutable():
    cb = design_lloyd_max(5)
    assert design_lloyd_max(5) is cb
    with pytest.raises(ValueError):
        cb.thresholds[0] = 0.0


@pytest.mark.parametrize("bad", [0, 13, -3, 2.5, True])
def test_design_rejects_unsupported_bits(bad):
    with pytest.raises(ValueError):
        design_lloyd_max(bad)


def test_codebook_distortion_validates_sizes():
    with pytest.raises(ValueError):
        codebook_distortion(np.array([0.0]), np.array([1.0]))


# ------------------------------------------------------------ application

def complex_block(rng, shape=(10**5,), scale=1.0):
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def test_quantize_real_picks_the_nearest_level():
    cb = design_lloyd_max(3)
    z = substream(17).uniform(-4, 4, 1000)
    q = quantize_real(z, cb)
    brute = cb.levels[np.argmin(np.abs(z[:, None] - cb.levels[None, :]), axis=1)]
    np.testing.assert_array_equal(q, brute)


def test_quantize_real_is_idempotent_on_levels():
    cb = design_lloyd_max(4)
    np.testing.assert_array_equal(quantize_real(cb.levels, cb), cb.levels)


def test_quantize_real_sign_convention_around_zero():
    cb = design_lloyd_max(1)
    level = cb.levels[1]
    assert quantize_real(-1e-9, cb) == -level
    assert quantize_real(1e-9, cb) == level
    # Ties on a threshold go to the upper cell.
    assert quantize_real(0.0, cb) == level


def test_quantize_real_saturates():
    cb = design_lloyd_max(5)
    assert quantize_real(1e6, cb) == cb.levels[-1]
    assert quantize_real(-1e6, cb) == cb.levels[0]


def test_ideal_converters_pass_signals_through():
    x = complex_block(substream(40), scale=2.0)
    np.testing.assert_array_equal(apply_dac(x, None), x)
    np.testing.assert_array_equal(apply_adc(x, None), x)


def test_dac_preserves_average_power():
    x = complex_block(substream(41), scale=2.0)
    out = apply_dac(x, design_lloyd_max(3))
    ratio = np.mean(np.abs(out) ** 2) / np.mean(np.abs(x) ** 2)
    assert ratio == pytest.approx(1.0, abs=0.01)


def test_dac_error_power_before_restoration_matches_rho():
    cb = design_lloyd_max(1)
    x = complex_block(substream(42))
    quantized = apply_dac(x, cb) * math.sqrt(1.0 - cb.rho)
    ratio = np.mean(np.abs(quantized - x) ** 2) / np.mean(np.abs(x) ** 2)
    assert ratio == pytest.approx(cb.rho, rel=0.02)


def test_adc_error_power_matches_rho():
    cb = design_lloyd_max(4)
    y = complex_block(substream(43), scale=0.3)
    out = apply_adc(y, cb)
    ratio = np.mean(np.abs(out - y) ** 2) / np.mean(np.abs(y) ** 2)
    assert ratio == pytest.approx(cb.rho, rel=0.02)


def test_adc_quantization_error_is_uncorrelated_with_the_input():
    cb = design_lloyd_max(2)
    y = complex_block(substream(44), shape=(10**6,))
    out = apply_adc(y, cb)
    err = out - (1.0 - cb.rho) * y
    num = np.abs(np.vdot(err, y))
    den = math.sqrt(np.vdot(err, err).real * np.vdot(y, y).real)
    assert num / den < 0.01


def test_gain_control_is_scale_invariant():
    cb = design_lloyd_max(4)
    y = complex_block(substream(45), shape=(4, 100), scale=0.7)
    np.testing.assert_allclose(apply_adc(3.5 * y, cb), 3.5 * apply_adc(y, cb),
                               rtol=1e-12, atol=1e-14)


def test_linear_and_true_models_agree_on_output_power():
    # Same second moment per entry for Gaussian blocks, the claim that
    # justifies swapping the true converter for its linear model.
    rng = substream(46)
    for bits in (3, 6):
        cb = design_lloyd_max(bits)
        x = complex_block(rng, shape=(4, 50000), scale=1.3)
        true_power = np.mean(np.abs(apply_dac(x, cb)) ** 2, axis=1)
        linear = bussgang_dac(x, cb.rho, np.mean(np.abs(x) ** 2), rng)
        linear_power = np.mean(np.abs(linear) ** 2, axis=1)
        np.testing.assert_allclose(true_power, linear_power, rtol=0.03)


def test_zero_power_input_is_rejected():
    cb = design_lloyd_max(3)
    with pytest.raises(ZeroPowerInput):
        apply_dac(np.zeros(16, dtype=complex), cb)
    with pytest.raises(ZeroPowerInput):
        apply_adc(np.zeros((2, 4), dtype=complex), cb)


def test_purely_real_blocks_keep_a_zero_imaginary_part():
    cb = design_lloyd_max(3)
    x = substream(47).standard_normal(1000).astype(complex)
    out = apply_adc(x, cb)
    assert np.all(out.imag == 0)
    assert np.any(out.real != 0)


# ------------------------------------------------------- linear models

def test_bussgang_dac_zero_rho_is_identity():
    x = complex_block(substream(48), shape=(8,))
    np.testing.assert_array_equal(bussgang_dac(x, 0.0, 1.0, substream(0)), x)
    np.testing.assert_array_equal(bussgang_adc(x, 0.0, 1.0, substream(0)), x)


@pytest.mark.parametrize("rho", [-0.1, 1.0, 1.5])
def test_bussgang_rho_range_is_validated(rho):
    x = np.ones(4, dtype=complex)
    with pytest.raises(ValueError):
        bussgang_dac(x, rho, 1.0, substream(0))
    with pytest.raises(ValueError):
        bussgang_adc(x, rho, 1.0, substream(0))


def test_bussgang_dac_moments():
    rho = 0.1175
    rng = substream(49)
    x = complex_block(rng, shape=(10**6,), scale=1.0) / math.sqrt(2)
    out = bussgang_dac(x, rho, 1.0, rng)
    noise = out - math.sqrt(1.0 - rho) * x
    # Power preservation and the stated noise variance.
    assert np.mean(np.abs(out) ** 2) == pytest.approx(1.0, rel=0.01)
    assert np.mean(np.abs(noise) ** 2) == pytest.approx(rho, rel=0.02)
    assert abs(np.corrcoef(noise.real, x.real)[0, 1]) < 0.01


def test_bussgang_adc_moments():
    rho = 0.1
    rng = substream(50)
    y = complex_block(rng, shape=(10**6,), scale=1.0) / math.sqrt(2)
    out = bussgang_adc(y, rho, 1.0, rng)
    noise = out - (1.0 - rho) * y
    assert np.mean(np.abs(noise) ** 2) == pytest.approx(rho * (1 - rho), rel=0.02)
    assert np.mean(np.abs(out) ** 2) == pytest.approx(1.0 - rho, rel=0.01)


def test_bussgang_entry_power_broadcasts_per_row():
    rng = substream(51)
    powers = np.array([[1.0], [4.0]])
    x = np.zeros((2, 10**5), dtype=complex)
    out = bussgang_dac(x, 0.5, powers, rng)
    row_power = np.mean(np.abs(out) ** 2, axis=1)
    np.testing.assert_allclose(row_power, [0.5, 2.0], rtol=0.03)


# ------------------------------------------------------------ round trip

def test_codebook_save_load_round_trip(tmp_path):
    cb = design_lloyd_max(6)
    path = tmp_path / "b6.txt"
    save_codebook(cb, path)
    back = load_codebook(path)
    assert back.bits == cb.bits
    assert back.rho == cb.rho
    np.testing.assert_array_equal(back.thresholds, cb.thresholds)
    np.testing.assert_array_equal(back.levels, cb.levels)
    assert isinstance(back, QuantizerCodebook)


def test_load_codebook_rejects_inconsistent_files(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("bits 2\nrho 0.1\nthresholds\n0.0\nlevels\n-1.0\n1.0\n")
    with pytest.raises(ValueError):
        load_codebook(path)
    path.write_text("thresholds\n0.0\n")
    with pytest.raises(ValueError):
        load_codebook(path)
