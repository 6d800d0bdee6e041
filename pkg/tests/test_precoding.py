import numpy as np
import pytest

from qmimo import (
    SingularChannel,
    SystemConfig,
    diag_of_gram,
    generate_channel,
    substream,
    wishart_trace,
    zf_precoder,
)


@pytest.fixture
def channel_128x16():
    cfg = SystemConfig(128, 16, 1.0, 1.0)
    return generate_channel(cfg, substream(10))


def test_composite_channel_is_a_scaled_identity(channel_128x16):
    p = zf_precoder(channel_128x16, 1.0)
    composite = channel_128x16 @ p.matrix
    off = composite - p.gain * np.eye(16)
    assert np.max(np.abs(off)) < 1e-8
    np.testing.assert_allclose(np.abs(np.diag(composite)), p.gain, rtol=1e-10)


def test_transmit_power_is_normalized_exactly(channel_128x16):
    for power in (1.0, 4.0, 0.25):
        p = zf_precoder(channel_128x16, power)
        assert np.sum(np.abs(p.matrix) ** 2) == pytest.approx(power, rel=1e-10)
        assert p.power == power


def test_gain_matches_the_inverse_gram_trace(channel_128x16):
    p = zf_precoder(channel_128x16, 2.0)
    expected = np.sqrt(2.0 / wishart_trace(channel_128x16))
    assert p.gain == pytest.approx(expected, rel=1e-12)


def test_scalar_channel_reduces_to_a_matched_filter():
    p = zf_precoder(np.array([[1.0 + 0j]]), 4.0)
    np.testing.assert_allclose(p.matrix, [[2.0]], rtol=1e-12)


def test_precoder_shape(channel_128x16):
    p = zf_precoder(channel_128x16, 1.0)
    assert p.matrix.shape == (128, 16)


def test_composite_diagonal_approaches_the_array_gain():
    # At beta = 1/8 and unit power the composite gain tends to sqrt(7).
    cfg = SystemConfig(128, 16, 1.0, 1.0)
    rng = substream(4)
    target = np.sqrt(7.0)
    for _ in range(20):
        h = generate_channel(cfg, rng)
        p = zf_precoder(h, 1.0)
        diag = np.abs(np.diag(h @ p.matrix))
        assert np.max(np.abs(diag / target - 1.0)) < 0.05


def test_gain_spread_shrinks_as_the_array_grows():
    rng = substream(12)
    spreads = []
    for n_ant, n_users in ((32, 4), (128, 16), (512, 64)):
        cfg = SystemConfig(n_ant, n_users, 1.0, 1.0)
        limit = np.sqrt(1.0 / cfg.load - 1.0)
        gains = [zf_precoder(generate_channel(cfg, rng), 1.0).gain
                 for _ in range(40)]
        spreads.append(np.max(np.abs(np.asarray(gains) / limit - 1.0)))
    assert spreads[0] > spreads[1] > spreads[2]


def test_wishart_trace_known_matrices():
    assert wishart_trace(np.eye(2, dtype=complex)) == pytest.approx(2.0, rel=1e-12)
    assert wishart_trace(np.array([[2.0 + 0j]])) == pytest.approx(0.25, rel=1e-12)


def test_wishart_trace_matches_explicit_inverse(channel_128x16):
    gram = channel_128x16 @ channel_128x16.conj().T
    direct = np.trace(np.linalg.inv(gram)).real
    assert wishart_trace(channel_128x16) == pytest.approx(direct, rel=1e-10)


def test_antenna_powers_sum_to_the_budget(channel_128x16):
    d = diag_of_gram(zf_precoder(channel_128x16, 1.0))
    assert d.shape == (128,)
    assert np.all(d > 0)
    assert np.sum(d) == pytest.approx(1.0, rel=1e-10)


def test_antenna_powers_flatten_toward_uniform():
    # Entries of diag(PP^H) scatter around power/N with a relative spread
    # near 1/sqrt(M); the block mean is pinned by the power constraint.
    cfg = SystemConfig(128, 16, 1.0, 1.0)
    rng = substream(2)
    entries = []
    for _ in range(20):
        d = diag_of_gram(zf_precoder(generate_channel(cfg, rng), 1.0))
        rel = d * 128 - 1.0
        assert np.sqrt(np.mean(rel**2)) < 0.5
        entries.append(d)
    assert abs(np.mean(entries) * 128 - 1.0) < 1e-10


def test_scalar_identity_antenna_power():
    p = zf_precoder(np.array([[1.0 + 0j]]), 4.0)
    np.testing.assert_allclose(diag_of_gram(p), [4.0], rtol=1e-12)


def test_more_users_than_antennas_is_singular():
    h = generate_channel(SystemConfig(8, 4, 1.0, 1.0), substream(0))
    wide = h.conj().T  # 8 users on 4 antennas: no full row rank possible
    with pytest.raises(SingularChannel):
        zf_precoder(wide, 1.0)
    with pytest.raises(SingularChannel):
        wishart_trace(wide)


def test_rank_deficient_channel_is_singular():
    h = generate_channel(SystemConfig(16, 4, 1.0, 1.0), substream(7))
    h[3] = h[2]
    with pytest.raises(SingularChannel):
        zf_precoder(h, 1.0)


def test_ill_conditioned_channel_is_singular():
    h = generate_channel(SystemConfig(16, 4, 1.0, 1.0), substream(7))
    h[3] = h[2] + 1e-9 * h[1]
    with pytest.raises(SingularChannel):
        wishart_trace(h)


def test_invalid_arguments_rejected(channel_128x16):
    with pytest.raises(ValueError):
        zf_precoder(channel_128x16, 0.0)
    with pytest.raises(ValueError):
        zf_precoder(channel_128x16.ravel(), 1.0)
