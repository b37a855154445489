import numpy as np
import pytest

import oracles
from dhlut import (
    ChannelModel,
    InvalidInput,
    InvalidParameter,
    SymbolFrame,
    apply_channel,
    maxwell_boltzmann,
    noise_sigma_for_snr,
    sample_frame,
)


def frame(x):
    return SymbolFrame(np.atleast_2d(np.asarray(x, dtype=float)))


def test_identity_channel(ps58):
    f = sample_frame(ps58, 2, 200, seed=1)
    y = apply_channel(ChannelModel((1.0,), (0.0,), 0.0), f, seed=0)
    np.testing.assert_array_equal(y.data, f.data)
    assert not y.discrete


def test_zero_prepend_convolution():
    y = apply_channel(ChannelModel((1.0, 0.5), (0.0, 0.0)), frame([1, 3]), seed=0)
    np.testing.assert_array_equal(y.data, [[1.0, 3.5]])
    assert y.edge == 1


def test_cubic_tap():
    y = apply_channel(ChannelModel((1.0,), (0.002,)), frame([7]), seed=0)
    assert y.data[0, 0] == pytest.approx(7.686, abs=1e-12)


def test_linear_matches_naive_fir(rng):
    for _ in range(100):
        taps = rng.normal(size=rng.integers(1, 5))
        taps[0] = 1.0 + abs(taps[0])
        x = rng.normal(size=(2, rng.integers(1, 40)))
        y = apply_channel(ChannelModel(tuple(taps), (0.0,) * len(taps)), SymbolFrame(x), seed=0)
        for lane in range(2):
            ref = oracles.fir(list(x[lane]), list(taps))
            assert np.max(np.abs(y.data[lane] - ref)) <= 1e-12


def test_memory_polynomial_against_loop(rng):
    hl, hc = (1.0, 0.08, -0.03), (0.003, 0.001, -0.0005)
    x = rng.choice([-7, -5, -3, -1, 1, 3, 5, 7], size=50).astype(float)
    y = apply_channel(ChannelModel(hl, hc), frame(x), seed=0).data[0]
    ref = [
        sum(hl[m] * x[k - m] + hc[m] * x[k - m] ** 3 for m in range(3) if k - m >= 0)
        for k in range(len(x))
    ]
    np.testing.assert_allclose(y, ref, rtol=0, atol=1e-12)


def test_noise_statistics():
    x = np.zeros((1, 10**6))
    y = apply_channel(ChannelModel((1.0,), (0.0,), 1.0), SymbolFrame(x), seed=5)
    assert 0.995 <= np.std(y.data - x) <= 1.005


def test_determinism_and_lane_independence(ps58):
    f = sample_frame(ps58, 2, 1000, seed=2)
    ch = ChannelModel((1.0, 0.1), (0.001, 0.0), 0.3)
    a = apply_channel(ch, f, seed=8)
    b = apply_channel(ch, f, seed=8)
    np.testing.assert_array_equal(a.data, b.data)
    n = a.data - apply_channel(ch.with_noise(0.0), f, seed=8).data
    assert abs(np.corrcoef(n[0], n[1])[0, 1]) < 0.1
    assert np.any(apply_channel(ch, f, seed=9).data != a.data)


def test_non_finite_input_rejected():
    with pytest.raises(InvalidInput):
        apply_channel(ChannelModel(), frame([1.0, np.nan]), seed=0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(h_lin=(0.0,), h_cub=(0.0,)), dict(h_lin=(1.0, 0.1), h_cub=(0.0,)),
     dict(noise_sigma=-1.0), dict(h_lin=(1.0, np.inf), h_cub=(0.0, 0.0))],
)
def test_invalid_model(kwargs):
    with pytest.raises(InvalidParameter):
        ChannelModel(**kwargs)


def test_noise_sigma_for_snr():
    uni = maxwell_boltzmann(0.0)
    assert uni.mean_power == pytest.approx(21.0)
    assert noise_sigma_for_snr(uni, 10 * np.log10(21)) == pytest.approx(1.0, abs=1e-12)
    assert noise_sigma_for_snr(uni, np.inf) == 0.0
    d = maxwell_boltzmann(0.05)
    levels = np.array([-7, -5, -3, -1, 1, 3, 5, 7], dtype=float)
    w = np.exp(-0.05 * levels**2)
    p_avg = float(np.sum(w * levels**2) / np.sum(w))
    assert noise_sigma_for_snr(d, 18) == pytest.approx(np.sqrt(p_avg * 10 ** (-1.8)), rel=1e-12)
