"""Synthetic per-lane memory-polynomial channel with additive Gaussian noise."""

from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInput, InvalidParameter
from .shaping import SymbolFrame, lane_rng


@dataclass(frozen=True)
class ChannelModel:
    """Linear plus cubic memory polynomial.

    ``y(k) = sum_m h_lin[m] x(k-m) + h_cub[m] x(k-m)**3 + n(k)`` with
    ``n ~ N(0, noise_sigma**2)``; tap 0 acts on the current symbol.
    """

    h_lin: tuple = (1.0,)
    h_cub: tuple = (0.0,)
    noise_sigma: float = 0.0

    def __post_init__(self):
        h_lin = tuple(float(v) for v in np.atleast_1d(self.h_lin))
        h_cub = tuple(float(v) for v in np.atleast_1d(self.h_cub))
        if len(h_lin) < 1 or len(h_lin) != len(h_cub):
            raise InvalidParameter("h_lin and h_cub must have the same length >= 1")
        if h_lin[0] == 0.0:
            raise InvalidParameter("h_lin[0] must be nonzero")
        if not np.all(np.isfinite(h_lin + h_cub)):
            raise InvalidParameter("channel coefficients must be finite")
        sigma = float(self.noise_sigma)
        if not np.isfinite(sigma) or sigma < 0:
            raise InvalidParameter(f"noise_sigma must be finite and >= 0, got {sigma}")
        object.__setattr__(self, "h_lin", h_lin)
        object.__setattr__(self, "h_cub", h_cub)
        object.__setattr__(self, "noise_sigma", sigma)

    @property
    def taps(self):
        return len(self.h_lin)

    def with_noise(self, sigma):
        return replace(self, noise_sigma=sigma)

    def to_dict(self):
        return {"h_lin": list(self.h_lin), "h_cub": list(self.h_cub)}


# Calibrated so that at 21 dB input SNR under 5.8-bit shaping the uncompensated
# error-vector SNR is ~15.9 dB with ~2.4 % lane SER. The expansive current-symbol
# cubic pushes the outer levels away from the decision boundaries.
DEFAULT_CHANNEL = ChannelModel(h_lin=(1.0, 0.04, -0.015), h_cub=(0.0035, 0.0003, 0.0))


def _distort(model, x):
    y = np.zeros_like(x)
    n = x.shape[-1]
    x3 = x**3
    for m, (a, b) in enumerate(zip(model.h_lin, model.h_cub)):
        if m >= n:
            break
        if m == 0:
            y += a * x + b * x3
        else:
            y[..., m:] += a * x[..., :-m] + b * x3[..., :-m]
    return y


def apply_channel(model, frame, seed):
    """Pass ``frame`` through ``model``; noise for lane ``l`` uses sub-stream ``l`` of ``seed``.

    Samples before the start of the frame are taken as zero; the first
    ``taps - 1`` output symbols are flagged as edge positions.
    """
    x = np.asarray(frame.data, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidInput("frame contains non-finite samples")
    y = _distort(model, x)
    if model.noise_sigma > 0:
        for lane in range(frame.lanes):
            y[lane] += model.noise_sigma * lane_rng(seed, lane).standard_normal(frame.length)
    return SymbolFrame(y, seed=int(seed), discrete=False, edge=max(frame.edge, model.taps - 1))


def noise_sigma_for_snr(dist, snr_db):
    """Per-sample noise standard deviation giving input SNR ``snr_db`` against the lane power."""
    snr_db = float(snr_db)
    return float(np.sqrt(dist.mean_power * 10.0 ** (-snr_db / 10.0)))
