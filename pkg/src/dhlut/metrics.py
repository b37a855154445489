"""Hard decisions, BER/SER and data-aided error-vector SNR."""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, InvalidInput
from .shaping import GRAY_BITS, LEVELS, SymbolFrame, level_index

SNR_CAP_DB = 200.0


@dataclass(frozen=True)
class MetricReport:
    ber: float
    ser: float
    snr_db: float
    symbols_counted: int


def hard_decide(sample):
    """Nearest 8-ASK level.

    Samples beyond +-7 clip. A sample exactly between two levels goes to the
    one of smaller magnitude; 0 goes to +1. Works elementwise on arrays and
    returns an int for scalar input.
    """
    x = np.asarray(sample, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidInput("cannot decide non-finite samples")
    # (2j-2, 2j] -> 2j-1 on the magnitude puts midpoints on the smaller level
    mag = np.clip(2.0 * np.ceil(np.abs(x) / 2.0) - 1.0, 1.0, 7.0)
    out = np.where(x < 0, -mag, mag).astype(LEVELS.dtype)
    if out.ndim == 0:
        return int(out)
    return out


def decide_frame(frame):
    return SymbolFrame(hard_decide(frame.data), seed=frame.seed, discrete=True, edge=frame.edge)


def _skip(*frames):
    return max(f.edge for f in frames)


def snr_db(ref, sig):
    """``10 log10(sum ref**2 / sum (sig - ref)**2)`` pooled over lanes, edges excluded."""
    if ref.shape != sig.shape:
        raise InvalidInput(f"shape mismatch {ref.shape} vs {sig.shape}")
    s = _skip(ref, sig)
    r = ref.data[:, s:]
    e = sig.data[:, s:] - r
    p_ref = float(np.sum(r * r))
    if p_ref == 0.0:
        raise DegenerateDenominator("reference power is zero")
    p_err = float(np.sum(e * e))
    if p_err == 0.0:
        return SNR_CAP_DB
    return float(min(SNR_CAP_DB, 10.0 * np.log10(p_ref / p_err)))


def ber(tx, decided, sig=None):
    """Bit and symbol error ratios of ``decided`` against ``tx`` under the Gray labeling.

    When the soft frame ``sig`` is given its error-vector SNR is included,
    otherwise ``snr_db`` is NaN.
    """
    if tx.shape != decided.shape:
        raise InvalidInput(f"shape mismatch {tx.shape} vs {decided.shape}")
    frames = (tx, decided) if sig is None else (tx, decided, sig)
    s = _skip(*frames)
    a = level_index(tx.data[:, s:])
    b = level_index(decided.data[:, s:])
    n_sym = a.size
    if n_sym == 0:
        raise InvalidInput("no symbols left after excluding edge positions")
    bit_err = int(np.count_nonzero(GRAY_BITS[a] != GRAY_BITS[b]))
    sym_err = int(np.count_nonzero(a != b))
    snr = float("nan") if sig is None else snr_db(tx, sig)
    return MetricReport(bit_err / (3 * n_sym), sym_err / n_sym, snr, n_sym)


def evaluate(tx, sig):
    """Decide ``sig`` and report BER, SER and SNR against ``tx``."""
    return ber(tx, decide_frame(sig), sig)
