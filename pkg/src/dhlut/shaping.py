"""
Probabilistically shaped 64-QAM sources.

A 64-QAM symbol is handled as two (or four, for dual polarization) independent
8-ASK lanes. Each lane draws i.i.d. levels from a Maxwell-Boltzmann
distribution ``p(a) ~ exp(-lambda * a**2)``.

Random streams
--------------
All randomness goes through ``numpy.random.Generator(PCG64)`` seeded by
``numpy.random.SeedSequence(seed, spawn_key=(lane,))``. Lane ``l`` of a frame
generated with ``seed`` therefore uses the same stream no matter how many
other lanes are requested.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidInput, InvalidParameter, OutOfRange

LEVELS = np.arange(-7, 8, 2)
N_LEVELS = len(LEVELS)

RNG_NAME = "numpy.PCG64/SeedSequence(seed, spawn_key=(lane,))"

# MSB first; index 0 is level -7.
GRAY_LABELS = ("000", "001", "011", "010", "110", "111", "101", "100")
GRAY_BITS = np.array([[int(b) for b in lab] for lab in GRAY_LABELS], dtype=np.uint8)
_LABEL_TO_INDEX = {lab: i for i, lab in enumerate(GRAY_LABELS)}

ENTROPY_MIN = 2.0
ENTROPY_MAX = 2.0 * np.log2(N_LEVELS)


def level_index(levels):
    """Map AskLevel values (odd integers in [-7, 7]) to table indexes 0..7."""
    levels = np.asarray(levels)
    return ((levels.astype(np.int64) + 7) // 2).astype(np.intp)


def lane_rng(seed, lane):
    """Generator for sub-stream ``lane`` of ``seed``."""
    if int(seed) < 0:
        raise InvalidParameter(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(lane),))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed, *keys):
    """Deterministic 63-bit child seed of ``seed`` for the integer path ``keys``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


@dataclass(frozen=True)
class ShapingDistribution:
    """Per-level probabilities of the 8-ASK lane alphabet.

    ``probs[i]`` is the probability of ``LEVELS[i]``.
    """

    lam: float
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (N_LEVELS,) or np.any(p <= 0) or abs(p.sum() - 1.0) > 1e-12:
            raise InvalidParameter("probs must be 8 positive values summing to 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def mean_power(self):
        """Per-lane mean symbol power ``sum p(a) a**2``."""
        return float(np.dot(self.probs, LEVELS.astype(float) ** 2))

    def prob(self, level):
        return float(self.probs[level_index(level)])


@dataclass(frozen=True)
class SymbolFrame:
    """Multi-lane sequence of lane samples.

    Attributes
    ----------
    data : ndarray, shape (lanes, length)
        Discrete AskLevels when ``discrete`` is set, real samples otherwise.
    seed : int
        Provenance tag of the stream that produced the frame.
    discrete : bool
        Whether ``data`` holds AskLevel values only.
    edge : int
        Number of leading symbols per lane flagged as edge positions; these
        are excluded from metrics.
    """

    data: np.ndarray = field(repr=False)
    seed: int = 0
    discrete: bool = False
    edge: int = 0

    def __post_init__(self):
        d = np.array(self.data, dtype=float, copy=True)
        if d.ndim == 1:
            d = d[None, :]
        if d.ndim != 2 or d.shape[0] < 1 or d.shape[1] < 1:
            raise InvalidInput(f"frame data must be lanes x length, got shape {d.shape}")
        if self.discrete and not np.all(np.isin(d, LEVELS)):
            raise InvalidInput("discrete frame contains non-AskLevel values")
        d.setflags(write=False)
        object.__setattr__(self, "data", d)

    @property
    def lanes(self):
        return self.data.shape[0]

    @property
    def length(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape


def maxwell_boltzmann(lam):
    """Maxwell-Boltzmann distribution over the 8-ASK levels with rate ``lam``."""
    lam = float(lam)
    if not np.isfinite(lam) or lam < 0:
        raise InvalidParameter(f"lambda must be finite and >= 0, got {lam}")
    a2 = LEVELS.astype(float) ** 2
    # shift exponent by the smallest a**2 (=1) to stay representable for huge lam
    w = np.exp(-lam * (a2 - 1.0))
    return ShapingDistribution(lam, w / w.sum())


def entropy_bits(dist):
    """Entropy of the 2D 64-QAM symbol in bits (twice the lane entropy)."""
    p = dist.probs
    return float(-2.0 * np.sum(p * np.log2(p)))


def solve_lambda(target_bits):
    """Shaping rate whose 64-QAM entropy equals ``target_bits``.

    Entropy is continuous and strictly decreasing in lambda, from 6 bits at
    lambda = 0 towards 2 bits as lambda grows.
    """
    target_bits = float(target_bits)
    if not (ENTROPY_MIN < target_bits <= ENTROPY_MAX):
        raise OutOfRange(f"target entropy must lie in (2, 6], got {target_bits}")
    if target_bits == ENTROPY_MAX:
        return 0.0

    def f(lam):
        return entropy_bits(maxwell_boltzmann(lam)) - target_bits

    hi = 1.0
    # beyond ~14 the outer levels underflow; entropy is 2 bits to machine precision
    while f(hi) > 0 and hi < 14.0:
        hi = min(2.0 * hi, 14.0)
    return float(brentq(f, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))


def sample_frame(dist, lanes, length, seed):
    """Draw a discrete frame of i.i.d. shaped levels, one sub-stream per lane."""
    if int(lanes) < 1 or int(length) < 1:
        raise InvalidParameter(f"lanes and length must be >= 1, got {lanes}, {length}")
    data = np.empty((int(lanes), int(length)))
    for lane in range(int(lanes)):
        data[lane] = lane_rng(seed, lane).choice(LEVELS, size=int(length), p=dist.probs)
    return SymbolFrame(data, seed=int(seed), discrete=True)


def gray_encode(level):
    """3-bit Gray label (MSB first) of an AskLevel."""
    level = int(level)
    if level not in LEVELS:
        raise InvalidInput(f"not an 8-ASK level: {level}")
    return GRAY_LABELS[int(level_index(level))]


def gray_decode(label):
    try:
        return int(LEVELS[_LABEL_TO_INDEX[label]])
    except KeyError:
        raise InvalidInput(f"not a 3-bit label: {label!r}") from None
