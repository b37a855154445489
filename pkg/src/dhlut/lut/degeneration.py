"""
Degeneration of the past-symbol table (LUT-2).

The 8 amplitude levels are merged into ``n`` groups by a :class:`Partition`.
The same level-to-group map is applied to each of the ``m - 1`` past
positions, so an 8**(m-1) entry table collapses to n**(m-1) cells. Each cell
holds the probability-weighted mean of the original entries that fall in it,
which is the weighted least-squares projection of the table onto
cell-constant tables. ``eta`` measures the relative weighted squared error of
that projection.

Table index convention: the oldest past symbol is the most significant digit.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..errors import DegenerateDenominator, InvalidInput, InvalidParameter
from ..shaping import LEVELS, N_LEVELS, ShapingDistribution, SymbolFrame, level_index

# relative slack under which two eta values count as a tie
ETA_TIE_RTOL = 1e-9


@dataclass(frozen=True)
class Partition:
    """Surjective map of the 8 levels (by index, -7 first) onto group ids 0..n-1."""

    group_of: tuple

    def __post_init__(self):
        g = tuple(int(v) for v in self.group_of)
        if len(g) != N_LEVELS:
            raise InvalidParameter(f"group_of needs {N_LEVELS} entries, got {len(g)}")
        n = max(g) + 1
        if min(g) < 0 or set(g) != set(range(n)):
            raise InvalidParameter(f"group_of must be surjective onto 0..n-1: {g}")
        object.__setattr__(self, "group_of", g)

    @property
    def n(self):
        return max(self.group_of) + 1

    @property
    def contiguous(self):
        """True when every group is an interval of the amplitude-ordered levels."""
        seen = set()
        prev = None
        for g in self.group_of:
            if g != prev:
                if g in seen:
                    return False
                seen.add(g)
                prev = g
        return True

    @property
    def groups(self):
        """Levels of each group, in group id order."""
        return [
            [int(LEVELS[i]) for i in range(N_LEVELS) if self.group_of[i] == j]
            for j in range(self.n)
        ]

    def group(self, level):
        return self.group_of[int(level_index(level))]

    def canonical(self):
        """Same grouping with ids relabeled in order of first appearance."""
        relabel = {}
        for g in self.group_of:
            relabel.setdefault(g, len(relabel))
        return Partition(tuple(relabel[g] for g in self.group_of))

    def refines(self, other):
        """True when every group of ``self`` lies inside one group of ``other``."""
        owner = {}
        for a, b in zip(self.group_of, other.group_of):
            if owner.setdefault(a, b) != b:
                return False
        return True

    @classmethod
    def identity(cls):
        return cls(tuple(range(N_LEVELS)))

    @classmethod
    def from_groups(cls, groups):
        """Build from an iterable of level lists, e.g. ``[[-7, -5], [-3, ...], ...]``."""
        g = [None] * N_LEVELS
        for j, levels in enumerate(groups):
            for a in levels:
                i = int(level_index(a))
                if LEVELS[i] != a or g[i] is not None:
                    raise InvalidParameter(f"bad or repeated level {a}")
                g[i] = j
        if any(v is None for v in g):
            raise InvalidParameter("groups must cover all 8 levels")
        return cls(tuple(g))

    @classmethod
    def from_sizes(cls, sizes):
        """Contiguous partition with the given group sizes, lowest amplitudes first."""
        g = [j for j, s in enumerate(sizes) for _ in range(int(s))]
        return cls(tuple(g))


@dataclass(frozen=True)
class PatternWeights:
    """Probability weights over LUT-2 indexes (past patterns)."""

    weights: np.ndarray
    mode: str = "analytic"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidParameter("weights must be nonnegative and sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def m(self):
        return _order(len(self.weights), N_LEVELS) + 1


def _order(size, base):
    """k with base**k == size."""
    k = 0
    s = 1
    while s < size:
        s *= base
        k += 1
    if s != size:
        raise InvalidInput(f"table size {size} is not a power of {base}")
    return k


def past_digits(m):
    """Level index of each past position for every LUT-2 index, shape (8**(m-1), m-1)."""
    d = m - 1
    idx = np.arange(N_LEVELS**d)
    powers = N_LEVELS ** np.arange(d - 1, -1, -1)
    return (idx[:, None] // powers[None, :]) % N_LEVELS


def cell_map(partition, m):
    """Degenerated cell of each LUT-2 index."""
    return _cell_maps(np.asarray([partition.group_of]), partition.n, m)[0]


def _cell_maps(group_of, n, m):
    # group_of: (K, 8) -> (K, 8**(m-1))
    digits = past_digits(m)
    d = m - 1
    powers = n ** np.arange(d - 1, -1, -1)
    mapped = group_of[:, digits]  # (K, I, d)
    return (mapped * powers).sum(axis=-1)


def pattern_weights(source, m=3, mode=None, lane=None):
    """Weights ``P(i)`` of the LUT-2 indexes.

    Parameters
    ----------
    source : ShapingDistribution or SymbolFrame
        A distribution gives the analytic product of marginals; a discrete
        frame gives normalized counts of the observed past patterns.
    m : int
        Block length; LUT-2 covers the ``m - 1`` past symbols.
    mode : {"analytic", "empirical"}, optional
        Inferred from ``source`` when omitted.
    lane : int, optional
        Empirical mode only: count a single lane instead of pooling all lanes.
    """
    if mode is None:
        mode = "analytic" if isinstance(source, ShapingDistribution) else "empirical"
    if mode == "analytic":
        if not isinstance(source, ShapingDistribution):
            raise InvalidInput("analytic weights need a ShapingDistribution")
        w = np.ones(1)
        for _ in range(m - 1):
            w = np.multiply.outer(w, source.probs).ravel()
        return PatternWeights(w / w.sum(), "analytic")
    if mode == "empirical":
        if not isinstance(source, SymbolFrame):
            raise InvalidInput("empirical weights need a SymbolFrame")
        data = source.data if lane is None else source.data[lane : lane + 1]
        if data.shape[1] < m:
            raise InvalidInput("frame too short to contain any block")
        idx = level_index(data)
        d = m - 1
        past = np.zeros((data.shape[0], data.shape[1] - d), dtype=np.intp)
        for t in range(d):
            past = past * N_LEVELS + idx[:, t : data.shape[1] - d + t]
        counts = np.bincount(past.ravel(), minlength=N_LEVELS**d).astype(float)
        return PatternWeights(counts / counts.sum(), "empirical")
    raise InvalidParameter(f"unknown weights mode {mode!r}")


def _check_sizes(lut2, partition, P):
    lut2 = np.asarray(lut2, dtype=float).ravel()
    w = P.weights if isinstance(P, PatternWeights) else np.asarray(P, dtype=float)
    if lut2.shape != w.shape:
        raise InvalidInput(f"table has {lut2.size} entries but weights have {w.size}")
    m = _order(lut2.size, N_LEVELS) + 1
    return lut2, w, m


def _degenerate_batch(lut2, w, cells, ncell):
    # cells: (K, I) -> degenerated tables (K, ncell)
    K = cells.shape[0]
    flat = (cells + ncell * np.arange(K)[:, None]).ravel()
    num = np.bincount(flat, weights=np.tile(lut2 * w, K), minlength=K * ncell)
    den = np.bincount(flat, weights=np.tile(w, K), minlength=K * ncell)
    out = np.zeros(K * ncell)
    np.divide(num, den, out=out, where=den > 0)
    # a cell holding a single weighted entry keeps that entry exactly, not (t*p)/p
    size = np.bincount(flat, weights=np.tile((w > 0).astype(float), K), minlength=K * ncell)
    solo = size == 1
    if solo.any():
        pick = np.zeros(K * ncell)
        live = np.tile(w > 0, K)
        pick[flat[live]] = np.tile(lut2, K)[live]
        out[solo] = pick[solo]
    return out.reshape(K, ncell)


def degenerate_table(lut2, partition, P):
    """Probability-weighted mean of the LUT-2 entries inside each degenerated cell.

    Cells with zero total weight are set to 0.
    """
    lut2, w, m = _check_sizes(lut2, partition, P)
    n = partition.n
    cells = cell_map(partition, m)[None, :]
    return _degenerate_batch(lut2, w, cells, n ** (m - 1))[0]


def _eta_parts(lut2, w, group_of, n, m):
    # numerators for every candidate in group_of, and the shared denominator
    cells = _cell_maps(group_of, n, m)
    deg = _degenerate_batch(lut2, w, cells, n ** (m - 1))
    approx = np.take_along_axis(deg, cells, axis=1)
    return np.sum((lut2 - approx) ** 2 * w, axis=1), float(np.sum(lut2**2 * w))


def _eta_batch(lut2, w, group_of, n, m):
    num, denom = _eta_parts(lut2, w, group_of, n, m)
    if denom <= 0:
        raise DegenerateDenominator("weighted table energy is zero; eta is undefined")
    return num / denom


def eta_metric(lut2, partition, P):
    """Relative weighted squared distance between LUT-2 and its degenerated version."""
    lut2, w, m = _check_sizes(lut2, partition, P)
    group_of = np.asarray([partition.group_of])
    return float(_eta_batch(lut2, w, group_of, partition.n, m)[0])


def contiguous_partitions(n):
    """All contiguous partitions into ``n`` groups, in lexicographic order of group_of."""
    out = []
    for cuts in combinations(range(1, N_LEVELS), n - 1):
        g = np.zeros(N_LEVELS, dtype=int)
        for c in cuts:
            g[c:] += 1
        out.append(tuple(int(v) for v in g))
    return [Partition(g) for g in sorted(out)]


def all_partitions(n):
    """All set partitions of the 8 levels into exactly ``n`` groups, as
    restricted growth strings in lexicographic order."""
    out = []

    def grow(prefix, top):
        if len(prefix) == N_LEVELS:
            if top == n - 1:
                out.append(Partition(tuple(prefix)))
            return
        remaining = N_LEVELS - len(prefix)
        for g in range(min(top + 2, n)):
            new_top = max(top, g)
            if n - 1 - new_top > remaining - 1:
                continue
            grow(prefix + [g], new_top)

    grow([0], 0)
    return out


def enumerate_partitions(n, space="contiguous"):
    n = int(n)
    if not 1 <= n <= N_LEVELS:
        raise InvalidParameter(f"group count must be in 1..8, got {n}")
    if space == "contiguous":
        return contiguous_partitions(n)
    if space == "all":
        return all_partitions(n)
    raise InvalidParameter(f"unknown partition space {space!r}")


def optimize_partition(lut2, P, n, space="contiguous"):
    """Exhaustive search for the partition into ``n`` groups with minimal eta.

    Near-ties (within a relative 1e-9) go to the lexicographically smallest
    ``group_of``.

    Returns
    -------
    (Partition, float)
    """
    candidates = enumerate_partitions(n, space)
    lut2 = np.asarray(lut2, dtype=float).ravel()
    w = P.weights if isinstance(P, PatternWeights) else np.asarray(P, dtype=float)
    if lut2.shape != w.shape:
        raise InvalidInput(f"table has {lut2.size} entries but weights have {w.size}")
    m = _order(lut2.size, N_LEVELS) + 1
    G = np.asarray([p.group_of for p in candidates])
    return _pick(candidates, _eta_batch(lut2, w, G, int(n), m))


def _pick(candidates, etas):
    best = etas.min()
    k = int(np.flatnonzero(etas <= best + ETA_TIE_RTOL * best)[0])
    return candidates[k], float(etas[k])


def optimize_shared_partition(lut2s, Ps, n, space="contiguous"):
    """One partition for several lanes, minimizing the pooled eta.

    The pooled eta of a partition is the sum of the per-lane numerators over
    the sum of the per-lane denominators, so lanes with more distortion
    energy count for more. With a single lane this is ``optimize_partition``.

    Parameters
    ----------
    lut2s : array_like, shape (lanes, 8**(m-1))
    Ps : PatternWeights or sequence of PatternWeights, one per lane

    Returns
    -------
    (Partition, float)
        The partition and its pooled eta.
    """
    lut2s = np.atleast_2d(np.asarray(lut2s, dtype=float))
    lanes = lut2s.shape[0]
    Ps = (Ps,) * lanes if isinstance(Ps, PatternWeights) else tuple(Ps)
    if len(Ps) != lanes:
        raise InvalidInput(f"{lanes} tables but {len(Ps)} weight sets")
    candidates = enumerate_partitions(n, space)
    m = _order(lut2s.shape[1], N_LEVELS) + 1
    G = np.asarray([p.group_of for p in candidates])
    num, den = np.zeros(len(candidates)), 0.0
    for lut2, P in zip(lut2s, Ps):
        if P.weights.shape != lut2.shape:
            raise InvalidInput(f"table has {lut2.size} entries but weights have {P.weights.size}")
        a, b = _eta_parts(lut2, P.weights, G, int(n), m)
        num += a
        den += b
    if den <= 0:
        raise DegenerateDenominator("weighted table energy is zero on every lane; eta is undefined")
    return _pick(candidates, num / den)
