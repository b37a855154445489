"""
Full, hierarchical and degenerated hierarchical look-up tables.

Every table is trained per lane from a known transmitted frame ``tx`` and the
aligned received frame ``rx``. An m-symbol block at position ``k`` covers
``tx[k-m+1 .. k]``; the entry it selects stores the mean error
``rx(k) - tx(k)`` of the current symbol. Compensation looks the same blocks up
from hard decisions on ``rx`` and subtracts the stored error.

Index convention: the oldest symbol of a block is the most significant base-8
digit, the current symbol the least significant.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInput, InvalidParameter
from ..metrics import hard_decide
from ..shaping import N_LEVELS, SymbolFrame, level_index
from .degeneration import Partition, cell_map, degenerate_table

VARIANTS = ("full", "hlut", "dhlut")


@dataclass(frozen=True)
class BlockConfig:
    m: int = 3
    min_count: int = 8

    def __post_init__(self):
        if int(self.m) < 2:
            raise InvalidParameter(f"block length m must be >= 2, got {self.m}")
        if int(self.min_count) < 1:
            raise InvalidParameter(f"min_count must be >= 1, got {self.min_count}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "min_count", int(self.min_count))


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    if a.ndim == 1:
        a = a[None, :]
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FullLut:
    """One 8**m entry table per lane, shape (lanes, 8**m)."""

    table: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)
    m: int = 3
    min_count: int = 8
    seed: int = None

    variant = "full"

    def __post_init__(self):
        object.__setattr__(self, "table", _frozen(self.table))
        object.__setattr__(self, "counts", _frozen(self.counts, np.int64))
        if self.table.shape[1] != N_LEVELS**self.m or self.table.shape != self.counts.shape:
            raise InvalidInput("full table must have 8**m entries per lane")

    @property
    def lanes(self):
        return self.table.shape[0]

    @property
    def coverage(self):
        """Fraction of entries observed at least ``min_count`` times."""
        return float(np.mean(self.counts >= self.min_count))

    @property
    def entries(self):
        return int(self.table.shape[1])


@dataclass(frozen=True)
class HLut:
    """Current-symbol table (8 entries) plus past-pattern table (8**(m-1) entries), per lane."""

    lut1: np.ndarray = field(repr=False)
    lut2: np.ndarray = field(repr=False)
    counts1: np.ndarray = field(repr=False)
    counts2: np.ndarray = field(repr=False)
    m: int = 3
    min_count: int = 8
    mode: str = "sequential"
    seed: int = None

    variant = "hlut"

    def __post_init__(self):
        for name, dtype in (("lut1", float), ("lut2", float), ("counts1", np.int64), ("counts2", np.int64)):
            object.__setattr__(self, name, _frozen(getattr(self, name), dtype))
        if self.lut1.shape[1] != N_LEVELS or self.lut2.shape[1] != N_LEVELS ** (self.m - 1):
            raise InvalidInput("H-LUT tables must have 8 and 8**(m-1) entries per lane")

    @property
    def lanes(self):
        return self.lut1.shape[0]

    @property
    def coverage(self):
        ok = np.concatenate([self.counts1 >= self.min_count, self.counts2 >= self.min_count], axis=1)
        return float(np.mean(ok))

    @property
    def entries(self):
        return int(self.lut1.shape[1] + self.lut2.shape[1])


@dataclass(frozen=True)
class DhLut:
    """H-LUT whose past-pattern table is degenerated through a partition.

    ``partitions`` holds one entry per lane; the sweep stores the same
    shared partition for every lane.
    """

    lut1: np.ndarray = field(repr=False)
    lut2_deg: np.ndarray = field(repr=False)
    partitions: tuple = ()
    m: int = 3
    min_count: int = 8
    mode: str = "sequential"
    weights_mode: str = "analytic"
    eta: tuple = ()
    coverage: float = 1.0
    seed: int = None

    variant = "dhlut"

    def __post_init__(self):
        object.__setattr__(self, "lut1", _frozen(self.lut1))
        object.__setattr__(self, "lut2_deg", _frozen(self.lut2_deg))
        parts = self.partitions
        if isinstance(parts, Partition):
            parts = (parts,) * self.lut1.shape[0]
        parts = tuple(parts)
        if len(parts) != self.lut1.shape[0]:
            raise InvalidInput("need one partition per lane")
        ns = {p.n for p in parts}
        if len(ns) != 1:
            raise InvalidInput("all lanes must degenerate to the same group count")
        if self.lut2_deg.shape[1] != ns.pop() ** (self.m - 1):
            raise InvalidInput("degenerated table must have n**(m-1) entries per lane")
        object.__setattr__(self, "partitions", parts)
        object.__setattr__(self, "eta", tuple(None if e is None else float(e) for e in self.eta))

    @property
    def lanes(self):
        return self.lut1.shape[0]

    @property
    def n(self):
        return self.partitions[0].n

    @property
    def entries(self):
        return int(self.lut1.shape[1] + self.lut2_deg.shape[1])


def _check_pair(tx, rx):
    if tx.shape != rx.shape:
        raise InvalidInput(f"tx shape {tx.shape} does not match rx shape {rx.shape}")
    if not tx.discrete:
        raise InvalidInput("training needs the known transmitted levels (discrete tx)")


def _blocks(idx, m):
    """Full-pattern, past-pattern and current indexes for positions k >= m-1.

    ``idx`` has shape (lanes, N); outputs have shape (lanes, N - m + 1).
    """
    n = idx.shape[1]
    w = n - m + 1
    past = np.zeros((idx.shape[0], w), dtype=np.intp)
    for t in range(m - 1):
        past = past * N_LEVELS + idx[:, t : t + w]
    cur = idx[:, m - 1 :]
    return past * N_LEVELS + cur, past, cur


def _grouped_mean(keys, values, size, min_count):
    counts = np.bincount(keys, minlength=size)
    sums = np.bincount(keys, weights=values, minlength=size)
    mean = np.zeros(size)
    ok = counts >= min_count
    mean[ok] = sums[ok] / counts[ok]
    return mean, counts


def _train_start(tx, rx, cfg):
    return max(cfg.m - 1, rx.edge, tx.edge)


def train_full(tx, rx, cfg=BlockConfig(), seed=None):
    """Average of the current-symbol error for every m-symbol pattern of ``tx``.

    Entries seen fewer than ``cfg.min_count`` times are 0.
    """
    _check_pair(tx, rx)
    m = cfg.m
    start = _train_start(tx, rx, cfg)
    err = rx.data - tx.data
    full, _, _ = _blocks(level_index(tx.data), m)
    size = N_LEVELS**m
    tables, counts = [], []
    for lane in range(tx.lanes):
        keys = full[lane, start - (m - 1) :]
        t, c = _grouped_mean(keys, err[lane, start:], size, cfg.min_count)
        tables.append(t)
        counts.append(c)
    return FullLut(np.array(tables), np.array(counts), m=m, min_count=cfg.min_count,
                   seed=tx.seed if seed is None else seed)


def train_hlut(tx, rx, cfg=BlockConfig(), mode="sequential", seed=None):
    """Train LUT-1 (current symbol) and LUT-2 (past m-1 symbols).

    ``sequential`` fits LUT-2 to the residual left after LUT-1. ``parallel``
    fits both to the raw error and removes the global mean error from LUT-2
    so it is not counted twice.
    """
    if mode not in ("sequential", "parallel"):
        raise InvalidParameter(f"unknown H-LUT training mode {mode!r}")
    _check_pair(tx, rx)
    m = cfg.m
    start = _train_start(tx, rx, cfg)
    off = start - (m - 1)
    err = rx.data - tx.data
    _, past, cur = _blocks(level_index(tx.data), m)
    size2 = N_LEVELS ** (m - 1)
    out = {"lut1": [], "lut2": [], "counts1": [], "counts2": []}
    for lane in range(tx.lanes):
        e = err[lane, start:]
        c_idx = cur[lane, off:]
        p_idx = past[lane, off:]
        lut1, counts1 = _grouped_mean(c_idx, e, N_LEVELS, cfg.min_count)
        if mode == "sequential":
            lut2, counts2 = _grouped_mean(p_idx, e - lut1[c_idx], size2, cfg.min_count)
        else:
            lut2, counts2 = _grouped_mean(p_idx, e, size2, cfg.min_count)
            ok = counts2 >= cfg.min_count
            lut2[ok] -= e.mean()
        out["lut1"].append(lut1)
        out["lut2"].append(lut2)
        out["counts1"].append(counts1)
        out["counts2"].append(counts2)
    return HLut(**{k: np.array(v) for k, v in out.items()}, m=m, min_count=cfg.min_count,
                mode=mode, seed=tx.seed if seed is None else seed)


def build_dhlut(hlut, partition, P, weights_mode=None, eta=None):
    """Degenerate each lane's LUT-2 of ``hlut``.

    ``partition`` is a single Partition shared by all lanes or a sequence
    with one Partition per lane; ``P`` and ``eta`` likewise.
    """
    lanes = hlut.lanes
    parts = (partition,) * lanes if isinstance(partition, Partition) else tuple(partition)
    weights = P if isinstance(P, (list, tuple)) else (P,) * lanes
    if len(parts) != lanes or len(weights) != lanes:
        raise InvalidInput("need one partition and one weight set per lane")
    if len({p.n for p in parts}) != 1:
        raise InvalidInput("all lanes must degenerate to the same group count")
    deg = [degenerate_table(hlut.lut2[lane], parts[lane], weights[lane]) for lane in range(lanes)]
    if weights_mode is None:
        weights_mode = getattr(weights[0], "mode", "analytic")
    if eta is not None:
        eta = tuple(float(e) for e in np.broadcast_to(np.asarray(eta, dtype=float), (lanes,)))
    return DhLut(
        lut1=hlut.lut1,
        lut2_deg=np.array(deg),
        partitions=parts,
        m=hlut.m,
        min_count=hlut.min_count,
        mode=hlut.mode,
        weights_mode=weights_mode,
        eta=() if eta is None else eta,
        coverage=hlut.coverage,
        seed=hlut.seed,
    )


def _correction(table, decided_idx):
    m = table.m
    full, past, cur = _blocks(decided_idx, m)
    corr = np.empty(full.shape)
    for lane in range(decided_idx.shape[0]):
        if isinstance(table, FullLut):
            corr[lane] = table.table[lane][full[lane]]
        elif isinstance(table, HLut):
            corr[lane] = table.lut1[lane][cur[lane]] + table.lut2[lane][past[lane]]
        elif isinstance(table, DhLut):
            cells = cell_map(table.partitions[lane], m)
            corr[lane] = table.lut1[lane][cur[lane]] + table.lut2_deg[lane][cells[past[lane]]]
        else:
            raise InvalidInput(f"not a look-up table: {type(table).__name__}")
    return corr


def compensate(rx, table, cfg=None):
    """Subtract the table's stored distortion from ``rx``.

    Blocks are formed from hard decisions on ``rx``. The first ``m - 1``
    symbols of each lane pass through unchanged and are flagged as edge.
    """
    m = table.m if cfg is None else cfg.m
    if m != table.m:
        raise InvalidInput(f"table was trained for m={table.m}, got m={m}")
    if rx.lanes != table.lanes:
        raise InvalidInput(f"table has {table.lanes} lanes, frame has {rx.lanes}")
    out = np.array(rx.data, copy=True)
    if rx.length >= m:
        idx = level_index(hard_decide(rx.data))
        out[:, m - 1 :] -= _correction(table, idx)
    return SymbolFrame(out, seed=rx.seed, discrete=False, edge=max(rx.edge, m - 1))


def parse_variant(variant):
    """Normalize ``"full"``, ``"hlut"``, ``"dh6"`` or ``("dh", 6)`` to (kind, n)."""
    if isinstance(variant, tuple):
        kind, n = variant
        return kind, int(n)
    v = str(variant).lower()
    if v in ("full", "hlut"):
        return v, None
    if v.startswith("dh") and v[2:].isdigit():
        return "dh", int(v[2:])
    raise InvalidParameter(f"unknown table variant {variant!r}")


def table_size_report(variant, cfg=BlockConfig()):
    """Entries per lane and the ratio to the full 8**m table."""
    kind, n = parse_variant(variant)
    m = cfg.m
    full = N_LEVELS**m
    if kind == "full":
        size = full
    elif kind == "hlut":
        size = N_LEVELS + N_LEVELS ** (m - 1)
    else:
        if not 1 <= n <= N_LEVELS:
            raise InvalidParameter(f"group count must be in 1..8, got {n}")
        size = N_LEVELS + n ** (m - 1)
    return size, size / full
