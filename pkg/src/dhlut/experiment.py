"""
Sweep harness: generate -> distort -> train -> optimize -> compensate -> measure.

Seed derivation
---------------
For every entry ``s`` of ``config.seeds``:

* training symbols use ``derive_seed(s, 0)``, evaluation symbols ``derive_seed(s, 1)``;
* at input SNR ``x`` dB, training noise uses ``derive_seed(s, 2, snr_key(x))`` and
  evaluation noise ``derive_seed(s, 3, snr_key(x))``.

Each of these is then split per lane by :func:`dhlut.shaping.lane_rng`.
"""

import csv
import json
import logging
import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from .channel import DEFAULT_CHANNEL, ChannelModel, apply_channel, noise_sigma_for_snr
from .errors import (
    ConfigError,
    DegenerateDenominator,
    DhlutError,
    InvalidInput,
    IoError,
)
from .lut import (
    BlockConfig,
    build_dhlut,
    compensate,
    enumerate_partitions,
    eta_metric,
    optimize_shared_partition,
    pattern_weights,
    save_table,
    table_size_report,
    train_full,
    train_hlut,
)
from .metrics import evaluate
from .shaping import SymbolFrame, derive_seed, maxwell_boltzmann, sample_frame, solve_lambda

log = logging.getLogger(__name__)

SCHEMES = ("none", "full", "hlut", "dh2", "dh4", "dh6")
CSV_COLUMNS = (
    "scheme", "snr_in_db", "seed", "ber", "ser", "snr_out_db",
    "table_entries", "table_ratio", "eta", "coverage",
)
BER_FLOOR = 1e-6


@dataclass(frozen=True)
class ExperimentConfig:
    target_entropy_bits: float = 5.8
    lanes: int = 2
    train_length: int = 2**20
    eval_length: int = 2**18
    m: int = 3
    min_count: int = 8
    channel: ChannelModel = DEFAULT_CHANNEL
    snr_sweep: tuple = (17.0, 19.0, 21.0, 23.0, 25.0)
    schemes: tuple = SCHEMES
    partition_space: str = "contiguous"
    hlut_mode: str = "sequential"
    weights_mode: str = "analytic"
    seeds: tuple = (1, 2, 3, 4, 5)

    def __post_init__(self):
        def need(cond, name, msg):
            if not cond:
                raise ConfigError(name, msg)

        need(2.0 < float(self.target_entropy_bits) <= 6.0, "target_entropy_bits", "must lie in (2, 6]")
        for name in ("lanes", "train_length", "eval_length"):
            need(_is_int(getattr(self, name)) and getattr(self, name) >= 1, name, "must be a positive integer")
        need(_is_int(self.m) and self.m >= 2, "m", "must be an integer >= 2")
        need(_is_int(self.min_count) and self.min_count >= 1, "min_count", "must be an integer >= 1")
        need(self.train_length > self.m and self.eval_length > self.m, "train_length", "frames must exceed m")
        need(isinstance(self.channel, ChannelModel), "channel", "must be a ChannelModel")
        sweep = tuple(float(v) for v in self.snr_sweep)
        need(len(sweep) > 0 and all(math.isfinite(v) for v in sweep), "snr_sweep", "must be a nonempty list of finite reals")
        need(len(set(sweep)) == len(sweep), "snr_sweep", "values must be distinct")
        schemes = tuple(self.schemes)
        need(len(schemes) > 0 and all(s in SCHEMES for s in schemes), "schemes", f"must be a nonempty subset of {SCHEMES}")
        need(len(set(schemes)) == len(schemes), "schemes", "values must be distinct")
        need(self.partition_space in ("contiguous", "all"), "partition_space", "must be 'contiguous' or 'all'")
        need(self.hlut_mode in ("sequential", "parallel"), "hlut_mode", "must be 'sequential' or 'parallel'")
        need(self.weights_mode in ("analytic", "empirical"), "weights_mode", "must be 'analytic' or 'empirical'")
        seeds = tuple(self.seeds)
        need(len(seeds) > 0 and all(_is_int(s) and s >= 0 for s in seeds), "seeds", "must be nonnegative integers")
        need(len(set(seeds)) == len(seeds), "seeds", "values must be distinct")
        object.__setattr__(self, "snr_sweep", sweep)
        object.__setattr__(self, "schemes", schemes)
        object.__setattr__(self, "seeds", tuple(int(s) for s in seeds))

    @property
    def block(self):
        return BlockConfig(self.m, self.min_count)

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        for key in doc:
            if key not in known:
                raise ConfigError(key, "unknown key")
        kw = dict(doc)
        if "channel" in kw:
            ch = kw["channel"]
            if not isinstance(ch, dict):
                raise ConfigError("channel", "must be an object with h_lin and h_cub")
            for key in ch:
                if key not in ("h_lin", "h_cub"):
                    raise ConfigError(f"channel.{key}", "unknown key")
            try:
                kw["channel"] = ChannelModel(
                    ch.get("h_lin", DEFAULT_CHANNEL.h_lin), ch.get("h_cub", DEFAULT_CHANNEL.h_cub)
                )
            except (DhlutError, TypeError, ValueError) as exc:
                raise ConfigError("channel", str(exc)) from exc
        for key in ("snr_sweep", "schemes", "seeds"):
            if key in kw and not isinstance(kw[key], (list, tuple)):
                raise ConfigError(key, "must be a list")
        try:
            return cls(**kw)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError("<root>", str(exc)) from exc

    def to_dict(self):
        d = asdict(self)
        d["channel"] = self.channel.to_dict()
        for key in ("snr_sweep", "schemes", "seeds"):
            d[key] = list(d[key])
        return d


def _is_int(v):
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(doc)


@dataclass(frozen=True)
class SweepRow:
    scheme: str
    snr_in_db: float
    seed: int
    ber: float
    ser: float
    snr_out_db: float
    table_entries: int
    table_ratio: float
    eta: float = None
    coverage: float = None


def snr_key(snr_db):
    """Nonnegative integer key of an input SNR value (millidecibel resolution)."""
    return int(round((float(snr_db) + 1000.0) * 1000.0))


def stream_seeds(seed, snr_db):
    """Seeds of (train symbols, eval symbols, train noise, eval noise) for one sweep point."""
    k = snr_key(snr_db)
    return (derive_seed(seed, 0), derive_seed(seed, 1), derive_seed(seed, 2, k), derive_seed(seed, 3, k))


def _lane_eta(lut2, partition, P):
    try:
        return eta_metric(lut2, partition, P)
    except DegenerateDenominator:
        return 0.0


def _optimize_shared(hlut, weights, n, space):
    """Shared partition, its pooled eta, and the per-lane eta it achieves."""
    try:
        p, pooled = optimize_shared_partition(hlut.lut2, weights, n, space)
    except DegenerateDenominator:
        # nothing to degenerate: every partition reproduces the all-zero tables
        p, pooled = enumerate_partitions(n, space)[0], 0.0
    etas = [_lane_eta(hlut.lut2[lane], p, weights[lane]) for lane in range(hlut.lanes)]
    return p, pooled, etas


def _table_path(out_dir, scheme, snr, seed):
    return os.path.join(out_dir, "tables", f"{scheme}_snr{snr:g}_seed{seed}.json")


def run_sweep(config, out_dir=None):
    """Run every (scheme, snr, seed) point of ``config``.

    When ``out_dir`` is given, ``sweep.csv`` and one table file per trained
    point (under ``tables/``) are written there.

    Returns
    -------
    list of SweepRow, ordered by (scheme, snr_in_db, seed)
    """
    if out_dir is not None:
        try:
            os.makedirs(os.path.join(out_dir, "tables"), exist_ok=True)
        except OSError as exc:
            raise IoError(f"cannot create output directory {out_dir}: {exc}") from exc
    dist = maxwell_boltzmann(solve_lambda(config.target_entropy_bits))
    cfg = config.block
    need_full = "full" in config.schemes
    need_h = any(s not in ("none", "full") for s in config.schemes)
    analytic = pattern_weights(dist, cfg.m) if config.weights_mode == "analytic" else None

    rows = []
    for seed in config.seeds:
        s_tr, s_ev = derive_seed(seed, 0), derive_seed(seed, 1)
        tx_tr = sample_frame(dist, config.lanes, config.train_length, s_tr)
        tx_ev = sample_frame(dist, config.lanes, config.eval_length, s_ev)
        for snr in config.snr_sweep:
            _, _, n_tr, n_ev = stream_seeds(seed, snr)
            channel = config.channel.with_noise(noise_sigma_for_snr(dist, snr))
            rx_tr = apply_channel(channel, tx_tr, n_tr)
            rx_ev = apply_channel(channel, tx_ev, n_ev)
            log.info("seed %d snr %g dB", seed, snr)

            tables, pooled_eta = {}, {}
            if need_full:
                tables["full"] = train_full(tx_tr, rx_tr, cfg, seed=s_tr)
            if need_h:
                hlut = train_hlut(tx_tr, rx_tr, cfg, mode=config.hlut_mode, seed=s_tr)
                tables["hlut"] = hlut
                if analytic is not None:
                    weights = [analytic] * config.lanes
                else:
                    weights = [pattern_weights(tx_tr, cfg.m, "empirical", lane=l) for l in range(config.lanes)]
                for scheme in config.schemes:
                    if scheme.startswith("dh"):
                        p, pooled, etas = _optimize_shared(hlut, weights, int(scheme[2:]), config.partition_space)
                        tables[scheme] = build_dhlut(hlut, p, weights, config.weights_mode, etas)
                        pooled_eta[scheme] = pooled

            for scheme in config.schemes:
                table = tables.get(scheme)
                sig = rx_ev if table is None else compensate(rx_ev, table, cfg)
                rep = evaluate(tx_ev, sig)
                if table is None:
                    entries, ratio, eta, coverage = 0, 0.0, None, None
                else:
                    entries, ratio = table_size_report(scheme, cfg)
                    eta = pooled_eta.get(scheme)
                    coverage = table.coverage
                    if out_dir is not None:
                        save_table(table, _table_path(out_dir, scheme, snr, seed))
                rows.append(SweepRow(scheme, float(snr), int(seed), rep.ber, rep.ser, rep.snr_db,
                                     int(entries), float(ratio), eta, coverage))

    order = {s: i for i, s in enumerate(SCHEMES)}
    rows.sort(key=lambda r: (order[r.scheme], r.snr_in_db, r.seed))
    if out_dir is not None:
        write_rows(rows, os.path.join(out_dir, "sweep.csv"))
    return rows


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".10g")


def write_rows(rows, path):
    """CSV with the fixed column order; reals printed with 10 significant digits."""
    if not rows:
        raise InvalidInput("no rows to write")
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for r in rows:
                w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_rows(path):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header) != CSV_COLUMNS:
                raise InvalidInput(f"{path}: unexpected CSV header {header}")
            records = list(reader)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc

    def opt(v):
        return None if v == "" else float(v)

    return [
        SweepRow(r[0], float(r[1]), int(r[2]), float(r[3]), float(r[4]), float(r[5]),
                 int(r[6]), float(r[7]), opt(r[8]), opt(r[9]))
        for r in records
    ]


def summarize(rows):
    """Seed-averaged curves: {scheme: {"snr_in_db", "ber", "ber_se", "snr_out_db", "snr_out_se"}}."""
    out = {}
    schemes = [s for s in SCHEMES if any(r.scheme == s for r in rows)]
    schemes += sorted({r.scheme for r in rows} - set(schemes))
    for scheme in schemes:
        sel = [r for r in rows if r.scheme == scheme]
        snrs = sorted({r.snr_in_db for r in sel})
        cols = {"snr_in_db": [], "ber": [], "ber_se": [], "snr_out_db": [], "snr_out_se": []}
        for snr in snrs:
            pts = [r for r in sel if r.snr_in_db == snr]
            b = np.array([r.ber for r in pts])
            s = np.array([r.snr_out_db for r in pts])
            se = (lambda v: float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else 0.0)
            cols["snr_in_db"].append(snr)
            cols["ber"].append(float(b.mean()))
            cols["ber_se"].append(se(b))
            cols["snr_out_db"].append(float(s.mean()))
            cols["snr_out_se"].append(se(s))
        out[scheme] = {k: np.array(v) for k, v in cols.items()}
    return out


def emit_report(rows, path, fmt="csv"):
    """Write ``rows`` as CSV, or as a standalone SVG of seed-averaged BER and SNR curves.

    On the BER axis zero values are drawn at ``BER_FLOOR``.
    """
    rows = list(rows)
    if not rows:
        raise InvalidInput("no rows to report")
    if fmt == "csv":
        write_rows(rows, path)
        return path
    if fmt != "svg":
        raise InvalidInput(f"unknown report format {fmt!r}")

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    curves = summarize(rows)
    with matplotlib.rc_context({"svg.hashsalt": "dhlut", "svg.fonttype": "path"}):
        fig, (ax_ber, ax_snr) = plt.subplots(1, 2, figsize=(10, 4))
        for scheme, c in curves.items():
            ax_ber.semilogy(c["snr_in_db"], np.maximum(c["ber"], BER_FLOOR), marker="o", label=scheme)
            ax_snr.plot(c["snr_in_db"], c["snr_out_db"], marker="o", label=scheme)
        ax_ber.set_xlabel("input SNR (dB)")
        ax_ber.set_ylabel("BER")
        ax_ber.set_ylim(bottom=BER_FLOOR / 2)
        ax_snr.set_xlabel("input SNR (dB)")
        ax_snr.set_ylabel("output SNR (dB)")
        for ax in (ax_ber, ax_snr):
            ax.grid(True, which="both", alpha=0.3)
            ax.legend()
        fig.tight_layout()
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc
        finally:
            plt.close(fig)
    return path


def save_frame(frame, path):
    try:
        np.savez(path, data=frame.data, seed=frame.seed, discrete=frame.discrete, edge=frame.edge)
    except OSError as exc:
        raise IoError(f"cannot write frame file {path}: {exc}") from exc


def load_frame(path):
    try:
        with np.load(path) as z:
            return SymbolFrame(z["data"], seed=int(z["seed"]), discrete=bool(z["discrete"]), edge=int(z["edge"]))
    except OSError as exc:
        raise IoError(f"cannot read frame file {path}: {exc}") from exc
