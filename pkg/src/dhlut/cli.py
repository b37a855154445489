"""Command-line entry point.

Exit codes: 0 success, 2 configuration or argument error, 3 I/O error.
"""

import argparse
import json
import logging
import os
import sys

from .channel import apply_channel, noise_sigma_for_snr
from .errors import ConfigError, InvalidInput, InvalidParameter, IoError, OutOfRange
from .experiment import (
    ExperimentConfig,
    emit_report,
    load_config,
    load_frame,
    read_rows,
    run_sweep,
    save_frame,
)
from .lut import (
    BlockConfig,
    DhLut,
    build_dhlut,
    compensate,
    eta_metric,
    load_table,
    optimize_partition,
    optimize_shared_partition,
    pattern_weights,
    save_table,
    table_size_report,
    train_full,
    train_hlut,
)
from .metrics import evaluate
from .shaping import derive_seed, maxwell_boltzmann, sample_frame, solve_lambda

EXIT_CONFIG = 2
EXIT_IO = 3


def _config(args):
    return load_config(args.config) if getattr(args, "config", None) else ExperimentConfig()


def cmd_generate(args):
    cfg = _config(args)
    dist = maxwell_boltzmann(solve_lambda(cfg.target_entropy_bits))
    length = args.length or cfg.train_length
    tx = sample_frame(dist, cfg.lanes, length, derive_seed(args.seed, 0))
    channel = cfg.channel.with_noise(noise_sigma_for_snr(dist, args.snr))
    rx = apply_channel(channel, tx, derive_seed(args.seed, 2))
    os.makedirs(args.out, exist_ok=True)
    save_frame(tx, os.path.join(args.out, "tx.npz"))
    save_frame(rx, os.path.join(args.out, "rx.npz"))
    print(f"wrote {cfg.lanes} x {length} frames to {args.out}")


def cmd_train(args):
    tx, rx = load_frame(args.tx), load_frame(args.rx)
    cfg = BlockConfig(args.m, args.min_count)
    if args.variant == "full":
        table = train_full(tx, rx, cfg)
    else:
        table = train_hlut(tx, rx, cfg, mode=args.mode)
    save_table(table, args.out)
    print(f"{table.variant}: {table.entries} entries/lane, coverage {table.coverage:.4f}")


def cmd_optimize(args):
    hlut = load_table(args.table)
    if hlut.variant != "hlut":
        raise InvalidInput("optimize needs an H-LUT table file")
    if args.weights_from:
        frame = load_frame(args.weights_from)
        weights = [pattern_weights(frame, hlut.m, "empirical", lane=l) for l in range(hlut.lanes)]
    else:
        dist = maxwell_boltzmann(solve_lambda(args.entropy))
        weights = [pattern_weights(dist, hlut.m)] * hlut.lanes
    if args.per_lane:
        parts, etas = [], []
        for lane in range(hlut.lanes):
            p, e = optimize_partition(hlut.lut2[lane], weights[lane], args.groups, args.space)
            parts.append(p)
            etas.append(e)
            print(f"lane {lane}: groups {p.groups} eta {e:.6g}")
    else:
        p, pooled = optimize_shared_partition(hlut.lut2, weights, args.groups, args.space)
        parts = p
        etas = [eta_metric(hlut.lut2[lane], p, weights[lane]) for lane in range(hlut.lanes)]
        print(f"shared groups {p.groups} pooled eta {pooled:.6g}")
    save_table(build_dhlut(hlut, parts, weights, eta=etas), args.out)


def cmd_compensate(args):
    rx = load_frame(args.rx)
    table = load_table(args.table)
    out = compensate(rx, table)
    save_frame(out, args.out)
    if args.tx:
        rep = evaluate(load_frame(args.tx), out)
        print(f"ber {rep.ber:.6g} ser {rep.ser:.6g} snr {rep.snr_db:.4f} dB over {rep.symbols_counted} symbols")


def cmd_sweep(args):
    rows = run_sweep(load_config(args.config), args.out)
    print(f"wrote {len(rows)} rows to {os.path.join(args.out, 'sweep.csv')}")


def cmd_report(args):
    rows = read_rows(args.rows)
    out = args.out or os.path.splitext(args.rows)[0] + f"_report.{args.format}"
    emit_report(rows, out, args.format)
    print(f"wrote {out}")


def cmd_info(args):
    table = load_table(args.table)
    cfg = BlockConfig(table.m, table.min_count)
    variant = f"dh{table.n}" if isinstance(table, DhLut) else table.variant
    entries, ratio = table_size_report(variant, cfg)
    info = {
        "variant": variant,
        "m": table.m,
        "lanes": table.lanes,
        "entries_per_lane": entries,
        "ratio_vs_full": ratio,
        "coverage": table.coverage,
    }
    if isinstance(table, DhLut):
        info["eta"] = list(table.eta)
        info["partition"] = [p.groups for p in table.partitions]
    print(json.dumps(info, indent=1))


def build_parser():
    parser = argparse.ArgumentParser(prog="dhlut", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a shaped frame and pass it through the channel")
    p.add_argument("--config")
    p.add_argument("--snr", type=float, required=True, help="input SNR in dB")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--length", type=int)
    p.add_argument("--out", required=True, help="directory for tx.npz and rx.npz")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train a full LUT or an H-LUT")
    p.add_argument("--tx", required=True)
    p.add_argument("--rx", required=True)
    p.add_argument("--variant", choices=("full", "hlut"), default="hlut")
    p.add_argument("--mode", choices=("sequential", "parallel"), default="sequential")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--min-count", type=int, default=8)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("optimize", help="degenerate an H-LUT with the eta-optimal partition")
    p.add_argument("--table", required=True)
    p.add_argument("--groups", type=int, required=True)
    p.add_argument("--space", choices=("contiguous", "all"), default="contiguous")
    p.add_argument("--entropy", type=float, default=5.8, help="analytic weights from this shaping target")
    p.add_argument("--weights-from", help="frame file for empirical weights")
    p.add_argument("--per-lane", action="store_true", help="optimize each lane separately instead of sharing one partition")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("compensate", help="apply a table to a received frame")
    p.add_argument("--rx", required=True)
    p.add_argument("--table", required=True)
    p.add_argument("--tx", help="known transmitted frame; prints metrics when given")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compensate)

    p = sub.add_parser("sweep", help="run a full experiment sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="render sweep rows as CSV or SVG")
    p.add_argument("--rows", required=True)
    p.add_argument("--format", choices=("csv", "svg"), default="svg")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("info", help="print size, ratio, eta and coverage of a table file")
    p.add_argument("--table", required=True)
    p.set_defaults(func=cmd_info)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IoError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidParameter, InvalidInput, OutOfRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
