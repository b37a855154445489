"""
The input-SNR sweep
===================

Runs the default experiment (six schemes, five SNR points, five seeds),
writes ``sweep.csv`` plus every trained table, and renders the seed-averaged
BER and output-SNR curves to an SVG. Takes about twenty seconds.

Pass an output directory as the first argument; the default is
``./sweep_out``.
"""

# %%
import sys
import time
from pathlib import Path

from dhlut.experiment import ExperimentConfig, emit_report, run_sweep, summarize

out = Path(sys.argv[1] if len(sys.argv) > 1 else "sweep_out")
cfg = ExperimentConfig()
t0 = time.perf_counter()
rows = run_sweep(cfg, out)
print(f"{len(rows)} rows in {time.perf_counter() - t0:.1f} s -> {out / 'sweep.csv'}")

# %%
# Seed-averaged curves; the gain is measured against no compensation.
curves = summarize(rows)
base = curves["none"]["snr_out_db"]
print("scheme  " + "  ".join(f"{s:>8g}" for s in cfg.snr_sweep))
for scheme, c in curves.items():
    print(f"{scheme:6s} BER " + "  ".join(f"{b:8.2e}" for b in c["ber"]))
    print(f"{'':6s} gain" + "  ".join(f"{g:8.2f}" for g in c["snr_out_db"] - base))

# %%
emit_report(rows, out / "sweep.svg", "svg")
print("figure:", out / "sweep.svg")
