"""
Full LUT against the hierarchical LUT
=====================================

A full pattern LUT stores one correction for each of the ``8^3 = 512``
three-symbol patterns. The hierarchical version splits that into 8 entries
keyed by the current symbol and 64 keyed by the two past symbols, 14 % of the
size. On a channel whose distortion is a sum of per-tap terms the two are
nearly equivalent.
"""

# %%
from dhlut import (
    DEFAULT_CHANNEL,
    BlockConfig,
    apply_channel,
    compensate,
    evaluate,
    maxwell_boltzmann,
    noise_sigma_for_snr,
    sample_frame,
    solve_lambda,
    train_full,
    train_hlut,
)

dist = maxwell_boltzmann(solve_lambda(5.8))
channel = DEFAULT_CHANNEL.with_noise(noise_sigma_for_snr(dist, 21.0))
cfg = BlockConfig(m=3)

# %%
# Train on one frame, evaluate on another with fresh noise.
tx_train = sample_frame(dist, 2, 1 << 19, seed=1)
tx_eval = sample_frame(dist, 2, 1 << 17, seed=2)
rx_train = apply_channel(channel, tx_train, seed=3)
rx_eval = apply_channel(channel, tx_eval, seed=4)

full = train_full(tx_train, rx_train, cfg)
hlut = train_hlut(tx_train, rx_train, cfg)

# %%
for name, table in (("none", None), ("full", full), ("hlut", hlut)):
    out = rx_eval if table is None else compensate(rx_eval, table)
    rep = evaluate(tx_eval, out)
    size = "" if table is None else f"{table.entries:4d} entries"
    print(f"{name:5s} {size:13s} SNR {rep.snr_db:6.2f} dB  BER {rep.ber:.2e}")
