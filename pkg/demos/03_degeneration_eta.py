"""
Degenerating LUT-2 and the eta metric
=====================================

The past-symbol table can be coarsened further by merging the eight levels
into ``n`` groups. Each merged cell holds the probability-weighted mean of the
entries it covers, and ``eta`` measures what was lost. The optimizer scans
all candidate groupings and keeps the smallest ``eta``.
"""

# %%
from dhlut import (
    DEFAULT_CHANNEL,
    BlockConfig,
    apply_channel,
    build_dhlut,
    eta_metric,
    maxwell_boltzmann,
    noise_sigma_for_snr,
    optimize_partition,
    pattern_weights,
    sample_frame,
    solve_lambda,
    train_hlut,
)
from dhlut.lut import contiguous_partitions

dist = maxwell_boltzmann(solve_lambda(5.8))
tx = sample_frame(dist, 1, 1 << 19, seed=11)
rx = apply_channel(DEFAULT_CHANNEL.with_noise(noise_sigma_for_snr(dist, 21.0)), tx, seed=12)
hlut = train_hlut(tx, rx, BlockConfig(m=3))
P = pattern_weights(dist, m=3)
lut2 = hlut.lut2[0]

# %%
# eta for every contiguous 4-group split, best first.
scored = sorted((eta_metric(lut2, p, P), p.groups) for p in contiguous_partitions(4))
for e, groups in scored[:5]:
    print(f"eta {e:.4f}  {groups}")

# %%
# Optimal groupings for n = 2, 4, 6 in both search spaces.
for n in (2, 4, 6):
    for space in ("contiguous", "all"):
        p, e = optimize_partition(lut2, P, n, space)
        dh = build_dhlut(hlut, p, P, eta=e)
        print(f"n={n} {space:10s} eta {e:.4f}  {dh.entries:3d} entries  {p.groups}")
