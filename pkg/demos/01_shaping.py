"""
Shaping an 8-ASK lane
=====================

A PS-64-QAM symbol is two independent 8-ASK lanes. Shaping gives each lane
level ``a`` the Maxwell-Boltzmann probability ``exp(-lam a^2) / Z``; ``lam``
is picked so that the 64-QAM entropy hits a target in bits.
"""

# %%
# Solve for the rate parameter at 5.8 bits per 64-QAM symbol.
import numpy as np

from dhlut import LEVELS, entropy_bits, gray_encode, maxwell_boltzmann, sample_frame, solve_lambda

lam = solve_lambda(5.8)
dist = maxwell_boltzmann(lam)
print(f"lambda = {lam:.6f}, entropy = {entropy_bits(dist):.6f} bits, mean lane power = {dist.mean_power:.3f}")

# %%
# The inner levels carry most of the probability.
for level, p in zip(LEVELS, dist.probs):
    print(f"{level:+d}  {p:.4f}  {'#' * int(round(200 * p))}")

# %%
# Sampling is reproducible per (seed, lane); the Gray labels differ in one bit
# between neighbours.
frame = sample_frame(dist, lanes=2, length=1 << 16, seed=7)
freq = np.array([np.mean(frame.data == a) for a in LEVELS])
print("empirical:", np.round(freq, 4))
print("gray bits of -7..7:", [gray_encode(int(a)) for a in LEVELS])
