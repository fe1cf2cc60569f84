"""
Shot noise and depolarization
=============================

Squared overlaps are never read out directly: the SWAP test gives
P0 = (1 + s) / 2 and the uniform-overlap circuit gives P0 = s, each
estimated from a finite number of shots. A depolarizing channel mixes
each register toward the maximally mixed state first.
"""

# %%
import numpy as np

from ccqkan.statevector import (
    EIGENVALUE_SCALE,
    EvalCondition,
    depolarize_swap,
    depolarize_uniform,
    measure_swap,
    measure_uniform,
)

rng = np.random.default_rng(1)
s = 0.36
for shots in (100, 1000, 10_000):
    cond = EvalCondition.shots(shots)
    sw = measure_swap(np.full(5000, s), cond, 4, rng)
    un = measure_uniform(np.full(5000, s), cond, 4, rng)
    print(f"{shots:>6} shots  swap {sw.mean():.4f} +- {sw.std():.4f}   uniform {un.mean():.4f} +- {un.std():.4f}")

# %%
# The SWAP estimator 2 n0 / N - 1 has twice the spread of the direct
# frequency and gets clamped at zero, so small overlaps come out biased
# upward.
cond = EvalCondition.shots(1000)
print("s = 0.001 via SWAP test:", measure_swap(np.full(5000, 0.001), cond, 4, rng).mean())
print("s = 0.001 via uniform:  ", measure_uniform(np.full(5000, 0.001), cond, 4, rng).mean())

# %%
# Depolarization with p = 0.01. The full channel adds a floor of order p/D;
# the eigenvalue-only shortcut just rescales.
for D in (4, 8, 32):
    print(
        f"D={D:>2}  swap exact {depolarize_swap(0.5, 0.01, D):.6f} scaled {depolarize_swap(0.5, 0.01, D, EIGENVALUE_SCALE):.6f}"
        f"   uniform exact {depolarize_uniform(0.5, 0.01, D):.6f} scaled {depolarize_uniform(0.5, 0.01, D, EIGENVALUE_SCALE):.6f}"
    )
