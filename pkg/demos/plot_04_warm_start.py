"""
Warm-starting the merged network
================================

Train the edge-by-edge network, copy its parameters into the merged
network and keep training (Red-T). Compare with a merged network trained
from its own random start (Red-I), over 16 seeds, and test the paired
differences with the Wilcoxon signed-rank test.
"""

# %%
import numpy as np

from ccqkan import GridSpec, run_grid, summarize
from ccqkan.training import ORIGINAL, RED_I, RED_T

records = run_grid(GridSpec(configs=[(2, 2)]))
summary = summarize(records)
cell = summary.cells["[2,2,1] d=2"]["ideal"]
for model in (ORIGINAL, RED_T, RED_I):
    print(f"{model:>9}: final MSE {cell[model]['mean']:.4f} +- {cell[model]['std']:.4f} (seeds 0-9)")

# %%
for pair in ("original_vs_red_t", "original_vs_red_i", "red_t_vs_red_i"):
    w = cell[pair]
    print(f"{pair:>18}: T={w['T']:<5} p={w['p']:.2e} r={w['r']:+.2f} {w['label']}")

# %%
# Mean loss curve, seeds 0-9.
for model in (ORIGINAL, RED_T, RED_I):
    mean, _ = summary.curves[(2, 2, "ideal", model)]
    print(f"{model:>9}: " + " ".join(f"{v:.3f}" for v in mean[::4]))
