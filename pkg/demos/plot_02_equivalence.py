"""
One circuit per node gives the same numbers
===========================================

The merged encoding concatenates c_ij * T(x_i) over all inputs i of node
j. Its overlap with the uniform superposition, rescaled by the vector norm
and sqrt(D), is exactly the node's pre-activation sum. This script checks
that numerically and then trains both layouts from one starting point.
"""

# %%
import numpy as np

from ccqkan import NetworkConfig, NetworkParams, forward_batch, init_params, synthetic_dataset, train
from ccqkan.chebyshev import cheb_basis
from ccqkan.network import MERGED, SEQUENTIAL, build_merged_vector, node_preactivation
from ccqkan.rng import stream

rng = np.random.default_rng(0)
c = rng.uniform(-1, 1, (3, 4))
x = rng.uniform(-1, 1, 3)
B = cheb_basis(x, 3)
m = build_merged_vector(c, B)
print("classical sum  ", m.sum())
print("merged circuit ", node_preactivation(c, B, MERGED))
print("edge by edge   ", node_preactivation(c, B, SEQUENTIAL))

# %%
# Whole networks: random parameters, random inputs.
n, d = 4, 5
p = NetworkParams(rng.uniform(-1, 1, (n, n, d + 1)), rng.uniform(-1, 1, (n, d + 1)), 1.0, 0.0)
X = rng.uniform(-1, 1, (500, n))
gap = np.abs(forward_batch(p, X, NetworkConfig(n, d, MERGED)) - forward_batch(p, X, NetworkConfig(n, d, SEQUENTIAL)))
print(f"largest output gap over 500 inputs: {gap.max():.1e}")

# %%
# Because the outputs agree, so do finite-difference gradients, and the
# two layouts follow the same optimization path.
ds = synthetic_dataset(2)
cfg = NetworkConfig(2, 2, SEQUENTIAL)
p0 = init_params(cfg, stream(0, "init", 0))
a = train(p0, ds.inputs, ds.targets, cfg)
b = train(p0, ds.inputs, ds.targets, cfg.with_mode(MERGED))
for step in (0, 5, 10, 20):
    print(f"step {step:>2}: edge-by-edge {a.losses[step]:.6f}  merged {b.losses[step]:.6f}")
