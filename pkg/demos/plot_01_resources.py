"""
Qubit and circuit budgets
=========================

How many qubits and circuit executions a two-layer [n, n, 1] network
needs per forward pass, for three ways of laying out its edges.
"""

# %%
# Every edge carries a degree-d Chebyshev expansion, i.e. a vector of
# d + 1 coefficients. Encoding it as amplitudes takes ceil(log2(d + 1))
# qubits. Running all n^2 + n edges side by side needs that many
# registers at once; running them one after another reuses a single
# register; merging the n incoming edges of a node into one state needs
# ceil(log2(n(d + 1))) qubits and one circuit per node.
from ccqkan import executions_per_grad_step, param_count, resources
from ccqkan.network import TABLE_CONFIGS

print(f"{'net':>8} {'d':>2} {'Qpar':>5} {'Qseq':>5} {'Cseq':>5} {'Qred':>5} {'Cred':>5} {'dQ':>3}")
for n, d in TABLE_CONFIGS:
    r = resources(n, d)
    print(f"[{n},{n},1] {d:>2} {r.q_par:>5} {r.q_seq:>5} {r.c_seq:>5} {r.q_red:>5} {r.c_red:>5} {r.delta_q:>3}")

# %%
# The merged layout pays at most two extra qubits over the sequential one
# while cutting executions from n^2 + n to n + 1. For a finite-difference
# gradient over 30 training points that difference is multiplied by
# twice the parameter count.
n, d = 4, 5
p = param_count(n, d)
r = resources(n, d)
print(f"[4,4,1] d=5: {p} parameters")
print("executions per gradient, merged:    ", executions_per_grad_step(p, 30, r.c_red))
print("executions per gradient, sequential:", executions_per_grad_step(p, 30, r.c_seq))
