"""Two-layer ``[n, n, 1]`` Chebyshev quantum KAN.

Each edge carries a Chebyshev expansion ``phi(x) = sum_k c_k T_k(x)``
evaluated as a quantum inner product. Two execution modes compute the
same function:

``sequential``
    one SWAP-test circuit per edge; the squared overlap of the coefficient
    state and the basis state is rescaled by both norms and signed
    classically.
``merged``
    one circuit per node; the element-wise products ``c_ij * T(x_i)`` of
    all incoming edges are concatenated into a single amplitude state
    whose overlap with the uniform superposition gives the node sum.

Batched functions take inputs of shape ``(N, n)`` and evaluate all
samples at once. Shot sampling draws in C order over
``(sample, node, edge)`` for layer one, then ``(sample,)`` for the
output node.
"""

from dataclasses import dataclass, field

import numpy as np

from .chebyshev import cheb_basis
from .errors import InvalidInputError
from .statevector import IDEAL, EvalCondition, measure_swap, measure_uniform, n_qubits

SEQUENTIAL = "sequential"
MERGED = "merged"
MODES = (SEQUENTIAL, MERGED)


@dataclass(frozen=True)
class NetworkConfig:
    n: int
    d: int
    mode: str = SEQUENTIAL

    def __post_init__(self):
        if int(self.n) < 1 or int(self.d) < 1:
            raise InvalidInputError(f"need n >= 1 and d >= 1, got n={self.n}, d={self.d}")
        if self.mode not in MODES:
            raise InvalidInputError(f"unknown mode {self.mode!r}")

    def with_mode(self, mode):
        return NetworkConfig(self.n, self.d, mode)


@dataclass
class NetworkParams:
    """Chebyshev coefficients plus the output scale and shift.

    ``w1[i, j, k]`` is coefficient ``k`` on the edge from input ``i`` to
    hidden node ``j``; ``w2[i, k]`` is coefficient ``k`` on the edge from
    hidden node ``i`` to the output.
    """

    w1: np.ndarray
    w2: np.ndarray
    alpha: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        self.w1 = np.array(self.w1, dtype=float)
        self.w2 = np.array(self.w2, dtype=float)
        n, n2, k = self.w1.shape
        if n != n2 or self.w2.shape != (n, k):
            raise InvalidInputError(f"inconsistent shapes w1={self.w1.shape}, w2={self.w2.shape}")
        self.alpha = float(self.alpha)
        self.beta = float(self.beta)

    @property
    def n(self):
        return self.w1.shape[0]

    @property
    def d(self):
        return self.w1.shape[2] - 1

    def to_vector(self):
        return np.concatenate([self.w1.ravel(), self.w2.ravel(), [self.alpha, self.beta]])

    @classmethod
    def from_vector(cls, theta, n, d):
        theta = np.asarray(theta, dtype=float)
        if theta.size != param_count(n, d):
            raise InvalidInputError(f"expected {param_count(n, d)} parameters, got {theta.size}")
        k = d + 1
        n1 = n * n * k
        w1 = theta[:n1].reshape(n, n, k)
        w2 = theta[n1 : n1 + n * k].reshape(n, k)
        return cls(w1, w2, theta[-2], theta[-1])

    def copy(self):
        return NetworkParams(self.w1.copy(), self.w2.copy(), self.alpha, self.beta)


@dataclass(frozen=True)
class ResourceReport:
    n: int
    d: int
    q_par: int
    c_par: int
    q_seq: int
    c_seq: int
    q_red: int
    c_red: int
    delta_q: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "delta_q", self.q_red - self.q_seq)

    def row(self):
        return (self.q_par, self.c_par, self.q_seq, self.c_seq, self.q_red, self.c_red, self.delta_q)


# (n, d) pairs of the reference resource table
TABLE_CONFIGS = ((2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4), (4, 2), (4, 3), (4, 4), (4, 5))


def resources(n, d):
    """Qubits and circuit executions per forward pass for the three strategies."""
    if int(n) < 1 or int(d) < 1:
        raise InvalidInputError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    q_e = n_qubits(d + 1)
    edges = n * n + n
    return ResourceReport(
        n=n, d=d,
        q_par=edges * q_e, c_par=1,
        q_seq=q_e, c_seq=edges,
        q_red=n_qubits(n * (d + 1)), c_red=n + 1,
    )


def param_count(n, d):
    return (n * n + n) * (d + 1) + 2


def executions_per_grad_step(n_params, n_samples, c_fwd):
    """Circuit executions for one central-difference gradient over a batch."""
    return 2 * n_params * n_samples * c_fwd


def build_merged_vector(coeff_block, bases):
    """Concatenate ``c_i * T(x_i)`` over the incoming edges of one node.

    ``coeff_block`` and ``bases`` both have shape ``(n, d + 1)``; entry
    ``i * (d + 1) + k`` of the result is ``coeff_block[i, k] * bases[i, k]``.
    """
    c = np.asarray(coeff_block, dtype=float)
    b = np.asarray(bases, dtype=float)
    if c.ndim != 2 or c.shape != b.shape:
        raise InvalidInputError(f"shape mismatch: coefficients {c.shape}, bases {b.shape}")
    return (c * b).ravel()


def _safe_div(num, den):
    out = np.zeros(np.broadcast_shapes(np.shape(num), np.shape(den)), dtype=np.result_type(num, den))
    np.divide(num, den, out=out, where=den > 0)
    return out


def _sign(x):
    return np.where(x >= 0.0, 1.0, -1.0)


# Layer arithmetic runs in extended precision and is rounded to float64
# once per node. Both modes then agree bit-for-bit in most cases, which
# keeps finite-difference gradients (and hence training trajectories) of
# the two modes from drifting apart through roundoff.
WORK_DTYPE = np.longdouble


def _measured(sq, measure, cond, D, rng):
    if cond.kind == IDEAL:
        return sq
    return np.asarray(measure(sq.astype(float), cond, D, rng), dtype=WORK_DTYPE)


def sequential_layer(coeffs, bases, cond, rng=None):
    """Per-edge SWAP-test evaluation of one layer.

    ``coeffs`` has shape ``(n_in, n_out, d + 1)`` and ``bases`` shape
    ``(N, n_in, d + 1)``; returns node pre-activations ``(N, n_out)``.
    """
    c = np.transpose(np.asarray(coeffs, dtype=WORK_DTYPE), (1, 0, 2))  # (n_out, n_in, K)
    bases = np.asarray(bases, dtype=WORK_DTYPE)
    c_norm = np.linalg.norm(c, axis=-1)
    b_norm = np.linalg.norm(bases, axis=-1)
    c_hat = _safe_div(c, c_norm[..., None])
    b_hat = _safe_div(bases, b_norm[..., None])
    ov = np.einsum("jik,nik->nji", c_hat, b_hat)  # (N, n_out, n_in)
    scale = c_norm[None, :, :] * b_norm[:, None, :]
    D = 2 ** n_qubits(c.shape[-1])
    est = _measured(ov * ov, measure_swap, cond, D, rng)
    edge = np.where(scale > 0.0, _sign(ov) * scale * np.sqrt(est), 0.0)
    return edge.sum(axis=-1).astype(float)


def merged_layer(coeffs, bases, cond, rng=None):
    """Merged-encoding evaluation of one layer (one circuit per node).

    Same shapes as :func:`sequential_layer`.
    """
    n_in, n_out, K = np.shape(coeffs)
    N = np.shape(bases)[0]
    c = np.asarray(coeffs, dtype=WORK_DTYPE)
    b = np.asarray(bases, dtype=WORK_DTYPE)
    m = (np.transpose(c, (1, 0, 2))[None] * b[:, None]).reshape(N, n_out, n_in * K)
    D = 2 ** n_qubits(n_in * K)
    norm = np.linalg.norm(m, axis=-1)
    amps = np.zeros((N, n_out, D), dtype=WORK_DTYPE)
    amps[..., : n_in * K] = _safe_div(m, norm[..., None])
    ov = amps.sum(axis=-1) / np.sqrt(WORK_DTYPE(D))
    sign = _sign(m.sum(axis=-1))
    est = _measured(ov * ov, measure_uniform, cond, D, rng)
    return np.where(norm > 0.0, sign * norm * np.sqrt(WORK_DTYPE(D)) * np.sqrt(est), 0.0).astype(float)


_LAYERS = {SEQUENTIAL: sequential_layer, MERGED: merged_layer}


def node_preactivation(coeff_block, bases, mode=MERGED, cond=None, rng=None):
    """Pre-activation ``S_j`` of a single node from its ``(n, d+1)`` coefficient block."""
    cond = cond or EvalCondition.ideal()
    c = np.asarray(coeff_block, dtype=float)
    b = np.asarray(bases, dtype=float)
    if c.ndim != 2 or c.shape != b.shape:
        raise InvalidInputError(f"shape mismatch: coefficients {c.shape}, bases {b.shape}")
    return float(_LAYERS[mode](c[:, None, :], b[None], cond, rng)[0, 0])


def forward_batch(params, X, cfg, cond=None, rng=None):
    """Network outputs for every row of ``X`` (shape ``(N, n)``)."""
    cond = cond or EvalCondition.ideal()
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != cfg.n or params.n != cfg.n or params.d != cfg.d:
        raise InvalidInputError(
            f"inputs {X.shape} / params (n={params.n}, d={params.d}) do not match config (n={cfg.n}, d={cfg.d})"
        )
    if cond.kind != IDEAL and rng is None:
        raise InvalidInputError("a random generator is required for shot-based conditions")
    layer = _LAYERS[cfg.mode]
    h = np.tanh(layer(params.w1, cheb_basis(X, cfg.d), cond, rng))
    s2 = layer(params.w2[:, None, :], cheb_basis(h, cfg.d), cond, rng)[:, 0]
    return params.alpha * s2 + params.beta


def forward(params, x, cfg, cond=None, rng=None):
    """Network output for a single input vector of length ``n``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (cfg.n,):
        raise InvalidInputError(f"expected input of length {cfg.n}, got shape {x.shape}")
    return float(forward_batch(params, x[None], cfg, cond, rng)[0])


def hidden_activations(params, X, cfg, cond=None, rng=None):
    """First-layer outputs ``tanh(S_j)``, shape ``(N, n)``."""
    cond = cond or EvalCondition.ideal()
    return np.tanh(_LAYERS[cfg.mode](params.w1, cheb_basis(np.asarray(X, float), cfg.d), cond, rng))
