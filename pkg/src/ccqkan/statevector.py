"""Real-amplitude statevector engine.

Amplitude encoding, overlaps, measurement statistics for the SWAP test
and for the Hadamard-then-measure-all-zero (uniform overlap) circuit,
binomial shot sampling and the depolarizing channel evaluated in closed
form on outcome probabilities.

All amplitudes are real. The probability helpers are elementwise and
accept numpy arrays as well as scalars.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

IDEAL = "ideal"
SHOTS = "shots"
SHOTS_NOISE = "shots_noise"

EXACT_CHANNEL = "exact_channel"
EIGENVALUE_SCALE = "eigenvalue_scale"

_KINDS = (IDEAL, SHOTS, SHOTS_NOISE)
_NOISE_MODES = (EXACT_CHANNEL, EIGENVALUE_SCALE)


@dataclass(frozen=True)
class AmplitudeState:
    amplitudes: np.ndarray
    norm: float
    qubits: int

    @property
    def dim(self):
        return self.amplitudes.shape[0]

    @property
    def is_zero(self):
        """True for the zero-norm sentinel returned when encoding a zero vector."""
        return self.norm == 0.0


@dataclass(frozen=True)
class EvalCondition:
    """How overlaps are turned into numbers.

    ``ideal`` uses exact squared overlaps, ``shots`` estimates them from
    ``n_shots`` binomial samples, ``shots_noise`` additionally passes the
    prepared states through a depolarizing channel with probability
    ``p_depol`` before sampling.
    """

    kind: str = IDEAL
    n_shots: int = 1000
    p_depol: float = 0.0
    noise_mode: str = EXACT_CHANNEL

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidInputError(f"unknown condition kind {self.kind!r}")
        if self.noise_mode not in _NOISE_MODES:
            raise InvalidInputError(f"unknown noise mode {self.noise_mode!r}")
        if self.kind != IDEAL and int(self.n_shots) < 1:
            raise InvalidInputError("n_shots must be >= 1")
        if not 0.0 <= self.p_depol <= 1.0:
            raise InvalidInputError("p_depol must lie in [0, 1]")

    @classmethod
    def ideal(cls):
        return cls(IDEAL)

    @classmethod
    def shots(cls, n_shots=1000):
        return cls(SHOTS, n_shots=n_shots)

    @classmethod
    def shots_noise(cls, n_shots=1000, p_depol=0.01, noise_mode=EXACT_CHANNEL):
        return cls(SHOTS_NOISE, n_shots=n_shots, p_depol=p_depol, noise_mode=noise_mode)

    @property
    def label(self):
        return self.kind


def n_qubits(length):
    """Smallest q with 2**q >= length."""
    length = int(length)
    if length < 1:
        raise InvalidInputError("length must be positive")
    return (length - 1).bit_length()


def encode(v):
    """Zero-pad ``v`` to a power-of-two length and normalize it.

    A zero vector yields the sentinel state (``norm == 0``, all-zero
    amplitudes); callers treat its contribution as 0 without a
    measurement.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise InvalidInputError("encode expects a non-empty 1-D vector")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("encode expects finite entries")
    q = n_qubits(v.size)
    padded = np.zeros(2**q)
    padded[: v.size] = v
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        return AmplitudeState(padded, 0.0, q)
    return AmplitudeState(padded / norm, norm, q)


def decode(state, length=None):
    """Undo :func:`encode`: rescale by the stored norm and truncate."""
    v = state.amplitudes * state.norm
    return v if length is None else v[:length]


def _check_live(*states):
    for s in states:
        if s.is_zero:
            raise InvalidInputError("zero-norm sentinel has no quantum state")


def overlap(a, b):
    """Real inner product of two states on the same register size."""
    _check_live(a, b)
    if a.qubits != b.qubits:
        raise InvalidInputError(f"register mismatch: {a.qubits} vs {b.qubits} qubits")
    return float(a.amplitudes @ b.amplitudes)


def uniform_overlap(s):
    """Overlap with the uniform superposition, ``D**-0.5 * sum(amplitudes)``."""
    _check_live(s)
    return float(s.amplitudes.sum() / np.sqrt(s.dim))


def _check_unit(x, name):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise InvalidInputError(f"{name} must lie in [0, 1]")
    return x


def _ret(x):
    return float(x) if np.ndim(x) == 0 else x


def swap_test_p0(sq_overlap):
    """Ancilla-zero probability of the SWAP test, ``(1 + |<a|b>|^2) / 2``."""
    s = _check_unit(sq_overlap, "sq_overlap")
    return _ret(0.5 * (1.0 + s))


def sample_counts(p_true, n_shots, rng):
    """Number of zero outcomes in ``n_shots`` repetitions, ``Binom(n_shots, p_true)``."""
    p = _check_unit(p_true, "p_true")
    n_shots = int(n_shots)
    if n_shots < 1:
        raise InvalidInputError("n_shots must be >= 1")
    counts = rng.binomial(n_shots, p)
    return int(counts) if np.ndim(counts) == 0 else counts


def estimate_sq_overlap_swap(n0, n_shots, clamp=True):
    """SWAP-test estimate ``2 n0 / N - 1`` of the squared overlap.

    Negative values (possible from sampling) are clamped to zero unless
    ``clamp`` is false.
    """
    raw = 2.0 * np.asarray(n0) / n_shots - 1.0
    return _ret(np.maximum(raw, 0.0) if clamp else raw)


def estimate_sq_overlap_uniform(n0, n_shots):
    """All-zero frequency of the uniform-overlap circuit."""
    return _ret(np.asarray(n0) / n_shots)


def dominant_eigenvalue(p, D):
    """Largest eigenvalue of ``(1-p)|psi><psi| + p I/D``."""
    return (1.0 - p) + p / D


def depolarize_swap(sq_overlap, p, D, noise_mode=EXACT_CHANNEL):
    """Squared-overlap seen by a SWAP test when both inputs are depolarized.

    ``exact_channel`` returns ``Tr[rho_a rho_b]`` for the two depolarized
    states; ``eigenvalue_scale`` multiplies by the squared dominant eigenvalue
    instead.
    """
    s = _check_unit(sq_overlap, "sq_overlap")
    _check_channel(p, D)
    if noise_mode == EXACT_CHANNEL:
        out = (1.0 - p) ** 2 * s + 2.0 * (1.0 - p) * p / D + p * p / D
    elif noise_mode == EIGENVALUE_SCALE:
        out = dominant_eigenvalue(p, D) ** 2 * s
    else:
        raise InvalidInputError(f"unknown noise mode {noise_mode!r}")
    return _ret(out)


def depolarize_uniform(sq_overlap, p, D, noise_mode=EXACT_CHANNEL):
    """All-zero probability after a depolarized preparation, ``<U|rho|U>``."""
    s = _check_unit(sq_overlap, "sq_overlap")
    _check_channel(p, D)
    if noise_mode == EXACT_CHANNEL:
        out = (1.0 - p) * s + p / D
    elif noise_mode == EIGENVALUE_SCALE:
        out = dominant_eigenvalue(p, D) * s
    else:
        raise InvalidInputError(f"unknown noise mode {noise_mode!r}")
    return _ret(out)


def _check_channel(p, D):
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError("depolarizing probability must lie in [0, 1]")
    if D < 2 or D & (D - 1):
        raise InvalidInputError(f"Hilbert dimension must be a power of two >= 2, got {D}")


def measure_swap(sq_overlap, cond, D, rng):
    """Squared overlap as returned by the SWAP-test pathway under ``cond``.

    Ideal returns the input unchanged. ``D`` is the dimension of each
    register entering the SWAP test (only used for noise).
    """
    if cond.kind == IDEAL:
        return sq_overlap
    s = np.clip(sq_overlap, 0.0, 1.0)
    if cond.kind == SHOTS_NOISE:
        s = depolarize_swap(s, cond.p_depol, D, cond.noise_mode)
    n0 = sample_counts(np.clip(swap_test_p0(s), 0.0, 1.0), cond.n_shots, rng)
    return estimate_sq_overlap_swap(n0, cond.n_shots)


def measure_uniform(sq_overlap, cond, D, rng):
    """Squared overlap with the uniform state as estimated under ``cond``."""
    if cond.kind == IDEAL:
        return sq_overlap
    s = np.clip(sq_overlap, 0.0, 1.0)
    if cond.kind == SHOTS_NOISE:
        s = depolarize_uniform(s, cond.p_depol, D, cond.noise_mode)
    n0 = sample_counts(np.clip(s, 0.0, 1.0), cond.n_shots, rng)
    return estimate_sq_overlap_uniform(n0, cond.n_shots)
