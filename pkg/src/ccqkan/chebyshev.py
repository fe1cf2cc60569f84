"""Chebyshev polynomials of the first kind."""

import numpy as np

from .errors import InvalidInputError


def cheb_basis(x, d):
    """Basis vector ``(T_0(x), ..., T_d(x))``.

    ``x`` may be a scalar or an array; the basis is stacked along a new
    trailing axis, so the result has shape ``np.shape(x) + (d + 1,)``.
    Uses the three-term recurrence, which is exact at ``|x| = 1`` and
    accepts arguments outside ``[-1, 1]``.
    """
    d = int(d)
    if d < 0:
        raise InvalidInputError(f"degree must be non-negative, got {d}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("x must be finite")
    out = np.empty(x.shape + (d + 1,))
    out[..., 0] = 1.0
    if d >= 1:
        out[..., 1] = x
    for k in range(2, d + 1):
        out[..., k] = 2.0 * x * out[..., k - 1] - out[..., k - 2]
    return out


def cheb_eval(c, x):
    """Evaluate ``sum_k c[k] T_k(x)``."""
    c = np.asarray(c, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise InvalidInputError("coefficient vector must be 1-D and non-empty")
    if not np.all(np.isfinite(c)):
        raise InvalidInputError("coefficients must be finite")
    return cheb_basis(x, c.size - 1) @ c
