import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import chebyshev as npcheb
from numpy.polynomial import polynomial as nppoly

from ccqkan.chebyshev import cheb_basis, cheb_eval
from ccqkan.errors import InvalidInputError


def monomial_oracle(c, x):
    # Chebyshev -> power-series coefficients, then Horner in the monomial basis
    return nppoly.polyval(x, npcheb.cheb2poly(c))


@pytest.mark.parametrize(
    "x, d, expected",
    [
        (1.0, 4, [1, 1, 1, 1, 1]),
        (-1.0, 3, [1, -1, 1, -1]),
        (0.5, 3, [1, 0.5, -0.5, -1]),
    ],
)
def test_basis_examples(x, d, expected):
    np.testing.assert_array_equal(cheb_basis(x, d), expected)


def test_basis_degree_zero():
    np.testing.assert_array_equal(cheb_basis(0.3, 0), [1.0])


def test_basis_rejects_nonfinite():
    with pytest.raises(InvalidInputError):
        cheb_basis(np.nan, 3)
    with pytest.raises(InvalidInputError):
        cheb_basis(np.inf, 3)


def test_basis_outside_interval_follows_recurrence():
    np.testing.assert_allclose(cheb_basis(2.0, 3), [1, 2, 7, 26])


def test_basis_vectorized_shape():
    X = np.linspace(-1, 1, 12).reshape(3, 4)
    B = cheb_basis(X, 5)
    assert B.shape == (3, 4, 6)
    np.testing.assert_array_equal(B[1, 2], cheb_basis(X[1, 2], 5))


def test_eval_examples():
    assert cheb_eval([1, 0, 0], 0.7) == 1.0
    assert cheb_eval([0, 1], 0.3) == pytest.approx(0.3, abs=1e-15)
    # 0.2 - 0.4x + 0.9(2x^2 - 1) at x = 0.25
    assert cheb_eval([0.2, -0.4, 0.9], 0.25) == pytest.approx(-0.6875, abs=1e-15)


def test_eval_rejects_empty():
    with pytest.raises(InvalidInputError):
        cheb_eval([], 0.1)


def test_eval_matches_monomial_oracle():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        d = rng.integers(0, 6)
        c = rng.uniform(-2, 2, size=d + 1)
        x = rng.uniform(-1, 1)
        assert abs(cheb_eval(c, x) - monomial_oracle(c, x)) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(
    x=st.floats(-1, 1, allow_nan=False),
    d=st.integers(0, 8),
    k=st.integers(0, 8),
)
def test_basis_prefix_and_bounds(x, d, k):
    k = min(k, d)
    B = cheb_basis(x, d)
    np.testing.assert_array_equal(B[: k + 1], cheb_basis(x, k))
    assert B[0] == 1.0
    assert np.all(np.abs(B) <= 1.0 + 1e-12)
