import math

import numpy as np
import pytest

from ccqkan.chebyshev import cheb_basis
from ccqkan.errors import InvalidInputError
from ccqkan.network import (
    MERGED,
    SEQUENTIAL,
    TABLE_CONFIGS,
    NetworkConfig,
    NetworkParams,
    build_merged_vector,
    executions_per_grad_step,
    forward,
    forward_batch,
    hidden_activations,
    node_preactivation,
    param_count,
    resources,
)
from ccqkan.statevector import EvalCondition

# (n, d) -> q_par, c_par, q_seq, c_seq, q_red, c_red, delta_q
RESOURCE_TABLE = {
    (2, 2): (12, 1, 2, 6, 3, 3, 1),
    (2, 3): (12, 1, 2, 6, 3, 3, 1),
    (2, 4): (18, 1, 3, 6, 4, 3, 1),
    (3, 2): (24, 1, 2, 12, 4, 4, 2),
    (3, 3): (24, 1, 2, 12, 4, 4, 2),
    (3, 4): (36, 1, 3, 12, 4, 4, 1),
    (4, 2): (40, 1, 2, 20, 4, 5, 2),
    (4, 3): (40, 1, 2, 20, 4, 5, 2),
    (4, 4): (60, 1, 3, 20, 5, 5, 2),
    (4, 5): (60, 1, 3, 20, 5, 5, 2),
}


def cheb_trig(x, k):
    # T_k(cos t) = cos(k t) on [-1, 1]
    return math.cos(k * math.acos(max(-1.0, min(1.0, x))))


def classical_forward(p, x):
    """Plain-loop classical network: every edge is sum_k c_k T_k(input)."""
    n, K = p.n, p.d + 1
    h = []
    for j in range(n):
        s = sum(p.w1[i, j, k] * cheb_trig(x[i], k) for i in range(n) for k in range(K))
        h.append(math.tanh(s))
    s2 = sum(p.w2[i, k] * cheb_trig(h[i], k) for i in range(n) for k in range(K))
    return p.alpha * s2 + p.beta


def random_params(rng, n, d):
    return NetworkParams(
        rng.uniform(-1, 1, (n, n, d + 1)), rng.uniform(-1, 1, (n, d + 1)), rng.uniform(-2, 2), rng.uniform(-1, 1)
    )


class TestResources:
    def test_table_rows(self):
        assert set(TABLE_CONFIGS) == set(RESOURCE_TABLE)
        for (n, d), row in RESOURCE_TABLE.items():
            assert resources(n, d).row() == row

    def test_smallest(self):
        r = resources(1, 1)
        assert (r.q_par, r.q_seq, r.c_seq, r.q_red, r.c_red, r.delta_q) == (2, 1, 2, 1, 2, 0)

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            resources(0, 3)

    @pytest.mark.parametrize("n, d, expected", [(4, 5, 122), (2, 2, 20), (3, 3, 50)])
    def test_param_count(self, n, d, expected):
        assert param_count(n, d) == expected

    def test_executions(self):
        assert executions_per_grad_step(122, 30, 5) == 36600
        assert executions_per_grad_step(122, 30, 20) == 146400
        assert executions_per_grad_step(1, 1, 1) == 2


class TestMergedVector:
    def test_hand_expansion(self):
        B = np.stack([cheb_basis(0.5, 1), cheb_basis(-1.0, 1)])
        np.testing.assert_array_equal(build_merged_vector([[1, 2], [3, 4]], B), [1, 1, 3, -4])

    def test_single_edge_and_zero(self):
        b = cheb_basis(0.3, 3)[None]
        c = np.array([[0.5, -1, 2, 0.25]])
        np.testing.assert_array_equal(build_merged_vector(c, b), c[0] * b[0])
        assert not np.any(build_merged_vector(np.zeros((2, 4)), np.ones((2, 4))))

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            build_merged_vector(np.ones((2, 3)), np.ones((2, 4)))


class TestNodePreactivation:
    def test_component_sum(self):
        # coefficient block times basis gives m = (1, 1, 1, 1)
        assert node_preactivation(np.ones((2, 2)), np.ones((2, 2))) == pytest.approx(4.0, abs=1e-12)

    def test_negative_sign(self):
        assert node_preactivation([[-1, -1], [0, 0]], np.ones((2, 2))) == pytest.approx(-2.0, abs=1e-12)

    def test_zero_block(self):
        assert node_preactivation(np.zeros((3, 3)), np.ones((3, 3))) == 0.0
        assert node_preactivation(np.zeros((3, 3)), np.ones((3, 3)), mode=SEQUENTIAL) == 0.0

    def test_modes_agree(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n, d = rng.integers(1, 5), rng.integers(1, 6)
            c = rng.uniform(-1, 1, (n, d + 1))
            b = cheb_basis(rng.uniform(-1, 1, n), d)
            classical = float(np.sum(c * b))
            assert abs(node_preactivation(c, b, MERGED) - classical) <= 1e-10
            assert abs(node_preactivation(c, b, SEQUENTIAL) - classical) <= 1e-10

    def test_shots_noise_converges_to_channel(self):
        # merged node of dimension 4, exact channel; mean of the estimator vs channel output
        from ccqkan.statevector import depolarize_uniform, measure_uniform

        cond = EvalCondition.shots_noise(1000, 0.1)
        s_true = 0.3
        expected = depolarize_uniform(s_true, 0.1, 4)
        rng = np.random.default_rng(4)
        est = measure_uniform(np.full(10_000, s_true), cond, 4, rng)
        sigma = np.sqrt(expected * (1 - expected) / 1000) / np.sqrt(10_000)
        assert abs(est.mean() - expected) <= 3 * sigma


class TestForward:
    def test_alpha_zero(self):
        rng = np.random.default_rng(0)
        p = random_params(rng, 3, 2)
        p.alpha, p.beta = 0.0, 0.37
        for mode in (MERGED, SEQUENTIAL):
            cfg = NetworkConfig(3, 2, mode)
            y = forward_batch(p, rng.uniform(-1, 1, (20, 3)), cfg)
            np.testing.assert_array_equal(y, 0.37)

    def test_zero_first_layer(self):
        p = NetworkParams(np.zeros((2, 2, 4)), [[1, 2, 3, 4], [0.5, 0, -1, 0]], 1.5, 0.2)
        cfg = NetworkConfig(2, 3, MERGED)
        np.testing.assert_allclose(hidden_activations(p, [[0.3, -0.8]], cfg), 0.0, atol=0)
        t0 = cheb_basis(0.0, 3)  # (1, 0, -1, 0)
        expected = 1.5 * (p.w2 @ t0).sum() + 0.2
        assert forward(p, [0.3, -0.8], cfg) == pytest.approx(expected, abs=1e-12)

    def test_matches_classical_oracle(self):
        rng = np.random.default_rng(5)
        for n, d in TABLE_CONFIGS:
            p = random_params(rng, n, d)
            X = rng.uniform(-1, 1, (5, n))
            ref = [classical_forward(p, x) for x in X]
            for mode in (MERGED, SEQUENTIAL):
                np.testing.assert_allclose(forward_batch(p, X, NetworkConfig(n, d, mode)), ref, atol=1e-10)

    def test_cross_mode_random(self):
        rng = np.random.default_rng(6)
        for _ in range(1000):
            n, d = rng.integers(1, 5), rng.integers(1, 6)
            p = random_params(rng, n, d)
            x = rng.uniform(-1, 1, n)
            ym = forward(p, x, NetworkConfig(n, d, MERGED))
            ys = forward(p, x, NetworkConfig(n, d, SEQUENTIAL))
            assert abs(ym - ys) <= 1e-10

    def test_hidden_range(self):
        rng = np.random.default_rng(8)
        p = random_params(rng, 4, 5)
        p.w1 *= 50
        h = hidden_activations(p, rng.uniform(-1, 1, (50, 4)), NetworkConfig(4, 5))
        assert np.all(np.abs(h) <= 1.0)

    def test_dimension_errors(self):
        p = random_params(np.random.default_rng(0), 2, 2)
        with pytest.raises(InvalidInputError):
            forward(p, [0.1, 0.2, 0.3], NetworkConfig(2, 2))
        with pytest.raises(InvalidInputError):
            forward(p, [0.1, 0.2], NetworkConfig(2, 3))

    def test_shots_needs_rng(self):
        p = random_params(np.random.default_rng(0), 2, 2)
        with pytest.raises(InvalidInputError):
            forward(p, [0.1, 0.2], NetworkConfig(2, 2), EvalCondition.shots(100))

    def test_shots_deterministic_given_rng(self):
        p = random_params(np.random.default_rng(0), 2, 2)
        cfg = NetworkConfig(2, 2, MERGED)
        X = np.random.default_rng(1).uniform(-1, 1, (10, 2))
        cond = EvalCondition.shots_noise(500, 0.05)
        a = forward_batch(p, X, cfg, cond, np.random.default_rng(3))
        b = forward_batch(p, X, cfg, cond, np.random.default_rng(3))
        np.testing.assert_array_equal(a, b)
        assert np.all(np.isfinite(a))


class TestParams:
    def test_vector_roundtrip(self):
        p = random_params(np.random.default_rng(2), 3, 4)
        theta = p.to_vector()
        assert theta.size == param_count(3, 4)
        q = NetworkParams.from_vector(theta, 3, 4)
        np.testing.assert_array_equal(q.to_vector(), theta)

    def test_wrong_length(self):
        with pytest.raises(InvalidInputError):
            NetworkParams.from_vector(np.zeros(10), 2, 2)
