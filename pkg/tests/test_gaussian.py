import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import det_cofactor
from relaycap.errors import (
    DimensionMismatch,
    NegativePower,
    NonPositiveNoise,
    NotPositiveDefinite,
)
from relaycap.gaussian import (
    SymMatrix,
    conditional_covariance,
    conditional_mi_bits,
    joint_covariance,
    log2_det,
)


def random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n))
    return a @ a.T + n * np.eye(n)


class TestSymMatrix:
    def test_copies_and_freezes(self):
        a = np.eye(2)
        m = SymMatrix(a)
        a[0, 1] = 5.0  # mutating the source must not leak in
        assert m.entries[0, 1] == 0.0
        with pytest.raises(ValueError):
            m.entries[0, 0] = 2.0

    def test_rejects_nonsquare(self):
        with pytest.raises(DimensionMismatch):
            SymMatrix(np.ones((2, 3)))

    def test_rejects_empty(self):
        with pytest.raises(DimensionMismatch):
            SymMatrix(np.zeros((0, 0)))

    def test_rejects_asymmetry_beyond_tolerance(self):
        m = np.eye(2)
        m[0, 1] = 1e-9
        with pytest.raises(ValueError, match="not symmetric"):
            SymMatrix(m)

    def test_accepts_asymmetry_within_tolerance(self):
        m = np.eye(2)
        m[0, 1] = 5e-13
        assert SymMatrix(m).dim == 2


class TestLog2Det:
    def test_identity_is_exactly_zero(self):
        assert log2_det(np.eye(3)) == 0.0

    def test_diag_2_2(self):
        assert log2_det(np.diag([2.0, 2.0])) == pytest.approx(2.0, abs=1e-15)

    def test_matches_cofactor_oracle_on_random_spd(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            m = random_spd(rng, 5)
            want = math.log2(det_cofactor(m))
            assert log2_det(m) == pytest.approx(want, rel=1e-10)

    def test_rejects_indefinite(self):
        # eigenvalues 3 and -1
        with pytest.raises(NotPositiveDefinite):
            log2_det(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_rejects_singular(self):
        with pytest.raises(NotPositiveDefinite):
            log2_det(np.array([[1.0, 1.0], [1.0, 1.0]]))

    def test_epsilon_is_configurable(self):
        m = np.diag([1.0, 1e-10])
        with pytest.raises(NotPositiveDefinite):
            log2_det(m, epsilon=1e-9)
        assert log2_det(m, epsilon=1e-12) == pytest.approx(math.log2(1e-10), rel=1e-12)

    def test_nan_rejected_not_propagated(self):
        m = np.full((2, 2), math.nan)
        with pytest.raises(NotPositiveDefinite):
            log2_det(m)

    @given(c=st.floats(min_value=1e-3, max_value=1e3), seed=st.integers(0, 10_000))
    @settings(max_examples=60, deadline=None)
    def test_scaling_identity(self, c, seed):
        m = random_spd(np.random.default_rng(seed), 4)
        got = log2_det(c * m)
        assert got == pytest.approx(4 * math.log2(c) + log2_det(m), abs=1e-9)


class TestConditionalMiBits:
    def test_zero_power_is_exactly_zero(self):
        assert conditional_mi_bits([[1.0]], [0.0], [1.0]) == 0.0

    def test_single_tx_two_rx(self):
        got = conditional_mi_bits([[1.0], [1.0]], [1.0], [1.0, 1.0])
        assert got == pytest.approx(0.5 * math.log2(3.0), abs=1e-12)

    def test_single_tx_three_rx_closed_form(self):
        n = (0.5, 1.0, 2.0)
        p1 = 3.0
        got = conditional_mi_bits([[1.0], [1.0], [1.0]], [p1], list(n))
        want = 0.5 * math.log2(1.0 + p1 * sum(1.0 / x for x in n))
        assert got == pytest.approx(want, abs=1e-12)

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_rank_one_identity(self, seed):
        # Matrix determinant lemma: one transmitter reduces to a scalar log.
        rng = np.random.default_rng(seed)
        k = int(rng.integers(1, 6))
        lam = rng.uniform(0.1, 10.0, size=k)
        noise = rng.uniform(0.1, 10.0, size=k)
        p = float(rng.uniform(0.0, 10.0))
        got = conditional_mi_bits(np.sqrt(lam)[:, None], [p], noise)
        want = 0.5 * math.log2(1.0 + p * float(np.sum(lam / noise)))
        assert got == pytest.approx(want, abs=1e-10)

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_monotone_in_power(self, seed):
        rng = np.random.default_rng(seed)
        n_rx, n_tx = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        gains = rng.uniform(0.1, 3.0, size=(n_rx, n_tx))
        noise = rng.uniform(0.5, 2.0, size=n_rx)
        p = rng.uniform(0.0, 5.0, size=n_tx)
        base = conditional_mi_bits(gains, p, noise)
        for i in range(n_tx):
            bumped = p.copy()
            bumped[i] += 0.5
            assert conditional_mi_bits(gains, bumped, noise) >= base - 1e-12

    def test_rejects_nonpositive_noise(self):
        with pytest.raises(NonPositiveNoise):
            conditional_mi_bits([[1.0]], [1.0], [0.0])

    def test_rejects_negative_power(self):
        with pytest.raises(NegativePower):
            conditional_mi_bits([[1.0]], [-1.0], [1.0])

    def test_rejects_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            conditional_mi_bits([[1.0, 1.0]], [1.0], [1.0])


class TestCovarianceHelpers:
    def test_joint_covariance_shape_check(self):
        with pytest.raises(DimensionMismatch):
            joint_covariance(np.ones((2, 3)), np.ones(2))

    def test_joint_covariance_of_independent_factors(self):
        sigma = joint_covariance(np.eye(3), [1.0, 2.0, 3.0])
        assert np.allclose(sigma, np.diag([1.0, 2.0, 3.0]))

    def test_conditioning_on_nothing_returns_marginal(self):
        sigma = np.diag([1.0, 2.0])
        out = conditional_covariance(sigma, keep=[1], given=[])
        assert out == pytest.approx(np.array([[2.0]]))

    def test_schur_complement_known_case(self):
        # X = Z1, Y = Z1 + Z2 with unit variances: var(X | Y) = 1/2.
        sigma = np.array([[1.0, 1.0], [1.0, 2.0]])
        out = conditional_covariance(sigma, keep=[0], given=[1])
        assert out[0, 0] == pytest.approx(0.5, abs=1e-12)

    def test_singular_given_block_rejected(self):
        sigma = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 1.0, 1.0]])
        with pytest.raises(NotPositiveDefinite):
            conditional_covariance(sigma, keep=[0], given=[1, 2])
