"""Linear-algebra and RNG substrate.

Expected values here are either hand-evaluated (determinants of explicit
small matrices) or checked against an independent arithmetic path
(eigenvalues, Gram-side determinants, the Kronecker mixed-product rule).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skcprobe import (
    RngStream,
    block2x2,
    capacity_logdet,
    kron,
    logdet_hermitian_pd,
    logdet_lu,
    sample_cgaussian,
)
from skcprobe.errors import DimensionMismatch, NotHermitian, NotPositiveDefinite


class TestSampleCGaussian:
    def test_shape(self):
        m = sample_cgaussian(2, 3, RngStream(1, 0))
        assert m.shape == (2, 3)
        assert m.dtype == complex

    def test_deterministic_for_same_key(self):
        a = sample_cgaussian(4, 4, RngStream(99, 7))
        b = sample_cgaussian(4, 4, RngStream(99, 7))
        np.testing.assert_array_equal(a, b)

    def test_distinct_streams_differ(self):
        a = sample_cgaussian(4, 4, RngStream(99, 7))
        b = sample_cgaussian(4, 4, RngStream(99, 8))
        assert not np.array_equal(a, b)

    def test_moments_over_1e5_draws(self):
        m = sample_cgaussian(100_000, 1, RngStream(2024, 0))
        assert abs(np.mean(m)) < 0.02
        assert abs(np.var(m) - 1.0) < 0.02
        # circular symmetry: each part carries half the variance
        assert abs(np.var(m.real) - 0.5) < 0.01
        assert abs(np.var(m.imag) - 0.5) < 0.01

    def test_rejects_empty_shape(self):
        with pytest.raises(DimensionMismatch):
            sample_cgaussian(0, 3, RngStream(1))


class TestLogdetHermitianPd:
    def test_identity_is_zero(self):
        assert logdet_hermitian_pd(np.eye(3)) == 0.0

    def test_diag_2_2_is_two_bits(self):
        assert logdet_hermitian_pd(np.diag([2.0, 2.0])) == pytest.approx(2.0, abs=1e-12)

    def test_rank_one_update(self):
        # det(I + g h h^H) = 1 + g*|h|^2 = 3 for g=1, h=(1, i)
        h = np.array([[1.0], [1.0j]])
        m = np.eye(2) + h @ h.conj().T
        assert logdet_hermitian_pd(m) == pytest.approx(math.log2(3.0), abs=1e-12)

    def test_not_hermitian_raises(self):
        m = np.array([[1.0, 0.5], [0.0, 1.0]])
        with pytest.raises(NotHermitian):
            logdet_hermitian_pd(m)

    def test_not_pd_raises(self):
        with pytest.raises(NotPositiveDefinite):
            logdet_hermitian_pd(np.diag([1.0, -1.0]))

    def test_non_square_raises(self):
        with pytest.raises(DimensionMismatch):
            logdet_hermitian_pd(np.ones((2, 3)))

    def test_matches_eigenvalue_path(self, rng):
        # independent route: sum of log2 eigenvalues
        for n in (2, 3, 5, 8):
            a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            m = a @ a.conj().T + np.eye(n)
            expected = float(np.sum(np.log2(np.linalg.eigvalsh(m))))
            assert logdet_hermitian_pd(m) == pytest.approx(expected, abs=1e-8)

    def test_agrees_with_lu_path(self, rng):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        m = a @ a.conj().T + np.eye(4)
        assert logdet_hermitian_pd(m) == pytest.approx(logdet_lu(m), abs=1e-10)


class TestCapacityLogdet:
    def test_zero_snr(self, rng):
        h = rng.standard_normal((3, 2))
        assert capacity_logdet(h, 0.0) == 0.0

    def test_identity_channel(self):
        assert capacity_logdet(np.eye(2), 3.0) == pytest.approx(4.0, abs=1e-12)

    def test_negative_snr_rejected(self):
        with pytest.raises(ValueError):
            capacity_logdet(np.eye(2), -0.1)

    @settings(max_examples=60, deadline=None)
    @given(
        rows=st.integers(1, 8), cols=st.integers(1, 8),
        gamma=st.floats(0.0, 50.0), seed=st.integers(0, 2**32 - 1),
    )
    def test_gram_side_equivalence(self, rows, cols, gamma, seed):
        # det(g H H^H + I_N) == det(g H^H H + I_K)
        h = sample_cgaussian(rows, cols, RngStream(seed, 0))
        n_side = capacity_logdet(h, gamma)
        k_side = capacity_logdet(h.conj().T, gamma)
        assert abs(n_side - k_side) <= 1e-9


class TestKron:
    def test_identity_blocks(self, rng):
        m = rng.standard_normal((2, 2))
        out = kron(np.eye(2), m)
        np.testing.assert_allclose(out[:2, :2], m)
        np.testing.assert_allclose(out[2:, 2:], m)
        np.testing.assert_allclose(out[:2, 2:], 0)

    def test_scalar_factor(self):
        np.testing.assert_allclose(kron(np.array([[2.0]]), np.eye(2)), 2 * np.eye(2))

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_mixed_product(self, seed):
        # (A kron B)(C kron D) == (AC) kron (BD)
        s = RngStream(seed, 0).generator()
        a, b, c, d = (s.standard_normal((2, 2)) + 1j * s.standard_normal((2, 2))
                      for _ in range(4))
        lhs = kron(a, b) @ kron(c, d)
        rhs = kron(a @ c, b @ d)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12


class TestBlock2x2:
    def test_identity_assembly(self):
        out = block2x2(np.eye(1), np.zeros((1, 1)), np.zeros((1, 1)), np.eye(1))
        np.testing.assert_array_equal(out, np.eye(2))

    def test_block_diagonal_identities(self):
        out = block2x2(np.eye(2), np.zeros((2, 2)), np.zeros((2, 2)), np.eye(2))
        assert logdet_hermitian_pd(out) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            block2x2(np.eye(2), np.zeros((3, 2)), np.zeros((2, 2)), np.eye(2))

    def test_schur_complement_identity(self, rng):
        # log det [[A, C], [C^H, B]] == log det A + log det(B - C^H A^-1 C)
        for trial in range(20):
            x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            y = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            a = x @ x.conj().T + np.eye(3)
            b = y @ y.conj().T + np.eye(2)
            c = 0.3 * (rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2)))
            joint = block2x2(a, c, c.conj().T, b)
            schur = b - c.conj().T @ np.linalg.solve(a, c)
            expected = logdet_hermitian_pd(a) + logdet_hermitian_pd(schur)
            assert logdet_hermitian_pd(joint) == pytest.approx(expected, abs=1e-9)
