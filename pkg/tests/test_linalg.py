import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gengm import linalg
from gengm.errors import InvalidInputError

import oracles
from conftest import random_psd, random_spd


class TestIsSpd:
    def test_identity(self):
        assert linalg.is_spd(np.eye(3))

    def test_zero_matrix(self):
        assert not linalg.is_spd(np.zeros((2, 2)))

    def test_strong_offdiagonal(self):
        # eigenvalues 0.1 and 1.9
        assert linalg.is_spd(np.array([[1.0, 0.9], [0.9, 1.0]]))

    def test_indefinite(self):
        assert not linalg.is_spd(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(InvalidInputError):
            linalg.is_spd(np.ones((2, 3)))

    def test_rejects_non_finite(self):
        m = np.eye(2)
        m[0, 1] = np.nan
        with pytest.raises(InvalidInputError):
            linalg.is_spd(m)

    def test_rejects_asymmetric(self):
        with pytest.raises(InvalidInputError):
            linalg.is_spd(np.array([[1.0, 0.5], [0.1, 1.0]]))

    def test_near_singular_pivot_rule(self):
        m = np.diag([1.0, 1e-16])
        assert not linalg.is_spd(m)


class TestEigExtremes:
    def test_diagonal(self):
        lo, hi = linalg.eig_extremes(np.diag([1.0, 2.0, 5.0]))
        assert lo == pytest.approx(1.0) and hi == pytest.approx(5.0)

    def test_swap_matrix(self):
        lo, hi = linalg.eig_extremes(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert lo == pytest.approx(-1.0) and hi == pytest.approx(1.0)

    def test_against_jacobi_oracle(self):
        rng = np.random.default_rng(42)
        a = rng.standard_normal((6, 6))
        m = 0.5 * (a + a.T)
        spectrum = oracles.jacobi_eigenvalues(m)
        lo, hi = linalg.eig_extremes(m)
        assert abs(lo - spectrum[0]) < 1e-10
        assert abs(hi - spectrum[-1]) < 1e-10


class TestFrobInner:
    def test_identity(self):
        assert linalg.frob_inner(np.eye(4), np.eye(4)) == pytest.approx(4.0)

    def test_zero(self):
        assert linalg.frob_inner(np.arange(6.0).reshape(2, 3), np.zeros((2, 3))) == 0.0

    def test_hand_value(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        b = np.array([[5.0, 6.0], [7.0, 8.0]])
        assert linalg.frob_inner(a, b) == pytest.approx(70.0)

    def test_matches_trace(self, rng):
        a = rng.standard_normal((5, 7))
        b = rng.standard_normal((5, 7))
        assert linalg.frob_inner(a, b) == pytest.approx(
            np.trace(a.T @ b), rel=1e-12
        )

    def test_rejects_mismatch(self):
        with pytest.raises(InvalidInputError):
            linalg.frob_inner(np.eye(2), np.eye(3))


class TestVech:
    def test_forced_order(self):
        m = np.array([[1.0, 2.0], [2.0, 3.0]])
        assert np.array_equal(linalg.vech(m), [1.0, 2.0, 3.0])

    def test_unvech_inverse(self):
        m = linalg.unvech([1.0, 2.0, 3.0], 2)
        assert np.array_equal(m, [[1.0, 2.0], [2.0, 3.0]])

    def test_column_stacked_three(self):
        m = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 5.0], [3.0, 5.0, 6.0]])
        assert np.array_equal(linalg.vech(m), [1, 2, 3, 4, 5, 6])

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=1, max_value=9), st.integers(min_value=0, max_value=2**31))
    def test_round_trip(self, dim, seed):
        a = np.random.default_rng(seed).standard_normal((dim, dim))
        m = 0.5 * (a + a.T)
        assert np.array_equal(linalg.unvech(linalg.vech(m), dim), m)

    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            linalg.unvech([1.0, 2.0], 2)


class TestSpectralNorm:
    def test_matches_svd(self, rng):
        for shape in [(3, 8), (8, 3), (5, 5)]:
            a = rng.standard_normal(shape)
            assert linalg.spectral_norm(a) == pytest.approx(
                np.linalg.svd(a, compute_uv=False)[0], rel=1e-10
            )


class TestEigenvalueLemmas:
    """Spot checks of the sandwich and Weyl-type inequalities used by the
    error-bound machinery; the acceptance suite reruns these at scale."""

    def test_congruence_keeps_psd(self, rng):
        for _ in range(100):
            a = random_psd(rng, 5, rank=3)
            u = rng.standard_normal((5, 4))
            lo, _ = linalg.eig_extremes(u.T @ a @ u)
            assert lo >= -1e-10

    def test_trace_product_sandwich(self, rng):
        for _ in range(100):
            a = random_psd(rng, 4)
            b = random_psd(rng, 4)
            lo_a, hi_a = linalg.eig_extremes(a)
            tr_ab = np.trace(a @ b)
            assert lo_a * np.trace(b) - 1e-9 <= tr_ab <= hi_a * np.trace(b) + 1e-9

    def test_product_eigenvalue_bounds(self, rng):
        for _ in range(100):
            a = random_spd(rng, 4)
            b = random_psd(rng, 4)
            root = np.linalg.cholesky(a)
            sym = root.T @ b @ root
            lo_ab, hi_ab = linalg.eig_extremes(0.5 * (sym + sym.T))
            lo_a, hi_a = linalg.eig_extremes(a)
            lo_b, hi_b = linalg.eig_extremes(b)
            assert lo_a * lo_b <= lo_ab + 1e-9
            assert hi_ab <= hi_a * hi_b + 1e-9

    def test_quadratic_trace_bounds(self, rng):
        for _ in range(100):
            a = random_psd(rng, 5)
            u = rng.standard_normal((5, 3))
            lo, hi = linalg.eig_extremes(a)
            f2 = np.sum(u * u)
            tr = np.trace(u.T @ a @ u)
            assert lo * f2 - 1e-9 <= tr <= hi * f2 + 1e-9

    def test_weyl_extremes(self, rng):
        for _ in range(100):
            x = rng.standard_normal((4, 4))
            y = rng.standard_normal((4, 4))
            a, b = 0.5 * (x + x.T), 0.5 * (y + y.T)
            lo_a, hi_a = linalg.eig_extremes(a)
            lo_b, hi_b = linalg.eig_extremes(b)
            lo_s, hi_s = linalg.eig_extremes(a + b)
            assert lo_a + lo_b <= lo_s + 1e-9
            assert hi_s <= hi_a + hi_b + 1e-9
