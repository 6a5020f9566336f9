import numpy as np
import pytest

from epkit import cmatrix
from epkit.cmatrix import (
    SubspaceBasis,
    eig,
    image_basis,
    kernel_basis,
    subspace_equal,
    svd_rank,
)
from epkit.errors import (
    AmbientMismatchError,
    DimensionTooLargeError,
    NonFiniteError,
    NonSquareError,
)

from conftest import jordan_block


class TestEig:
    def test_diagonal(self):
        pairs = eig(np.diag([1.0, 2.0, 3.0]))
        values = sorted(p[0].real for p in pairs)
        np.testing.assert_allclose(values, [1.0, 2.0, 3.0], atol=1e-12)
        for lam, vec in pairs:
            idx = int(round(lam.real)) - 1
            assert abs(abs(vec[idx]) - 1.0) < 1e-12

    def test_nilpotent_block(self):
        # J2(0): eigenvalue 0 twice, every returned vector along (1, 0)
        pairs = eig(jordan_block(2))
        assert all(abs(lam) < 1e-12 for lam, _ in pairs)
        for _, vec in pairs:
            assert abs(vec[1]) < 1e-12

    def test_product_matrix_at_degeneracy(self):
        # B B' of the mixed three-fold example with b2 = bp1 = 1
        m = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
        pairs = eig(m)
        assert all(abs(lam) < 1e-14 for lam, _ in pairs)

    def test_errors(self):
        with pytest.raises(NonSquareError):
            eig(np.zeros((2, 3)))
        with pytest.raises(DimensionTooLargeError):
            eig(np.eye(17))
        bad = np.eye(2, dtype=complex)
        bad[0, 0] = np.nan
        with pytest.raises(NonFiniteError):
            eig(bad)

    def test_residuals_random(self, rng):
        # 1000 random matrices, dims 2..8: residual within 1e-10 * ||M||
        for _ in range(1000):
            n = int(rng.integers(2, 9))
            m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            norm = np.linalg.norm(m, 2)
            for lam, vec in eig(m):
                assert np.linalg.norm(m @ vec - lam * vec) <= 1e-10 * norm
                assert abs(np.linalg.norm(vec) - 1.0) < 1e-12


class TestRank:
    def test_examples(self):
        assert svd_rank([[1.0, 0.0], [0.0, 0.0]], 1e-10) == 1
        assert svd_rank(np.zeros((3, 3)), 1e-10) == 0
        # B B' at the four-fold point built from B = [[0,0],[0,1]], B' = [[1,2],[3,0]]
        b = np.array([[0.0, 0.0], [0.0, 1.0]])
        bp = np.array([[1.0, 2.0], [3.0, 0.0]])
        assert svd_rank(b @ bp, 1e-10) == 1

    def test_rank_nullity(self, rng):
        for _ in range(200):
            rows = int(rng.integers(1, 7))
            cols = int(rng.integers(1, 7))
            m = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
            for tol in (1e-8, 1e-10, 1e-12):
                assert svd_rank(m, tol) + kernel_basis(m, tol).dim == cols

    def test_svd_reconstruction(self, rng):
        for _ in range(100):
            m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            u, s, vh = np.linalg.svd(m)
            err = np.max(np.abs(u @ np.diag(s) @ vh - m))
            assert err <= 1e-12 * np.linalg.norm(m, 2)


class TestKernelImage:
    def test_kernel_of_shift(self):
        basis = kernel_basis(jordan_block(2))
        assert basis.dim == 1
        assert abs(abs(basis.vectors[0, 0]) - 1.0) < 1e-12
        assert abs(basis.vectors[1, 0]) < 1e-12

    def test_kernel_of_identity(self):
        assert kernel_basis(np.eye(3)).dim == 0

    def test_image_single_row(self):
        # [[1, 2], [0, 0]] has image along (1, 0)
        basis = image_basis(np.array([[1.0, 2.0], [0.0, 0.0]]))
        assert basis.dim == 1
        assert abs(basis.vectors[1, 0]) < 1e-12

    def test_kernel_vectors_annihilated(self, rng):
        tol = 1e-10
        for _ in range(100):
            m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
            m[:, 0] = m[:, 1]  # force rank deficiency
            smax = np.linalg.svd(m, compute_uv=False)[0]
            basis = kernel_basis(m, tol)
            assert basis.dim >= 1
            for v in basis.vectors.T:
                assert np.linalg.norm(m @ v) <= 10 * tol * smax


class TestSubspaces:
    def test_equal_and_not(self):
        e1 = SubspaceBasis(2, np.array([[1.0], [0.0]], dtype=complex))
        e1b = SubspaceBasis(2, np.array([[1.0], [0.0]], dtype=complex))
        e2 = SubspaceBasis(2, np.array([[0.0], [1.0]], dtype=complex))
        assert subspace_equal(e1, e1b)
        assert not subspace_equal(e1, e2)

    def test_image_bprime_vs_kernel_b(self):
        # Third-column relation for the mixed three-fold pair
        b = np.array([[0.0, 1.0], [0.0, 0.0]])
        bp = np.array([[1.0, 2.0], [0.0, 0.0]])
        assert subspace_equal(image_basis(bp), kernel_basis(b))

    def test_phase_and_mixing_invariance(self, rng):
        # same span through a random unitary change of basis vectors
        q, _ = np.linalg.qr(rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2)))
        mix, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        a = SubspaceBasis(4, q)
        b = SubspaceBasis(4, q @ mix)
        assert subspace_equal(a, b)

    def test_ambient_mismatch(self):
        a = SubspaceBasis(2, np.array([[1.0], [0.0]], dtype=complex))
        b = SubspaceBasis(3, np.array([[1.0], [0.0], [0.0]], dtype=complex))
        with pytest.raises(AmbientMismatchError):
            subspace_equal(a, b)

    def test_orthonormality_enforced(self):
        with pytest.raises(ValueError):
            SubspaceBasis(2, np.array([[1.0, 1.0], [0.0, 0.0]], dtype=complex))


def test_default_tolerance_constant():
    assert cmatrix.DEFAULT_TOL == 1e-9
