"""Dense complex linear algebra for small matrices (dimension <= 16).

Thin, validated wrappers around LAPACK (via numpy) that fix the tolerance
conventions used everywhere else in the package: ranks are decided by a
relative cutoff ``tol * sigma_max`` (optionally against a caller-supplied
scale), kernels and images are returned as orthonormal singular-vector
bases, and subspace comparison is done through principal angles.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    AmbientMismatchError,
    DimensionTooLargeError,
    NonFiniteError,
    NonSquareError,
)

#: Default relative tolerance for rank/kernel decisions. Halfway (on a log
#: scale) between machine epsilon and the 1e-2..1e-6 path radii used in scans.
DEFAULT_TOL = 1e-9

#: Dense-solver dimension cap; everything in this package is a small matrix.
MAX_DIM = 16

#: Absolute floor below which a matrix counts as identically zero.
_ABS_FLOOR = 1e-300


def as_matrix(m) -> np.ndarray:
    """Validate and convert input to a 2-d complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise NonSquareError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise NonFiniteError("matrix contains NaN or Inf entries")
    return a


def as_square_matrix(m) -> np.ndarray:
    """Like :func:`as_matrix` but additionally require a square matrix."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NonSquareError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise DimensionTooLargeError(
            f"dimension {a.shape[0]} exceeds the cap of {MAX_DIM}"
        )
    return a


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a subspace of C^ambient_dim.

    ``vectors`` holds the basis as columns, shape ``(ambient_dim, dim)``.
    An empty basis (dim 0) represents the trivial subspace.
    """

    ambient_dim: int
    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.complex128)
        if v.ndim != 2 or v.shape[0] != self.ambient_dim:
            raise AmbientMismatchError(
                f"basis shape {v.shape} does not match ambient dim {self.ambient_dim}"
            )
        if v.shape[1] > self.ambient_dim:
            raise AmbientMismatchError("more basis vectors than ambient dimension")
        if v.size:
            if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
                raise NonFiniteError("basis contains NaN or Inf entries")
            gram = v.conj().T @ v
            if np.max(np.abs(gram - np.eye(v.shape[1]))) > 1e-12:
                raise ValueError("basis vectors are not orthonormal to 1e-12")
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def eig(m):
    """Eigendecomposition of a small square complex matrix.

    Returns a list of ``(eigenvalue, right_eigenvector)`` pairs, counted with
    algebraic multiplicity, each eigenvector unit-norm. Residuals are at the
    1e-10 * ||M|| level for well-separated eigenvalues; near-defective
    eigenvalues can degrade to about 1e-6 * ||M||, which is why defective
    structure must be read off with the `spectral` module and never from raw
    eig output.
    """
    a = as_square_matrix(m)
    w, v = np.linalg.eig(a)
    return [(complex(w[i]), v[:, i].copy()) for i in range(a.shape[0])]


def singular_values(m) -> np.ndarray:
    """Singular values of ``m`` in descending order."""
    return np.linalg.svd(as_matrix(m), compute_uv=False)


def svd_rank(m, tol: float = DEFAULT_TOL, scale: float | None = None) -> int:
    """Numerical rank: number of singular values above ``tol * scale``.

    ``scale`` defaults to the largest singular value of ``m`` itself, which
    makes the decision scale-invariant; callers comparing several matrices
    against a common magnitude (e.g. the assembled Hamiltonian norm) pass
    that magnitude explicitly.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    s = singular_values(m)
    smax = s[0] if s.size else 0.0
    if scale is None:
        scale = smax
    if smax <= _ABS_FLOOR or scale <= _ABS_FLOOR:
        return 0
    return int(np.sum(s > tol * scale))


def kernel_basis(m, tol: float = DEFAULT_TOL, scale: float | None = None) -> SubspaceBasis:
    """Orthonormal basis of the numerical kernel (right null space) of ``m``."""
    a = as_matrix(m)
    r = svd_rank(a, tol, scale)
    _, _, vh = np.linalg.svd(a)
    return SubspaceBasis(a.shape[1], vh[r:].conj().T)


def image_basis(m, tol: float = DEFAULT_TOL, scale: float | None = None) -> SubspaceBasis:
    """Orthonormal basis of the numerical image (column space) of ``m``."""
    a = as_matrix(m)
    r = svd_rank(a, tol, scale)
    u, _, _ = np.linalg.svd(a)
    return SubspaceBasis(a.shape[0], u[:, :r])


def subspace_equal(u: SubspaceBasis, v: SubspaceBasis, tol: float = DEFAULT_TOL) -> bool:
    """True iff the two subspaces coincide up to principal-angle sines <= tol."""
    if u.ambient_dim != v.ambient_dim:
        raise AmbientMismatchError(
            f"ambient dims differ: {u.ambient_dim} vs {v.ambient_dim}"
        )
    if u.dim != v.dim:
        return False
    if u.dim == 0:
        return True
    # Largest principal-angle sine = || (I - U U^H) V ||_2.
    resid = v.vectors - u.vectors @ (u.vectors.conj().T @ v.vectors)
    return bool(np.linalg.norm(resid, 2) <= tol)
