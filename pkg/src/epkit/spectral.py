"""Eigenvalue clustering, Jordan block detection, and chain construction.

Block sizes are read off the rank sequence r_k = rank((H - E)^k): the number
of blocks of size >= k equals r_{k-1} - r_k. Powers get a fresh SVD each,
with the rank cutoff scaled as tol * ||H - E||^k to counteract norm growth.

Chains are built bottom-up from a kernel seed, but each solve is restricted
to the image of the appropriate power of (H - E) so the chain is guaranteed
to extend to its full length; within that restriction the minimum-norm
solution is taken. This is the deterministic gauge all chain output carries:
generalized eigenvectors are defined only up to kernel additions, and the
image-restricted minimum-norm representative pins them down.
"""

from dataclasses import dataclass, field

import numpy as np

from . import cmatrix
from .cmatrix import DEFAULT_TOL, as_square_matrix
from .errors import ChainSolveFailedError, NotAnEigenvalueError, SeedNotInKernelError

#: Cluster radius as a fraction of ||H||; looser than the rank tolerance
#: because eigenvalues of a near-defective matrix scatter as eps**(1/k).
DEFAULT_CLUSTER_FRACTION = 1e-7

#: Chain residual bound as a fraction of ||H||.
DEFAULT_CHAIN_FRACTION = 1e-6

#: Floating-point noise accumulated by k matrix products stays below
#: 100 eps * ||H - E||^k; singular values under that floor are fp debris.
_NOISE_FLOOR_FACTOR = 100 * np.finfo(float).eps


def _denoise(shifted: np.ndarray, tol: float, base_norm: float) -> np.ndarray:
    """Zero out the singular directions below tol * ||H - E||.

    Rank sequences are computed on powers of this canonical representative:
    directions the working tolerance declares to be zero (e.g. the residual
    coupling at a refined-but-inexact degeneracy point) are removed exactly
    before any power can amplify or smear them, while genuinely small but
    above-tolerance entries of badly scale-mixed matrices survive.
    """
    u, s, vh = np.linalg.svd(shifted)
    s = np.where(s > tol * base_norm, s, 0.0)
    return (u * s) @ vh


def _power_scale(power: np.ndarray, k: int, base_norm: float, tol: float) -> float:
    """Rank-decision scale for the k-th power of the denoised (H - E).

    The cutoff tol * scale combines a self-relative term (so genuinely
    small but nonzero powers of badly scale-mixed matrices keep their
    rank) with a noise floor ~ eps * ||H - E||^k (so powers that vanish
    exactly, up to accumulated rounding, are treated as zero).
    """
    smax = float(np.linalg.norm(power, 2))
    return max(smax, _NOISE_FLOOR_FACTOR * base_norm**k / tol)


@dataclass
class EigenvalueCluster:
    """A group of numerically coincident eigenvalues."""

    center: complex
    algebraic_multiplicity: int
    member_indices: list[int]


@dataclass
class JordanStructure:
    """Jordan data of one eigenvalue: block sizes (descending) and chains.

    ``chains[i]`` is the list ``[e_1, ..., e_k]`` for the i-th block, with
    (H - E) e_1 = 0 and (H - E) e_j = e_{j-1}. e_1 is unit-norm; the later
    vectors keep the scale the chain equations dictate.
    """

    eigenvalue: complex
    block_sizes: list[int]
    chains: list[list[np.ndarray]] = field(default_factory=list)

    @property
    def algebraic_multiplicity(self) -> int:
        return sum(self.block_sizes)

    @property
    def geometric_multiplicity(self) -> int:
        return len(self.block_sizes)


@dataclass
class EPReport:
    """Full-spectrum report: one (cluster, JordanStructure) entry per cluster.

    ``flag`` is "simple" when exactly one nontrivial Jordan block exists in
    the whole spectrum, "compound" when there are two or more (also when both
    sit at the same eigenvalue, as for a doublet of 2-blocks at zero), and
    "none" when every block is trivial.
    """

    entries: list[tuple[EigenvalueCluster, JordanStructure]]
    flag: str


def cluster_eigenvalues(eigenpairs, cluster_tol: float) -> list[EigenvalueCluster]:
    """Single-linkage clustering of eigenvalues in the complex plane.

    ``eigenpairs`` may be a list of (eigenvalue, eigenvector) pairs or plain
    eigenvalues. Deterministic given input order: clusters are reported in
    order of their smallest member index, ties in linkage broken by index.
    """
    if cluster_tol <= 0:
        raise ValueError("cluster_tol must be positive")
    values = []
    for item in eigenpairs:
        if isinstance(item, tuple):
            values.append(complex(item[0]))
        else:
            values.append(complex(item))
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= cluster_tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    clusters = []
    for root in sorted(groups):
        members = groups[root]
        center = complex(np.mean([values[i] for i in members]))
        clusters.append(EigenvalueCluster(center, len(members), members))
    return clusters


def rank_sequence(h, e: complex, tol: float = DEFAULT_TOL) -> list[int]:
    """Ranks [r_1, r_2, ...] of powers (H - E)^k until the plateau."""
    a = as_square_matrix(h)
    n = a.shape[0]
    shifted = a - complex(e) * np.eye(n)
    base_norm = max(np.linalg.norm(shifted, 2), cmatrix._ABS_FLOOR)
    clean = _denoise(shifted, tol, base_norm)
    ranks = []
    power = np.eye(n, dtype=np.complex128)
    prev = n
    for k in range(1, n + 1):
        power = power @ clean
        r = cmatrix.svd_rank(power, tol, scale=_power_scale(power, k, base_norm, tol))
        ranks.append(r)
        if r == prev:
            break
        prev = r
    return ranks


def _block_sizes_from_ranks(n: int, ranks: list[int]) -> list[int]:
    """Descending block sizes; #blocks of size >= k is r_{k-1} - r_k."""
    full = [n] + list(ranks)
    while len(full) >= 2 and full[-1] == full[-2]:
        full.pop()
    # at_least[k-1] = number of blocks of size >= k
    at_least = [full[k - 1] - full[k] for k in range(1, len(full))]
    sizes = []
    for k in range(len(at_least), 0, -1):
        exactly_k = at_least[k - 1] - (at_least[k] if k < len(at_least) else 0)
        sizes.extend([k] * exactly_k)
    return sorted(sizes, reverse=True)


def _orth_columns(v: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormalize the columns of v, dropping near-dependent ones.

    SVD-based: unlike QR this keeps only directions actually present in the
    input span when some columns are (numerically) zero.
    """
    if v.size == 0:
        return v.reshape(v.shape[0], 0)
    u, s, _ = np.linalg.svd(v, full_matrices=False)
    keep = s > tol * max(1.0, s[0] if s.size else 0.0)
    return u[:, keep]


def _subspace_intersection(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis of span(a) ∩ span(b); a, b have orthonormal columns."""
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=np.complex128)
    # x = a @ alpha = b @ beta -> [a, -b] @ [alpha; beta] = 0.
    stacked = np.hstack([a, -b])
    _, s, vh = np.linalg.svd(stacked)
    cutoff = tol * s[0] if s.size else 0.0
    rank = int(np.sum(s > cutoff))
    ns = vh[rank:].conj().T
    if ns.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=np.complex128)
    vecs = a @ ns[: a.shape[1], :]
    return _orth_columns(vecs)


def _restricted_minnorm_solve(op: np.ndarray, rhs: np.ndarray, basis: np.ndarray):
    """Minimum-norm x in span(basis) with op @ x ~= rhs (least squares)."""
    coeff, _, _, _ = np.linalg.lstsq(op @ basis, rhs, rcond=None)
    x = basis @ coeff
    residual = float(np.linalg.norm(op @ x - rhs))
    return x, residual


def jordan_chain(
    h,
    e: complex,
    length: int,
    seed_vector=None,
    tol: float = DEFAULT_TOL,
    chain_tol: float | None = None,
):
    """Generalized-eigenvector chain e_1..e_length at eigenvalue ``e``.

    The seed e_1 must lie in ker(H - E); if omitted it is chosen from
    ker(H - E) ∩ im((H - E)^(length-1)), the directions that admit a chain
    of the requested length. Each later vector is the minimum-norm solution
    of (H - E) x = e_{j-1} restricted to im((H - E)^(length-j)), so the
    chain equations hold to ``chain_tol`` and the result is deterministic.
    """
    a = as_square_matrix(h)
    n = a.shape[0]
    if not 1 <= length <= n:
        raise ChainSolveFailedError(f"chain length {length} out of range for n={n}")
    shifted = a - complex(e) * np.eye(n)
    hnorm = max(np.linalg.norm(a, 2), cmatrix._ABS_FLOOR)
    if chain_tol is None:
        chain_tol = DEFAULT_CHAIN_FRACTION * hnorm
    base_norm = max(np.linalg.norm(shifted, 2), cmatrix._ABS_FLOOR)

    kern = cmatrix.kernel_basis(shifted, tol, scale=base_norm)
    if kern.dim == 0:
        raise NotAnEigenvalueError(f"{e} is not an eigenvalue at tol={tol}")

    # Orthonormal image bases of the powers needed for restriction.
    clean = _denoise(shifted, tol, base_norm)
    powers = [np.eye(n, dtype=np.complex128)]
    for _ in range(length - 1):
        powers.append(powers[-1] @ clean)
    images = []
    for k, p in enumerate(powers):
        if k == 0:
            images.append(np.eye(n, dtype=np.complex128))
        else:
            scale = _power_scale(p, k, base_norm, tol)
            images.append(cmatrix.image_basis(p, tol, scale=scale).vectors)

    if seed_vector is not None:
        seed = np.asarray(seed_vector, dtype=np.complex128).reshape(n)
        nrm = np.linalg.norm(seed)
        if nrm < 1e-14:
            raise SeedNotInKernelError("seed vector has zero norm")
        seed = seed / nrm
        resid = np.linalg.norm(shifted @ seed)
        if resid > max(chain_tol, 10 * tol * base_norm):
            raise SeedNotInKernelError(
                f"seed is not in ker(H - E): residual {resid:.3e}"
            )
    else:
        inter = _subspace_intersection(kern.vectors, images[length - 1])
        if inter.shape[1] == 0:
            raise ChainSolveFailedError(
                f"no kernel direction admits a chain of length {length}"
            )
        seed = inter[:, 0]

    chain = [seed]
    for j in range(2, length + 1):
        basis = images[length - j]
        x, residual = _restricted_minnorm_solve(shifted, chain[-1], basis)
        if residual > chain_tol:
            raise ChainSolveFailedError(
                f"chain equation at level {j} has residual {residual:.3e} "
                f"(chain_tol {chain_tol:.3e})"
            )
        chain.append(x)
    return chain


def jordan_structure(
    h,
    e: complex,
    tol: float = DEFAULT_TOL,
    chain_tol: float | None = None,
    with_chains: bool = True,
) -> JordanStructure:
    """Block sizes and chains of the generalized eigenspace at ``e``."""
    a = as_square_matrix(h)
    n = a.shape[0]
    ranks = rank_sequence(a, e, tol)
    if ranks[0] == n:
        raise NotAnEigenvalueError(f"{e} is not an eigenvalue at tol={tol}")
    sizes = _block_sizes_from_ranks(n, ranks)
    structure = JordanStructure(complex(e), sizes)
    if not with_chains:
        return structure

    shifted = a - complex(e) * np.eye(n)
    base_norm = max(np.linalg.norm(shifted, 2), cmatrix._ABS_FLOOR)
    clean = _denoise(shifted, tol, base_norm)
    kern = cmatrix.kernel_basis(shifted, tol, scale=base_norm).vectors
    used_seeds = np.zeros((n, 0), dtype=np.complex128)
    for size in sizes:
        if size == 1:
            candidates = kern
        else:
            power = np.linalg.matrix_power(clean, size - 1)
            scale = _power_scale(power, size - 1, base_norm, tol)
            img = cmatrix.image_basis(power, tol, scale=scale).vectors
            candidates = _subspace_intersection(kern, img)
        # Remove directions already consumed by earlier (larger) blocks.
        if used_seeds.shape[1]:
            candidates = candidates - used_seeds @ (used_seeds.conj().T @ candidates)
            candidates = _orth_columns(candidates)
        if candidates.shape[1] == 0:
            raise ChainSolveFailedError(
                f"could not find an independent seed for a block of size {size}"
            )
        seed = candidates[:, 0]
        chain = jordan_chain(a, e, size, seed_vector=seed, tol=tol, chain_tol=chain_tol)
        structure.chains.append(chain)
        used_seeds = _orth_columns(np.hstack([used_seeds, seed.reshape(-1, 1)]))
    return structure


def ep_report(h, tol: float = DEFAULT_TOL, cluster_tol: float | None = None) -> EPReport:
    """Cluster the spectrum and report the Jordan structure per cluster."""
    a = as_square_matrix(h)
    hnorm = max(np.linalg.norm(a, 2), cmatrix._ABS_FLOOR)
    if cluster_tol is None:
        cluster_tol = DEFAULT_CLUSTER_FRACTION * hnorm
    pairs = cmatrix.eig(a)
    clusters = cluster_eigenvalues(pairs, cluster_tol)
    entries = []
    nontrivial_blocks = 0
    for cl in clusters:
        if cl.algebraic_multiplicity == 1:
            idx = cl.member_indices[0]
            structure = JordanStructure(cl.center, [1], [[pairs[idx][1]]])
        else:
            structure = jordan_structure(a, cl.center, tol)
        entries.append((cl, structure))
        nontrivial_blocks += sum(1 for s in structure.block_sizes if s > 1)
    if nontrivial_blocks == 0:
        flag = "none"
    elif nontrivial_blocks == 1:
        flag = "simple"
    else:
        flag = "compound"
    return EPReport(entries, flag)
