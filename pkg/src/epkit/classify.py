"""Algebraic classifier for zero-energy exceptional structure.

For N = 2 the decision procedure tests, in a fixed order, the kernel/image
relations between the blocks B and B':

    (a) both blocks full rank                -> Nondegenerate
    (b) B = 0 and B' proportional to I       -> DoubletEP2   (or the mirror)
    (c) dim ker B + dim ker B' = 1 and
        ker(B B') = im(B B')                 -> EP4
    (d) dim ker B = dim ker B' = 1 and
        im B' = ker B xor im B = ker B'      -> EP3Mixed
    (e) anything else                        -> Unclassified

The conditions are mutually exclusive in exact arithmetic; the fixed order
plus a Jordan-structure cross-check on the assembled 4 x 4 Hamiltonian makes
the numerical outcome reproducible. Unclassified is a first-class answer:
generic perturbed inputs legitimately fall outside the exact taxonomy.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import cmatrix, spectral
from .cmatrix import DEFAULT_TOL
from .errors import CrossCheckMismatchError, ZeroEigenvaluePresentError
from .sublattice import assemble_blocks


class EPKind(str, Enum):
    DOUBLET_EP2 = "DoubletEP2"
    EP4 = "EP4"
    EP3_MIXED = "EP3Mixed"
    NONZERO_EP2_PAIR = "NonzeroEnergyEP2Pair"
    NONDEGENERATE = "Nondegenerate"
    UNCLASSIFIED = "Unclassified"


@dataclass
class EPClassification:
    """Classifier verdict plus the evidence it rests on."""

    kind: EPKind
    evidence: dict

    def __str__(self):
        blocks = self.evidence.get("jordan_blocks_at_zero")
        extra = f", blocks {blocks}" if blocks else ""
        return f"{self.kind.value}{extra}"


_EXPECTED_BLOCKS = {
    EPKind.DOUBLET_EP2: [2, 2],
    EPKind.EP4: [4],
    EPKind.EP3_MIXED: [3, 1],
}


def _zero_blocks(h, tol):
    """Jordan block sizes of H at E = 0, or [] when H is nonsingular."""
    n = h.shape[0]
    if cmatrix.svd_rank(h, tol) == n:
        return []
    return spectral.jordan_structure(h, 0.0, tol, with_chains=False).block_sizes


def _proportional_to_identity(m, tol, scale):
    n = m.shape[0]
    mean = np.trace(m) / n
    dev = np.linalg.norm(m - mean * np.eye(n), 2)
    return dev <= tol * scale and abs(mean) > tol * scale, complex(mean)


def classify_zero_energy(b, bprime, tol: float = DEFAULT_TOL) -> EPClassification:
    """Zero-energy EP taxonomy for N = 2 block pairs.

    All rank and kernel decisions share one magnitude scale,
    max(sigma_max(B), sigma_max(B')), so that "zero block" means small
    against the pair and not against itself. The verdict is cross-checked
    against the numerical Jordan blocks of the assembled Hamiltonian;
    disagreement raises CrossCheckMismatchError (a tolerance pathology,
    not a physics answer).
    """
    b = cmatrix.as_square_matrix(b)
    bp = cmatrix.as_square_matrix(bprime)
    if b.shape != (2, 2) or bp.shape != (2, 2):
        raise ValueError("classify_zero_energy handles N = 2; see check_ep2n")
    scale = max(np.linalg.norm(b, 2), np.linalg.norm(bp, 2), cmatrix._ABS_FLOOR)

    rank_b = cmatrix.svd_rank(b, tol, scale=scale)
    rank_bp = cmatrix.svd_rank(bp, tol, scale=scale)
    ker_b = cmatrix.kernel_basis(b, tol, scale=scale)
    ker_bp = cmatrix.kernel_basis(bp, tol, scale=scale)
    im_b = cmatrix.image_basis(b, tol, scale=scale)
    im_bp = cmatrix.image_basis(bp, tol, scale=scale)

    b_is_zero = np.linalg.norm(b, 2) <= tol * scale
    bp_is_zero = np.linalg.norm(bp, 2) <= tol * scale
    bp_prop_id, bp_coeff = _proportional_to_identity(bp, tol, scale)
    b_prop_id, b_coeff = _proportional_to_identity(b, tol, scale)

    product = b @ bp
    prod_scale = max(np.linalg.norm(product, 2), cmatrix._ABS_FLOOR)
    ker_prod = cmatrix.kernel_basis(product, tol, scale=prod_scale)
    im_prod = cmatrix.image_basis(product, tol, scale=prod_scale)
    ker_im_equal = cmatrix.subspace_equal(ker_prod, im_prod, tol)

    im_bp_eq_ker_b = cmatrix.subspace_equal(im_bp, ker_b, tol)
    im_b_eq_ker_bp = cmatrix.subspace_equal(im_b, ker_bp, tol)

    evidence = {
        "n": 2,
        "scale": float(scale),
        "dim_ker_b": ker_b.dim,
        "dim_ker_bprime": ker_bp.dim,
        "rank_b": rank_b,
        "rank_bprime": rank_bp,
        "relations": {
            "b_zero": bool(b_is_zero),
            "bprime_zero": bool(bp_is_zero),
            "b_prop_identity": bool(b_prop_id),
            "bprime_prop_identity": bool(bp_prop_id),
            "ker_bbp_eq_im_bbp": bool(ker_im_equal),
            "im_bprime_eq_ker_b": bool(im_bp_eq_ker_b),
            "im_b_eq_ker_bprime": bool(im_b_eq_ker_bp),
        },
    }

    if rank_b == 2 and rank_bp == 2:
        kind = EPKind.NONDEGENERATE
    elif b_is_zero and bp_prop_id:
        kind = EPKind.DOUBLET_EP2
    elif bp_is_zero and b_prop_id:
        kind = EPKind.DOUBLET_EP2
        evidence["relations"]["mirror"] = True
    elif ker_b.dim + ker_bp.dim == 1 and ker_im_equal:
        kind = EPKind.EP4
    elif (
        ker_b.dim == 1
        and ker_bp.dim == 1
        and (im_bp_eq_ker_b != im_b_eq_ker_bp)
    ):
        kind = EPKind.EP3_MIXED
        evidence["relations"]["mirror"] = bool(im_b_eq_ker_bp)
    else:
        kind = EPKind.UNCLASSIFIED

    h = assemble_blocks(b, bp)
    blocks = _zero_blocks(h, tol)
    evidence["jordan_blocks_at_zero"] = blocks

    if kind is EPKind.NONDEGENERATE and blocks:
        raise CrossCheckMismatchError(
            f"full-rank blocks but H has zero-energy blocks {blocks}"
        )
    expected = _EXPECTED_BLOCKS.get(kind)
    if expected is not None and blocks != expected:
        raise CrossCheckMismatchError(
            f"{kind.value} verdict but H has zero-energy blocks {blocks}, "
            f"expected {expected}"
        )
    return EPClassification(kind, evidence)


def classify_nonzero_energy(b, bprime, tol: float = DEFAULT_TOL) -> EPClassification:
    """Detect the doublet of 2-blocks at +-sqrt(lambda) for nonzero lambda.

    Defectiveness of B B' at some eigenvalue lambda != 0 forces identical
    defectiveness at both energies +-sqrt(lambda) of the assembled H, so the
    verdict is always a pair.
    """
    b = cmatrix.as_square_matrix(b)
    bp = cmatrix.as_square_matrix(bprime)
    product = b @ bp
    scale = max(np.linalg.norm(product, 2), cmatrix._ABS_FLOOR)
    pairs = cmatrix.eig(product)
    if any(abs(lam) <= tol * scale for lam, _ in pairs):
        raise ZeroEigenvaluePresentError(
            "B B' has a (near-)zero eigenvalue; use classify_zero_energy"
        )
    report = spectral.ep_report(product, tol)
    defective = [
        (cl.center, st.block_sizes)
        for cl, st in report.entries
        if any(s > 1 for s in st.block_sizes)
    ]
    evidence = {
        "n": b.shape[0],
        "eigenvalues": [complex(lam) for lam, _ in pairs],
        "defective_lambdas": [lam for lam, _ in defective],
        "doublet_energies": [
            (np.sqrt(lam), -np.sqrt(lam)) for lam, _ in defective
        ],
    }
    kind = EPKind.NONZERO_EP2_PAIR if defective else EPKind.NONDEGENERATE
    return EPClassification(kind, evidence)


def check_ep2n(b, bprime, tol: float = DEFAULT_TOL) -> bool:
    """Highest-order condition for general N: a single 2N-block at E = 0.

    Operationally: dim ker B + dim ker B' = 1 together with B'B similar to
    the nilpotent single block, i.e. rank((B'B)^k) = N - k for 1 <= k <= N.
    The answer is cross-checked against the Jordan structure of the
    assembled 2N x 2N Hamiltonian.
    """
    b = cmatrix.as_square_matrix(b)
    bp = cmatrix.as_square_matrix(bprime)
    if b.shape != bp.shape:
        raise ValueError("B and B' must have matching shapes")
    n = b.shape[0]
    scale = max(np.linalg.norm(b, 2), np.linalg.norm(bp, 2), cmatrix._ABS_FLOOR)
    ker_sum = (
        cmatrix.kernel_basis(b, tol, scale=scale).dim
        + cmatrix.kernel_basis(bp, tol, scale=scale).dim
    )
    product = bp @ b
    pnorm = max(np.linalg.norm(product, 2), cmatrix._ABS_FLOOR)
    clean = spectral._denoise(product, tol, pnorm)
    nilpotent_single_block = True
    power = np.eye(n, dtype=np.complex128)
    for k in range(1, n + 1):
        power = power @ clean
        power_scale = spectral._power_scale(power, k, pnorm, tol)
        if cmatrix.svd_rank(power, tol, scale=power_scale) != n - k:
            nilpotent_single_block = False
            break
    verdict = ker_sum == 1 and nilpotent_single_block

    blocks = _zero_blocks(assemble_blocks(b, bp), tol)
    has_full_block = blocks == [2 * n]
    if verdict != has_full_block:
        raise CrossCheckMismatchError(
            f"EP2N algebra says {verdict} but assembled H has blocks {blocks}"
        )
    return verdict


def classify_point(b, bprime, tol: float = DEFAULT_TOL) -> EPClassification:
    """Classification entry point for arbitrary N (used by the BZ scanner).

    N = 2 goes through the Table-style procedure. Other N fall back to the
    Jordan blocks of the assembled Hamiltonian at E = 0: a single 4-block
    maps to EP4, a 3-block beside a trivial zero mode to EP3Mixed, and N
    2-blocks to DoubletEP2 (for N = 1 this is the single EP2 of that
    family). Evidence carries the kernel dimensions and block sizes.
    """
    b = cmatrix.as_square_matrix(b)
    bp = cmatrix.as_square_matrix(bprime)
    n = b.shape[0]
    if n == 2:
        return classify_zero_energy(b, bp, tol)

    scale = max(np.linalg.norm(b, 2), np.linalg.norm(bp, 2), cmatrix._ABS_FLOOR)
    blocks = _zero_blocks(assemble_blocks(b, bp), tol)
    nontrivial = [s for s in blocks if s > 1]
    trivial = [s for s in blocks if s == 1]
    if not blocks:
        kind = EPKind.NONDEGENERATE
    elif nontrivial == [4]:
        kind = EPKind.EP4
    elif nontrivial == [3] and trivial:
        kind = EPKind.EP3_MIXED
    elif nontrivial and nontrivial == [2] * n:
        kind = EPKind.DOUBLET_EP2
    else:
        kind = EPKind.UNCLASSIFIED
    evidence = {
        "n": n,
        "scale": float(scale),
        "dim_ker_b": cmatrix.kernel_basis(b, tol, scale=scale).dim,
        "dim_ker_bprime": cmatrix.kernel_basis(bp, tol, scale=scale).dim,
        "jordan_blocks_at_zero": blocks,
        "generic_n_fallback": True,
    }
    return EPClassification(kind, evidence)


def mixed_limit_family(kind: str, epsilon: float) -> np.ndarray:
    """The two 4 x 4 one-parameter families whose eps -> 0 limit is the
    mixed-type 3-block matrix diag(J3(0), 0).

    "ViaEP2" stays in the 2-block stratum for eps != 0 (one 2-block at zero
    plus simple eigenvalues eps and 2 eps); "ViaEP4" stays in the 4-block
    stratum. Both converge entrywise linearly in eps.
    """
    eps = float(epsilon)
    m = np.zeros((4, 4), dtype=np.complex128)
    m[0, 1] = 1.0
    m[1, 2] = 1.0
    if kind == "ViaEP2":
        m[2, 2] = eps
        m[3, 3] = 2 * eps
    elif kind == "ViaEP4":
        m[2, 3] = eps
    else:
        raise ValueError(f"unknown family kind {kind!r}; use 'ViaEP2' or 'ViaEP4'")
    return m
