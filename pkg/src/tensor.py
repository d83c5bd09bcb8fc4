"""
Tensor products of vectors, operators, frames and symbols.

Index (a, b) of C^{n1} ⊗ C^{n2} is a * n2 + b, matching the row-major
atom order of product measure spaces, so np.kron realizes every product.
"""

import logging
from typing import NamedTuple

import numpy as np

from src.domain_model import (
    DimensionMismatchError,
    Frame,
    FrameToolkitError,
    LinearOperator,
    NotRedundantError,
    Symbol,
    TensorFrame,
    TensorVector,
)
from src.frames import (
    FrameBounds,
    canonical_dual,
    dual_from_bessel,
    dual_space_dimension,
    frame_bounds,
    is_dual_pair,
)
from src.measure import product

logger = logging.getLogger(__name__)

RANK_EPS = 1e-10


class SchmidtDecomposition(NamedTuple):
    """
    x = sum_n coefficients[n] * left[:, n] ⊗ right[:, n].
    """

    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return np.einsum("n,an,bn->ab", self.coefficients, self.left, self.right).reshape(-1)


def kron_vec(u, v) -> TensorVector:
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.ndim != 1 or v.ndim != 1 or u.size == 0 or v.size == 0:
        raise DimensionMismatchError("tensor factors must be non-empty vectors")
    return TensorVector((u.size, v.size), np.kron(u, v))


def kron_op(S: LinearOperator, T: LinearOperator) -> LinearOperator:
    """
    Kronecker product S ⊗ T, consistent with :func:`kron_vec`.

    :param S: Square operator on C^{n1}.
    :param T: Square operator on C^{n2}.
    :return: Operator on C^{n1 n2}.
    """
    if not (S.is_square and T.is_square):
        raise DimensionMismatchError("tensor factors must be square operators")
    return LinearOperator(np.kron(S.entries, T.entries))


def tensor_frame(F1: Frame, F2: Frame) -> TensorFrame:
    """
    Frame F1 ⊗ F2 over the product space.

    Column i * K2 + j equals kron(F1(x_i), F2(y_j)); the optimal bounds are
    (A1 A2, B1 B2) since S_{F1⊗F2} = S_{F1} ⊗ S_{F2}.
    """
    n1, n2 = F1.dim, F2.dim
    vectors = np.einsum("ai,bj->abij", F1.vectors, F2.vectors).reshape(n1 * n2, -1)
    return TensorFrame(
        space=product(F1.space, F2.space),
        vectors=vectors,
        dims=(n1, n2),
        factors=(F1, F2),
    )


def tensor_symbol(m1: Symbol, m2: Symbol) -> Symbol:
    """Product symbol (m1 ⊗ m2)(x, y) = m1(x) m2(y) on the product space."""
    return Symbol(product(m1.space, m2.space), np.kron(m1.values, m2.values))


def bound_constants(F: Frame) -> tuple[float, float]:
    """
    (C_F, D_F): infimum and supremum of the frame energy over the unit sphere.

    In finite dimensions these are the extreme eigenvalues of S_F.
    """
    lower, upper = frame_bounds(F)
    return lower, upper


def recover_factor_bounds(tensor_bounds: FrameBounds, other: Frame) -> FrameBounds:
    """
    Bounds of one factor from the tensor bounds: A1 = A / C_{F2}, B1 = B / D_{F2}.

    :param tensor_bounds: Bounds of F1 ⊗ F2.
    :param other: The factor F2.
    :return: The implied bounds of F1.
    """
    c_other, d_other = bound_constants(other)
    return FrameBounds(tensor_bounds.lower / c_other, tensor_bounds.upper / d_other)


def schmidt(x: TensorVector) -> SchmidtDecomposition:
    """
    Schmidt decomposition via the SVD of the n1 x n2 reshaping of x.

    Coefficients are descending and above RANK_EPS relative to the largest.
    Each left vector has its first nonzero entry real positive, the phase
    moved onto the matching right vector.
    """
    n1, n2 = x.dims
    U, s, Vh = np.linalg.svd(x.as_matrix(), full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return SchmidtDecomposition(np.zeros(0), np.zeros((n1, 0), complex), np.zeros((n2, 0), complex))
    keep = s > RANK_EPS * s[0]
    left = U[:, keep].copy()
    right = Vh[keep, :].T.copy()
    for n in range(left.shape[1]):
        column = left[:, n]
        pivot = column[np.argmax(np.abs(column) > RANK_EPS)]
        phase = pivot / abs(pivot)
        left[:, n] = column * np.conj(phase)
        right[:, n] = right[:, n] * phase
    return SchmidtDecomposition(s[keep], left, right)


def simple_rank(x: TensorVector) -> int:
    """Number of Schmidt coefficients; x is a simple tensor iff this is at most 1."""
    return int(schmidt(x).coefficients.size)


def column_ranks(F: TensorFrame) -> list[int]:
    return [simple_rank(TensorVector(F.dims, F.vectors[:, k])) for k in range(F.size)]


def _rank_two_candidate(F: TensorFrame, seed: int, scale: float) -> Frame:
    n1, n2 = F.dims
    rng = np.random.default_rng(seed)
    draw = rng.standard_normal((n1, n2)) + 1j * rng.standard_normal((n1, n2))
    U, _, Vh = np.linalg.svd(draw)
    block = np.outer(U[:, 0], Vh[0, :]) + np.outer(U[:, 1], Vh[1, :])
    per_atom = rng.standard_normal(F.size) + 1j * rng.standard_normal(F.size)
    return Frame(F.space, scale * np.outer(block.reshape(-1), per_atom))


def nonsimple_dual(
    F: TensorFrame,
    W: Frame | None = None,
    seed: int = 0,
    max_candidates: int = 32,
) -> TensorFrame:
    """
    A dual of F1 ⊗ F2 with at least one non-simple column.

    With an explicit ``W`` the classification formula is applied to it
    directly. Otherwise rank-two candidates W_k = alpha z_k (u1⊗v1 + u2⊗v2)
    are drawn from seeds ``seed, seed + 1, ...`` until a verified dual has a
    column of simple rank at least two.

    :param F: Simple tensor frame built by :func:`tensor_frame`.
    :param W: Optional Bessel family on the product space.
    :param seed: First candidate seed.
    :param max_candidates: Number of candidates tried.
    :return: The dual as a TensorFrame without factor provenance.
    """
    if F.factors is None:
        raise FrameToolkitError("nonsimple_dual needs a tensor frame built from two factors")
    n1, n2 = F.dims
    if min(n1, n2) < 2:
        raise DimensionMismatchError(f"non-simple tensors need both dims > 1, got {n1}x{n2}")
    if dual_space_dimension(F) == 0:
        raise NotRedundantError("the frame has a unique dual, which is simple")

    if W is not None:
        G = dual_from_bessel(F, W)
        return TensorFrame(space=F.space, vectors=G.vectors, dims=F.dims)

    scale = 0.1 * float(np.mean(np.linalg.norm(canonical_dual(F).vectors, axis=0)))
    for offset in range(max_candidates):
        G = dual_from_bessel(F, _rank_two_candidate(F, seed + offset, scale))
        dual = TensorFrame(space=F.space, vectors=G.vectors, dims=F.dims)
        if is_dual_pair(F, dual) and max(column_ranks(dual)) >= 2:
            logger.debug("non-simple dual found with candidate seed %d", seed + offset)
            return dual
    raise FrameToolkitError(f"no non-simple dual among {max_candidates} candidates")
