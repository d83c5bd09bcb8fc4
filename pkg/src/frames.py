"""
Frames on C^n over atomic measure spaces.

Analysis, synthesis and frame operators, optimal frame bounds, the
canonical dual and the full parameterization of dual frames. The inner
product is linear in its first argument: <f, g> = sum f * conj(g).

All spectral information (bounds, rank, inverse) comes from a single
Hermitian eigendecomposition of the symmetrized frame operator. A frame
is detected when its lower bound exceeds ``FRAME_EPS`` times the upper one.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np
from scipy import linalg

from src.domain_model import (
    CoefficientFunction,
    DimensionMismatchError,
    Frame,
    LinearOperator,
    MeasureSpace,
    NotAFrameError,
    SpaceMismatchError,
)
from src.measure import uniform_space

logger = logging.getLogger(__name__)

FRAME_EPS = 1e-10
DUAL_TOL = 1e-10
PARALLEL_CHUNK = 256


class FrameBounds(NamedTuple):
    """Optimal frame bounds (A, B) = (lambda_min, lambda_max) of S_F."""

    lower: float
    upper: float

    @property
    def is_frame(self) -> bool:
        return self.upper > 0 and self.lower > FRAME_EPS * self.upper

    @property
    def is_tight(self) -> bool:
        return self.is_frame and self.upper - self.lower <= FRAME_EPS * self.upper

    @property
    def is_parseval(self) -> bool:
        return self.is_tight and abs(self.upper - 1.0) <= FRAME_EPS


class FrameSpectrum(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def rank(self) -> int:
        top = self.eigenvalues[-1]
        if top <= 0:
            return 0
        return int(np.sum(self.eigenvalues > FRAME_EPS * top))


# ─────────────────────────────────────────────
# CHECKS
# ─────────────────────────────────────────────


def require_same_space(*objects) -> MeasureSpace:
    space = objects[0].space
    for other in objects[1:]:
        if not space.matches(other.space):
            raise SpaceMismatchError("objects are defined on different measure spaces")
    return space


def require_same_dim(F: Frame, G: Frame) -> None:
    if F.dim != G.dim:
        raise DimensionMismatchError(f"frame dimensions differ: {F.dim} vs {G.dim}")


# ─────────────────────────────────────────────
# OPERATORS
# ─────────────────────────────────────────────


def analysis(F: Frame, f) -> CoefficientFunction:
    """
    Analysis coefficients (T_F* f)(x_k) = <f, F(x_k)>.

    :param F: The frame.
    :param f: Vector of length F.dim.
    :return: CoefficientFunction on F.space.
    """
    f = np.asarray(f, dtype=complex)
    if f.shape != (F.dim,):
        raise DimensionMismatchError(f"vector of length {f.size} for a frame on C^{F.dim}")
    return CoefficientFunction(F.space, F.vectors.conj().T @ f)


def synthesis(F: Frame, c: CoefficientFunction) -> np.ndarray:
    """
    Synthesis T_F c = sum_k w_k c_k F(x_k).

    :param F: The frame.
    :param c: Coefficients on the same space.
    :return: Vector in C^n.
    """
    require_same_space(F, c)
    return F.vectors @ (F.space.weights * c.values)


def weighted_outer_sum(
    left: np.ndarray,
    coefficients: np.ndarray,
    right: np.ndarray,
    parallel: bool = False,
    workers: int | None = None,
) -> np.ndarray:
    """
    Accumulate sum_k coefficients[k] * left[:, k] right[:, k]^*.

    The sequential path is a single matrix product in ascending atom
    order. The parallel path sums column chunks on a thread pool and
    agrees with it to rounding.
    """
    if not parallel or left.shape[1] <= PARALLEL_CHUNK:
        return (left * coefficients) @ right.conj().T

    bounds = range(0, left.shape[1], PARALLEL_CHUNK)

    def _chunk(start: int) -> np.ndarray:
        stop = start + PARALLEL_CHUNK
        return (left[:, start:stop] * coefficients[start:stop]) @ right[:, start:stop].conj().T

    with ThreadPoolExecutor(max_workers=workers) as pool:
        partials = list(pool.map(_chunk, bounds))
    return np.sum(partials, axis=0)


def frame_operator(F: Frame, parallel: bool = False) -> LinearOperator:
    """
    Frame operator S_F = sum_k w_k F(x_k) F(x_k)^*, symmetrized.

    :param F: The frame.
    :param parallel: Opt into chunked accumulation on a thread pool.
    :return: Hermitian LinearOperator on C^n.
    """
    S = weighted_outer_sum(F.vectors, F.space.weights, F.vectors, parallel=parallel)
    return LinearOperator((S + S.conj().T) / 2)


def cross_frame_operator(F: Frame, G: Frame) -> LinearOperator:
    """Mixed operator sum_k w_k G(x_k) F(x_k)^*; the identity iff (F, G) is a dual pair."""
    require_same_space(F, G)
    require_same_dim(F, G)
    return LinearOperator(weighted_outer_sum(G.vectors, F.space.weights, F.vectors))


def frame_spectrum(F: Frame) -> FrameSpectrum:
    eigenvalues, eigenvectors = linalg.eigh(frame_operator(F).entries)
    return FrameSpectrum(eigenvalues, eigenvectors)


def frame_bounds(F: Frame) -> FrameBounds:
    """
    Optimal frame bounds from the spectrum of S_F.

    :param F: Any family; Bessel families report a lower bound near zero.
    :return: FrameBounds(lower, upper).
    """
    spectrum = frame_spectrum(F)
    bounds = FrameBounds(float(spectrum.eigenvalues[0]), float(spectrum.eigenvalues[-1]))
    if not bounds.is_frame:
        logger.info("not a frame (Bessel only): A=%.3e, B=%.3e", *bounds)
    return bounds


def inverse_frame_operator(F: Frame) -> LinearOperator:
    spectrum = frame_spectrum(F)
    lower, upper = spectrum.eigenvalues[0], spectrum.eigenvalues[-1]
    if not FrameBounds(float(lower), float(upper)).is_frame:
        raise NotAFrameError(f"frame operator is singular (A={lower:.3e}, B={upper:.3e})")
    V = spectrum.eigenvectors
    return LinearOperator((V / spectrum.eigenvalues) @ V.conj().T)


def canonical_dual(F: Frame) -> Frame:
    """
    Canonical dual S_F^{-1} F(x_k).

    :param F: A frame.
    :return: Frame on the same space.
    """
    return Frame(F.space, inverse_frame_operator(F).entries @ F.vectors)


def is_dual_pair(F: Frame, G: Frame, tol: float = DUAL_TOL) -> bool:
    """
    Check ||sum_k w_k G(x_k) F(x_k)^* - I||_max <= tol.

    :param F: First family.
    :param G: Candidate dual.
    :param tol: Entrywise tolerance.
    :return: True if (F, G) is a dual pair.
    """
    if F.dim != G.dim or not F.space.matches(G.space):
        return False
    defect = cross_frame_operator(F, G).entries - np.eye(F.dim)
    return bool(np.max(np.abs(defect)) <= tol)


def dual_from_bessel(F: Frame, theta: Frame) -> Frame:
    """
    Dual frame parameterized by a Bessel family Theta.

    G(x_k) = S^{-1}F(x_k) + Theta(x_k) - sum_j w_j <S^{-1}F(x_k), F(x_j)> Theta(x_j).
    Every dual of F arises this way.

    :param F: A frame.
    :param theta: Any family on the same space and dimension.
    :return: A dual frame of F.
    """
    require_same_space(F, theta)
    require_same_dim(F, theta)
    dual = canonical_dual(F).vectors
    gram = dual.T @ F.vectors.conj()
    correction = theta.vectors @ (F.space.weights[:, None] * gram.T)
    return Frame(F.space, dual + theta.vectors - correction)


def dual_space_dimension(F: Frame) -> int:
    """
    Complex dimension n * (K - rank) of the affine space of duals.

    :param F: A frame.
    :return: 0 exactly when the dual is unique.
    """
    spectrum = frame_spectrum(F)
    if not FrameBounds(float(spectrum.eigenvalues[0]), float(spectrum.eigenvalues[-1])).is_frame:
        raise NotAFrameError("dual space is only defined for frames")
    return F.dim * (F.size - spectrum.rank)


# ─────────────────────────────────────────────
# GENERATORS
# ─────────────────────────────────────────────


def orthonormal_basis(n: int, weight: float = 1.0) -> Frame:
    return Frame(uniform_space(n, weight), np.eye(n, dtype=complex))


def frame_from_columns(columns, weights=None) -> Frame:
    """Frame on a uniform space from a list of column vectors."""
    vectors = np.asarray(columns, dtype=complex).T
    space = uniform_space(vectors.shape[1])
    if weights is not None:
        space = MeasureSpace(space.points, np.asarray(weights, dtype=float))
    return Frame(space, vectors)


def mercedes_frame() -> Frame:
    """Three unit vectors of R^2 at 90, 210 and 330 degrees."""
    angles = np.deg2rad([90.0, 210.0, 330.0])
    return frame_from_columns(np.stack([np.cos(angles), np.sin(angles)], axis=1))


def random_frame(
    rng: np.random.Generator,
    n: int,
    size: int,
    max_condition: float = 1e2,
    random_weights: bool = False,
) -> Frame:
    """
    Seeded random complex frame of ``size`` vectors in C^n.

    Draws are repeated until cond(S_F) <= max_condition, so that bounds
    can be compared at tight relative tolerances.
    """
    if size < n:
        raise DimensionMismatchError(f"{size} vectors cannot span C^{n}")
    for _ in range(1000):
        vectors = rng.standard_normal((n, size)) + 1j * rng.standard_normal((n, size))
        weights = rng.uniform(0.5, 2.0, size) if random_weights else np.ones(size)
        space = MeasureSpace(np.arange(size, dtype=float), weights)
        frame = Frame(space, vectors)
        lower, upper = frame_bounds(frame)
        if lower > 0 and upper / lower <= max_condition:
            return frame
    raise NotAFrameError(f"no frame of {size} vectors in C^{n} with condition <= {max_condition}")


def random_family(rng: np.random.Generator, space: MeasureSpace, n: int) -> Frame:
    """Unconstrained random Bessel family on ``space``."""
    shape = (n, space.size)
    return Frame(space, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
