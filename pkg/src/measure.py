"""Finite atomic measure spaces, their products and weighted integration."""

import logging

import numpy as np

from src.domain_model import (
    DimensionMismatchError,
    FrameToolkitError,
    MeasureSpace,
    ProductMeasureSpace,
)

logger = logging.getLogger(__name__)


def make_space(points, weights) -> MeasureSpace:
    """
    Build an atomic measure space.

    :param points: K atom coordinates, scalars or equal-length vectors.
    :param weights: K strictly positive masses.
    :return: The MeasureSpace with atoms in the given order.
    """
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 1 or weights.size == 0:
        raise FrameToolkitError("weights must be a non-empty list")
    if points.shape[:1] != weights.shape:
        raise DimensionMismatchError(
            f"{points.shape[0] if points.ndim else 0} points but {weights.size} weights"
        )
    return MeasureSpace(points=points, weights=weights)


def uniform_space(size: int, weight: float = 1.0) -> MeasureSpace:
    """Space of ``size`` atoms at 0, 1, ... all carrying mass ``weight``."""
    return make_space(np.arange(size, dtype=float), np.full(size, weight, dtype=float))


def product(a: MeasureSpace, b: MeasureSpace) -> ProductMeasureSpace:
    """
    Product space with row-major atom order (right factor fastest).

    :param a: Left factor with K1 atoms.
    :param b: Right factor with K2 atoms.
    :return: ProductMeasureSpace with K1 * K2 atoms and product weights.
    """
    k1, k2 = a.size, b.size
    points = np.hstack(
        [np.repeat(a.points, k2, axis=0), np.tile(b.points, (k1, 1))]
    )
    weights = np.outer(a.weights, b.weights).reshape(-1)
    logger.debug("product space %d x %d atoms", k1, k2)
    return ProductMeasureSpace(points=points, weights=weights, left=a, right=b)


def integrate(values, space: MeasureSpace) -> complex:
    """
    Exact integral sum_k w_k values[k].

    :param values: One complex value per atom.
    :param space: The space supplying the weights.
    :return: The weighted sum.
    """
    values = np.asarray(values, dtype=complex)
    if values.shape != (space.size,):
        raise DimensionMismatchError(f"{values.size} values for {space.size} atoms")
    return complex(np.dot(space.weights, values))


def total_mass(space: MeasureSpace) -> float:
    return space.total_mass


def atom_index(space: ProductMeasureSpace, i: int, j: int) -> int:
    """Index of atom (i, j) in a product space."""
    k1, k2 = space.shape
    if not (0 <= i < k1 and 0 <= j < k2):
        raise DimensionMismatchError(f"atom ({i}, {j}) outside a {k1}x{k2} product")
    return i * k2 + j


def atom_pair(space: ProductMeasureSpace, p: int) -> tuple[int, int]:
    """Inverse of :func:`atom_index`."""
    k1, k2 = space.shape
    if not 0 <= p < k1 * k2:
        raise DimensionMismatchError(f"atom {p} outside a product of {k1 * k2} atoms")
    return divmod(p, k2)
