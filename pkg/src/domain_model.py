"""
Domain Model for the continuous frame toolkit.

This module defines the value objects every numerical module operates on:
atomic measure spaces and their products, frames (families of vectors
indexed by measure-space atoms), coefficient functions, symbols, dense
operators, tensor vectors and density operators.

The domain model contains no numerical algorithms beyond validation and
a few cheap derived quantities. It is purely declarative and serves as
the foundation on which the frame, tensor, multiplier, localization and
quantum modules operate. Every object serializes to plain dictionaries
with ``to_dict()`` / ``from_dict()``; complex numbers are written as
``[re, im]`` pairs.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Optional

import numpy as np

DENSITY_TOL = 1e-10


# ─────────────────────────────────────────────
# ERRORS
# ─────────────────────────────────────────────
class FrameToolkitError(ValueError):
    """Base class for all toolkit errors."""


class DimensionMismatchError(FrameToolkitError):
    """Vector, operator or frame dimensions do not agree."""


class SpaceMismatchError(FrameToolkitError):
    """Two objects live on different measure spaces."""


class NotAFrameError(FrameToolkitError):
    """The frame operator is singular (the family is Bessel only)."""


class NotRedundantError(FrameToolkitError):
    """The frame has a unique dual, so no alternative dual exists."""


class InadmissibleWindowError(FrameToolkitError):
    """A window is zero or carries zero-frequency mass."""


class InvalidSymbolError(FrameToolkitError):
    """A symbol cannot be used for the requested construction."""


class ConfigError(FrameToolkitError):
    """An experiment configuration is malformed."""


class ConsistencyError(ArithmeticError):
    """A verified identity or bound does not hold within tolerance."""


# ─────────────────────────────────────────────
# ENUMS
# ─────────────────────────────────────────────
class Subsystem(Enum):
    """
    Tensor factor of a bipartite space.
    """

    LEFT = "left"
    RIGHT = "right"


class OutputFormat(Enum):
    """
    Report output format.
    """

    JSON = "json"
    CSV = "csv"


# ─────────────────────────────────────────────
# ENCODING HELPERS
# ─────────────────────────────────────────────
def encode_complex(array: np.ndarray) -> list:
    """
    Encode a complex array as nested lists ending in ``[re, im]`` pairs.

    :param array: Any complex or real array.
    :return: Nested lists with the same shape plus a trailing pair axis.
    """
    array = np.asarray(array, dtype=complex)
    return np.stack([array.real, array.imag], axis=-1).tolist()


def decode_complex(data) -> np.ndarray:
    """
    Inverse of :func:`encode_complex`.

    :param data: Nested lists ending in ``[re, im]`` pairs.
    :return: A complex array.
    """
    pairs = np.asarray(data, dtype=float)
    if pairs.size == 0:
        return np.zeros(pairs.shape[:-1], dtype=complex)
    return pairs[..., 0] + 1j * pairs[..., 1]


def _as_complex_array(values, ndim: int, name: str) -> np.ndarray:
    array = np.asarray(values, dtype=complex)
    if array.ndim != ndim:
        raise DimensionMismatchError(f"{name} must be {ndim}-dimensional, got {array.ndim}")
    if not np.all(np.isfinite(array)):
        raise FrameToolkitError(f"{name} contains non-finite entries")
    return array


# ─────────────────────────────────────────────
# MEASURE SPACES
# ─────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class MeasureSpace:
    """
    A finite atomic measure: K atom locations with strictly positive masses.

    Every integral over the space is the exact weighted sum over atoms.
    Coordinates are metadata; operator formulas only use weights and
    atom order.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        points = np.asarray(self.points, dtype=float)
        if weights.ndim != 1 or weights.size == 0:
            raise FrameToolkitError("a measure space needs at least one atom")
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        if points.ndim != 2 or points.shape[0] != weights.size:
            raise DimensionMismatchError(
                f"{points.shape[0] if points.ndim else 0} points but {weights.size} weights"
            )
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise FrameToolkitError("atom weights must be finite and strictly positive")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return int(self.weights.size)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def matches(self, other: "MeasureSpace") -> bool:
        """
        Check whether two spaces have identical atoms and weights.

        :param other: The space to compare with.
        :return: True if points and weights agree exactly.
        """
        return (
            self is other
            or (
                self.weights.shape == other.weights.shape
                and self.points.shape == other.points.shape
                and np.array_equal(self.weights, other.weights)
                and np.array_equal(self.points, other.points)
            )
        )

    def to_dict(self) -> dict:
        return {"points": self.points.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "MeasureSpace":
        if "left" in data and "right" in data:
            return ProductMeasureSpace.from_dict(data)
        return cls(points=np.asarray(data["points"]), weights=np.asarray(data["weights"]))


@dataclass(frozen=True, eq=False)
class ProductMeasureSpace(MeasureSpace):
    """
    Product of two atomic spaces; atom (i, j) sits at index i * K2 + j.
    """

    left: Optional[MeasureSpace] = None
    right: Optional[MeasureSpace] = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.left.size, self.right.size

    def to_dict(self) -> dict:
        return {"left": self.left.to_dict(), "right": self.right.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "ProductMeasureSpace":
        from src.measure import product

        return product(MeasureSpace.from_dict(data["left"]), MeasureSpace.from_dict(data["right"]))


# ─────────────────────────────────────────────
# FUNCTIONS ON MEASURE SPACES
# ─────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class CoefficientFunction:
    """
    An element of L^2(X, mu) on an atomic space, e.g. analysis coefficients.
    """

    space: MeasureSpace
    values: np.ndarray

    def __post_init__(self):
        values = _as_complex_array(self.values, 1, "coefficient values")
        if values.size != self.space.size:
            raise DimensionMismatchError(
                f"{values.size} coefficients for a space with {self.space.size} atoms"
            )
        object.__setattr__(self, "values", values)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.space.weights * np.abs(self.values) ** 2)))

    def to_dict(self) -> dict:
        return {"space": self.space.to_dict(), "values": encode_complex(self.values)}

    @classmethod
    def from_dict(cls, data: dict) -> "CoefficientFunction":
        return cls(MeasureSpace.from_dict(data["space"]), decode_complex(data["values"]))


@dataclass(frozen=True, eq=False)
class Symbol:
    """
    A multiplier symbol m: X -> C.

    p-norms use the measure weights, the sup norm is the plain maximum.
    """

    space: MeasureSpace
    values: np.ndarray

    def __post_init__(self):
        values = _as_complex_array(self.values, 1, "symbol values")
        if values.size != self.space.size:
            raise DimensionMismatchError(
                f"symbol has {values.size} values for a space with {self.space.size} atoms"
            )
        object.__setattr__(self, "values", values)

    @cached_property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def norm(self, p: float) -> float:
        """
        Weighted L^p norm of the symbol.

        :param p: Exponent in [1, inf].
        :return: (sum_k w_k |m_k|^p)^(1/p), or the maximum for p = inf.
        """
        if p < 1:
            raise FrameToolkitError(f"p must be at least 1, got {p}")
        if np.isinf(p):
            return self.sup_norm
        return float(np.sum(self.space.weights * np.abs(self.values) ** p) ** (1.0 / p))

    def conj(self) -> "Symbol":
        return Symbol(self.space, self.values.conj())

    def scaled(self, factor: complex) -> "Symbol":
        return Symbol(self.space, self.values * factor)

    def to_dict(self) -> dict:
        return {"space": self.space.to_dict(), "values": encode_complex(self.values)}

    @classmethod
    def from_dict(cls, data: dict) -> "Symbol":
        return cls(MeasureSpace.from_dict(data["space"]), decode_complex(data["values"]))


# ─────────────────────────────────────────────
# FRAMES
# ─────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class Frame:
    """
    A family F(x_k) of vectors in C^n indexed by the atoms of a space.

    ``vectors`` is n x K with column k equal to F(x_k). Weights stay on
    the space and are never folded into the columns. The same type
    carries duals and plain Bessel families, so the frame property is
    checked by :func:`src.frames.frame_bounds` rather than assumed.
    """

    space: MeasureSpace
    vectors: np.ndarray

    def __post_init__(self):
        vectors = _as_complex_array(self.vectors, 2, "frame vectors")
        if vectors.shape[1] != self.space.size:
            raise DimensionMismatchError(
                f"frame has {vectors.shape[1]} columns for {self.space.size} atoms"
            )
        if vectors.shape[0] == 0:
            raise DimensionMismatchError("frame vectors must have positive dimension")
        object.__setattr__(self, "vectors", vectors)

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def size(self) -> int:
        return int(self.vectors.shape[1])

    def column(self, k: int) -> np.ndarray:
        return self.vectors[:, k]

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "space": self.space.to_dict(),
            "vectors": encode_complex(self.vectors.reshape(-1, order="F")),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Frame":
        if "dims" in data:
            return TensorFrame.from_dict(data)
        vectors = decode_complex(data["vectors"])
        frame = cls(MeasureSpace.from_dict(data["space"]), vectors.reshape(data["dim"], -1, order="F"))
        return frame


@dataclass(frozen=True, eq=False)
class TensorFrame(Frame):
    """
    A frame on C^{n1 n2} over a product space.

    ``factors`` records (F1, F2) when the frame was built as F1 ⊗ F2.
    """

    dims: tuple[int, int] = (1, 1)
    factors: Optional[tuple[Frame, Frame]] = None

    def __post_init__(self):
        super().__post_init__()
        n1, n2 = (int(d) for d in self.dims)
        if n1 * n2 != self.dim:
            raise DimensionMismatchError(f"dims {n1}x{n2} do not match dimension {self.dim}")
        object.__setattr__(self, "dims", (n1, n2))

    @property
    def is_simple(self) -> bool:
        return self.factors is not None

    def to_dict(self) -> dict:
        data = super().to_dict()
        data["dims"] = list(self.dims)
        if self.factors is not None:
            data["factors"] = [f.to_dict() for f in self.factors]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "TensorFrame":
        factors = None
        if data.get("factors"):
            factors = tuple(Frame.from_dict(f) for f in data["factors"])
        vectors = decode_complex(data["vectors"])
        return cls(
            space=MeasureSpace.from_dict(data["space"]),
            vectors=vectors.reshape(data["dim"], -1, order="F"),
            dims=tuple(data["dims"]),
            factors=factors,
        )


# ─────────────────────────────────────────────
# OPERATORS AND TENSOR VECTORS
# ─────────────────────────────────────────────
@dataclass(frozen=True, eq=False)
class LinearOperator:
    """
    Dense complex matrix acting between C^cols and C^rows.
    """

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_complex_array(self.entries, 2, "operator"))

    @property
    def rows(self) -> int:
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        return int(self.entries.shape[1])

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def adjoint(self) -> "LinearOperator":
        return LinearOperator(self.entries.conj().T)

    def __matmul__(self, other):
        if isinstance(other, LinearOperator):
            return LinearOperator(self.entries @ other.entries)
        return self.entries @ np.asarray(other)

    def to_dict(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "entries": encode_complex(self.entries)}

    @classmethod
    def from_dict(cls, data: dict) -> "LinearOperator":
        return cls(decode_complex(data["entries"]).reshape(data["rows"], data["cols"]))


@dataclass(frozen=True, eq=False)
class TensorVector:
    """
    A vector of C^{n1} ⊗ C^{n2}; entry (a, b) sits at a * n2 + b.
    """

    dims: tuple[int, int]
    entries: np.ndarray

    def __post_init__(self):
        n1, n2 = (int(d) for d in self.dims)
        entries = _as_complex_array(self.entries, 1, "tensor entries")
        if n1 < 1 or n2 < 1 or entries.size != n1 * n2:
            raise DimensionMismatchError(f"{entries.size} entries for dims {n1}x{n2}")
        object.__setattr__(self, "dims", (n1, n2))
        object.__setattr__(self, "entries", entries)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def as_matrix(self) -> np.ndarray:
        return self.entries.reshape(self.dims)

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "entries": encode_complex(self.entries)}

    @classmethod
    def from_dict(cls, data: dict) -> "TensorVector":
        return cls(tuple(data["dims"]), decode_complex(data["entries"]))


# ─────────────────────────────────────────────
# REPORTS
# ─────────────────────────────────────────────
@dataclass
class SchattenReport:
    """
    Schatten p-norm of an operator together with an optional upper estimate.
    """

    p: float
    norm: float
    singular_values: np.ndarray
    bound: Optional[float] = None

    @property
    def slack(self) -> Optional[float]:
        if self.bound is None:
            return None
        return self.bound - self.norm

    @property
    def within_bound(self) -> bool:
        if self.bound is None:
            return True
        return self.norm <= self.bound + 1e-9 * self.bound

    def to_dict(self) -> dict:
        return {
            "p": "inf" if np.isinf(self.p) else self.p,
            "norm": self.norm,
            "bound": self.bound,
            "slack": self.slack,
            "singular_values": np.asarray(self.singular_values, dtype=float).tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SchattenReport":
        return cls(
            p=float(data["p"]),
            norm=data["norm"],
            singular_values=np.asarray(data["singular_values"], dtype=float),
            bound=data.get("bound"),
        )


@dataclass
class DensityOperator:
    """
    A square operator with its certified state flags.

    Use :meth:`certify` to compute the flags from an operator.
    """

    op: LinearOperator
    hermitian: bool
    psd: bool
    unit_trace: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return self.hermitian and self.psd and self.unit_trace

    @property
    def matrix(self) -> np.ndarray:
        return self.op.entries

    @classmethod
    def certify(cls, op: LinearOperator, tol: float = DENSITY_TOL) -> "DensityOperator":
        """
        Check the Hermitian, positivity and unit-trace conditions.

        :param op: Square operator to certify.
        :param tol: Relative tolerance for all three checks.
        :return: A DensityOperator whose flags record the outcome.
        """
        if not op.is_square:
            raise DimensionMismatchError(f"density operator must be square, got {op.rows}x{op.cols}")
        matrix = op.entries
        scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
        defect = float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0
        eigenvalues = np.linalg.eigvalsh((matrix + matrix.conj().T) / 2)
        min_eig, max_eig = float(eigenvalues[0]), float(eigenvalues[-1])
        trace = complex(np.trace(matrix))
        diagnostics = {
            "hermitian_defect": defect,
            "min_eig": min_eig,
            "max_eig": max_eig,
            "trace": trace,
        }
        return cls(
            op=op,
            hermitian=defect <= tol * max(scale, np.finfo(float).tiny),
            psd=max_eig > 0 and min_eig >= -tol * max_eig,
            unit_trace=abs(trace - 1) <= tol,
            diagnostics=diagnostics,
        )

    def to_dict(self) -> dict:
        return {
            "op": self.op.to_dict(),
            "hermitian": self.hermitian,
            "psd": self.psd,
            "unit_trace": self.unit_trace,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DensityOperator":
        return cls(
            op=LinearOperator.from_dict(data["op"]),
            hermitian=data["hermitian"],
            psd=data["psd"],
            unit_trace=data["unit_trace"],
        )
