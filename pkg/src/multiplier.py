"""
Frame multipliers M_{m,F,G} = T_G D_m T_F*, their norms and traces.

Verification helpers take ``check``: with ``check=True`` a violated bound
or identity raises :class:`ConsistencyError`, otherwise the computed
values are returned for the caller to judge.
"""

import logging
from typing import NamedTuple

import numpy as np
from scipy import linalg

from src.domain_model import (
    ConsistencyError,
    DimensionMismatchError,
    Frame,
    FrameToolkitError,
    LinearOperator,
    SchattenReport,
    Subsystem,
    Symbol,
)
from src.frames import frame_bounds, require_same_dim, require_same_space, weighted_outer_sum
from src.tensor import kron_op, tensor_frame, tensor_symbol

logger = logging.getLogger(__name__)

BOUND_SLACK = 1e-9
PARTIAL_TRACE_TOL = 1e-12


class NormBound(NamedTuple):
    opnorm: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.opnorm <= self.bound * (1 + BOUND_SLACK)


def multiplier(m: Symbol, F: Frame, G: Frame, parallel: bool = False) -> LinearOperator:
    """
    Multiplier M = sum_k w_k m_k G(x_k) F(x_k)^*.

    Equivalently <M f, g> = sum_k w_k m_k <f, F(x_k)> <G(x_k), g>.

    :param m: Symbol on the common space.
    :param F: Analysis family.
    :param G: Synthesis family.
    :param parallel: Opt into chunked accumulation.
    :return: Operator on C^n.
    """
    space = require_same_space(m, F, G)
    require_same_dim(F, G)
    entries = weighted_outer_sum(G.vectors, space.weights * m.values, F.vectors, parallel=parallel)
    return LinearOperator(entries)


def singular_values(T: LinearOperator) -> np.ndarray:
    if T.entries.size == 0:
        return np.zeros(0)
    return linalg.svdvals(T.entries)


def operator_norm(T: LinearOperator) -> float:
    s = singular_values(T)
    return float(s[0]) if s.size else 0.0


def norm_bound(F: Frame) -> float:
    """L_F = max_k ||F(x_k)||."""
    return float(np.max(np.linalg.norm(F.vectors, axis=0)))


def symbol_norm(m: Symbol, p: float) -> float:
    return m.norm(p)


def norm_bound_check(m: Symbol, F: Frame, G: Frame, check: bool = True) -> NormBound:
    """
    Compare ||M_{m,F,G}|| with ||m||_inf sqrt(B_F B_G).

    :return: NormBound(opnorm, bound).
    """
    opnorm = operator_norm(multiplier(m, F, G))
    bound = m.sup_norm * float(np.sqrt(frame_bounds(F).upper * frame_bounds(G).upper))
    result = NormBound(opnorm, bound)
    if check and not result.holds:
        raise ConsistencyError(f"operator norm {opnorm:.6e} exceeds bound {bound:.6e}")
    return result


def schatten_norm(T: LinearOperator, p: float) -> SchattenReport:
    """
    Schatten p-norm: the l^p norm of the singular values.

    :param T: Any operator.
    :param p: Exponent in [1, inf].
    :return: SchattenReport without a bound.
    """
    if p < 1:
        raise FrameToolkitError(f"Schatten exponent must be at least 1, got {p}")
    s = singular_values(T)
    if np.isinf(p):
        norm = float(s[0]) if s.size else 0.0
    else:
        norm = float(np.sum(s**p) ** (1.0 / p))
    return SchattenReport(p=float(p), norm=norm, singular_values=s)


def schatten_bound(m: Symbol, F: Frame, G: Frame, p: float, check: bool = True) -> SchattenReport:
    """
    Schatten norm of M_{m,F,G} against ||m||_p (L_F L_G)^{1/p} (B_F B_G)^{(p-1)/(2p)}.

    For p = 1 the estimate is the trace-class bound ||m||_1 L_F L_G.
    """
    if not 1 <= p < np.inf:
        raise FrameToolkitError(f"Schatten bound needs 1 <= p < inf, got {p}")
    report = schatten_norm(multiplier(m, F, G), p)
    lipschitz = norm_bound(F) * norm_bound(G)
    bessel = frame_bounds(F).upper * frame_bounds(G).upper
    report.bound = m.norm(p) * lipschitz ** (1.0 / p) * bessel ** ((p - 1) / (2 * p))
    if check and not report.within_bound:
        raise ConsistencyError(f"S_{p} norm {report.norm:.6e} exceeds bound {report.bound:.6e}")
    return report


def trace(T: LinearOperator) -> complex:
    if not T.is_square:
        raise DimensionMismatchError(f"trace needs a square operator, got {T.rows}x{T.cols}")
    return complex(np.trace(T.entries))


def partial_trace(T: LinearOperator, dims: tuple[int, int], over: Subsystem | str) -> LinearOperator:
    """
    Partial trace of an operator on C^{n1} ⊗ C^{n2}.

    :param T: Square operator of size n1 n2.
    :param dims: (n1, n2).
    :param over: The subsystem traced out.
    :return: Operator on the remaining factor.
    """
    over = Subsystem(over)
    n1, n2 = dims
    if T.rows != n1 * n2 or not T.is_square:
        raise DimensionMismatchError(f"operator of size {T.rows}x{T.cols} for dims {n1}x{n2}")
    blocks = T.entries.reshape(n1, n2, n1, n2)
    if over is Subsystem.RIGHT:
        return LinearOperator(np.trace(blocks, axis1=1, axis2=3))
    return LinearOperator(np.trace(blocks, axis1=0, axis2=2))


def tensor_multiplier(
    m1: Symbol, F1: Frame, G1: Frame, m2: Symbol, F2: Frame, G2: Frame
) -> LinearOperator:
    """M_{m1⊗m2, F1⊗F2, G1⊗G2} assembled on the product space."""
    return multiplier(tensor_symbol(m1, m2), tensor_frame(F1, F2), tensor_frame(G1, G2))


def multiplier_partial_trace(
    m1: Symbol,
    F1: Frame,
    G1: Frame,
    m2: Symbol,
    F2: Frame,
    G2: Frame,
    over: Subsystem | str = Subsystem.RIGHT,
    check: bool = True,
) -> LinearOperator:
    """
    Partial trace of a tensor multiplier, verified against the scaled factor.

    Tracing out the right factor gives M_{m1,F1,G1} Tr(M_{m2,F2,G2}), and
    symmetrically for the left factor.
    """
    over = Subsystem(over)
    M1, M2 = multiplier(m1, F1, G1), multiplier(m2, F2, G2)
    full = tensor_multiplier(m1, F1, G1, m2, F2, G2)
    reduced = partial_trace(full, (F1.dim, F2.dim), over)
    if over is Subsystem.RIGHT:
        expected = M1.entries * trace(M2)
    else:
        expected = M2.entries * trace(M1)
    defect = float(np.max(np.abs(reduced.entries - expected)))
    scale = max(1.0, float(np.max(np.abs(expected))))
    logger.debug("partial trace over %s: defect %.3e", over.value, defect)
    if check and defect > PARTIAL_TRACE_TOL * scale:
        raise ConsistencyError(f"partial trace defect {defect:.3e} exceeds tolerance")
    return reduced


def is_reproducing_pair(F: Frame, G: Frame) -> bool:
    """True if M_{1,F,G} is invertible."""
    ones = Symbol(F.space, np.ones(F.size))
    s = singular_values(multiplier(ones, F, G))
    return bool(s.size and s[-1] > 1e-10 * s[0])


def kron_factorization_defect(
    m1: Symbol, F1: Frame, G1: Frame, m2: Symbol, F2: Frame, G2: Frame
) -> float:
    """Relative max-entry gap between the tensor multiplier and the Kronecker of factors."""
    full = tensor_multiplier(m1, F1, G1, m2, F2, G2).entries
    kron = kron_op(multiplier(m1, F1, G1), multiplier(m2, F2, G2)).entries
    return float(np.max(np.abs(full - kron)) / max(np.max(np.abs(kron)), np.finfo(float).tiny))
