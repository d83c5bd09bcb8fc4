"""
Admissible multipliers as density operators of bipartite states.

A multiplier M_{m,F,F} with m >= 0 is the frame operator of sqrt(m) F, so
it is Hermitian and positive; normalizing its trace makes it a state.
Separable states are built from product symbols m1 ⊗ m2 on tensor frames
and their reduced operators are the factor multipliers.
"""

import logging
from typing import NamedTuple, Sequence

import numpy as np

from src.domain_model import (
    DENSITY_TOL,
    ConsistencyError,
    DensityOperator,
    Frame,
    InvalidSymbolError,
    LinearOperator,
    Subsystem,
    Symbol,
)
from src.localization import gabor_frame
from src.measure import integrate
from src.multiplier import multiplier, partial_trace, trace
from src.tensor import tensor_frame, tensor_symbol

logger = logging.getLogger(__name__)


class TraceFormula(NamedTuple):
    lhs: complex
    rhs: complex

    @property
    def defect(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def holds(self) -> bool:
        return self.defect <= DENSITY_TOL * max(1.0, abs(self.rhs))


class SeparableState(NamedTuple):
    """A product state and its two reduced density operators."""

    rho: DensityOperator
    left: DensityOperator
    right: DensityOperator


def is_admissible(M: LinearOperator, tol: float = DENSITY_TOL) -> tuple[bool, dict]:
    """
    Check that M is Hermitian, positive semidefinite and of unit trace.

    :param M: Square operator.
    :param tol: Relative tolerance of every check.
    :return: (admissible, diagnostics); diagnostics list the violated
        conditions under "violations".
    """
    state = DensityOperator.certify(M, tol)
    violations = [
        name
        for name, ok in (("hermitian", state.hermitian), ("psd", state.psd), ("unit_trace", state.unit_trace))
        if not ok
    ]
    return state.valid, {**state.diagnostics, "violations": violations}


def _windows(windows) -> tuple[np.ndarray, ...]:
    """A single window, or a sequence of 1-D tensor-factor windows."""
    if isinstance(windows, np.ndarray):
        if windows.ndim == 1:
            return (windows.astype(complex),)
        return tuple(np.asarray(w, dtype=complex) for w in windows)
    if len(windows) > 0 and all(np.ndim(w) == 1 for w in windows):
        return tuple(np.asarray(w, dtype=complex) for w in windows)
    return (np.asarray(windows, dtype=complex),)


def _inner(phi: Sequence[np.ndarray], psi: Sequence[np.ndarray]) -> complex:
    """<psi, phi> of tensor windows, the product of factor inner products."""
    return complex(np.prod([np.vdot(a, b) for a, b in zip(phi, psi)]))


def trace_formula(m: Symbol, phi, psi, weight: float = 1.0, check: bool = True) -> TraceFormula:
    """
    Trace of the STFT multiplier against <psi, phi> int m.

    With the inner product linear in its first slot the trace of
    M_{m, pi phi, pi psi} is sum_k w_k m_k <pi psi, pi phi> = <psi, phi> int m.

    :param m: Symbol on the N x N Gabor grid.
    :param phi: Analysis window.
    :param psi: Synthesis window.
    :param weight: Grid atom mass.
    :return: TraceFormula(lhs, rhs).
    """
    lhs = trace(multiplier(m, gabor_frame(phi, weight).frame, gabor_frame(psi, weight).frame))
    rhs = _inner(_windows(np.asarray(phi, dtype=complex)), _windows(np.asarray(psi, dtype=complex)))
    result = TraceFormula(lhs, rhs * integrate(m.values, m.space))
    if check and not result.holds:
        raise ConsistencyError(f"trace formula defect {result.defect:.3e}")
    return result


def normalize_symbol(m: Symbol, phi, psi) -> Symbol:
    """
    Rescale m so that int m = 1 / <psi, phi>.

    :param m: Symbol with nonzero integral.
    :param phi: Window or tuple of tensor-factor windows.
    :param psi: Matching synthesis windows.
    :return: Symbol whose STFT multiplier has unit trace.
    """
    mass = integrate(m.values, m.space)
    overlap = _inner(_windows(phi), _windows(psi))
    if mass == 0:
        raise InvalidSymbolError("symbol has zero integral")
    if overlap == 0:
        raise InvalidSymbolError("analysis and synthesis windows are orthogonal")
    return m.scaled(1.0 / (mass * overlap))


def _check_state_symbol(m: Symbol) -> None:
    values = m.values
    if np.any(np.abs(values.imag) > 0) or np.any(values.real < 0):
        raise InvalidSymbolError("state symbols must be real and nonnegative")
    if not np.any(values.real > 0):
        raise InvalidSymbolError("state symbols need a nonzero integral")


def _unit_trace(M: LinearOperator) -> LinearOperator:
    return LinearOperator(M.entries / trace(M).real)


def _certified(M: LinearOperator, check: bool, label: str) -> DensityOperator:
    state = DensityOperator.certify(M)
    if check and not state.valid:
        raise ConsistencyError(f"{label} is not a density operator: {state.diagnostics}")
    return state


def density_from_frames(
    m1: Symbol, F1: Frame, m2: Symbol, F2: Frame, check: bool = True
) -> SeparableState:
    """
    Separable state M_{m1⊗m2, F1⊗F2, F1⊗F2} for arbitrary frame factors.

    Each symbol is rescaled so its factor multiplier has trace one, and the
    final operator is divided by its computed trace.

    :param m1: Nonnegative symbol on F1.space.
    :param F1: Left frame.
    :param m2: Nonnegative symbol on F2.space.
    :param F2: Right frame.
    :param check: Raise ConsistencyError if a state or reduction check fails.
    :return: SeparableState(rho, left, right).
    """
    _check_state_symbol(m1)
    _check_state_symbol(m2)
    m1 = m1.scaled(1.0 / trace(multiplier(m1, F1, F1)).real)
    m2 = m2.scaled(1.0 / trace(multiplier(m2, F2, F2)).real)
    left = _unit_trace(multiplier(m1, F1, F1))
    right = _unit_trace(multiplier(m2, F2, F2))

    F = tensor_frame(F1, F2)
    rho = _unit_trace(multiplier(tensor_symbol(m1, m2), F, F))

    dims = (F1.dim, F2.dim)
    for reduced, expected, side in (
        (partial_trace(rho, dims, Subsystem.RIGHT), left, "left"),
        (partial_trace(rho, dims, Subsystem.LEFT), right, "right"),
    ):
        defect = float(np.max(np.abs(reduced.entries - expected.entries)))
        logger.debug("reduced %s operator defect %.3e", side, defect)
        if check and defect > DENSITY_TOL:
            raise ConsistencyError(f"reduced {side} operator differs by {defect:.3e}")

    return SeparableState(
        rho=_certified(rho, check, "rho"),
        left=_certified(left, check, "left reduction"),
        right=_certified(right, check, "right reduction"),
    )


def separable_density(
    m1: Symbol, m2: Symbol, phi1, phi2, weight: float = 1.0, check: bool = True
) -> SeparableState:
    """
    Separable state from two Gabor factors with windows phi1, phi2.

    Symbols are first normalized so that int m_j = 1 / ||phi_j||^2.
    """
    phi1 = np.asarray(phi1, dtype=complex)
    phi2 = np.asarray(phi2, dtype=complex)
    _check_state_symbol(m1)
    _check_state_symbol(m2)
    F1 = gabor_frame(phi1, weight).frame
    F2 = gabor_frame(phi2, weight).frame
    return density_from_frames(
        normalize_symbol(m1, phi1, phi1),
        F1,
        normalize_symbol(m2, phi2, phi2),
        F2,
        check=check,
    )


def purity(rho: DensityOperator | LinearOperator) -> float:
    """Tr(rho^2); 1 exactly for pure states, 1/n for the maximally mixed one."""
    matrix = rho.matrix if isinstance(rho, DensityOperator) else rho.entries
    return float(np.trace(matrix @ matrix).real)


def density_report(state: SeparableState) -> dict:
    """JSON-ready summary of a separable state."""

    def _summary(op: DensityOperator) -> dict:
        return {
            "trace": float(op.diagnostics["trace"].real),
            "min_eig": op.diagnostics["min_eig"],
            "purity": purity(op),
        }

    return {**_summary(state.rho), "reduced_left": _summary(state.left), "reduced_right": _summary(state.right)}
