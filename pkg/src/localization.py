"""
Gabor, wavelet and mixed systems and the localization operators they define.

Gabor systems live on the cyclic group Z_N: atom (k, l) carries the
time-frequency shift e^{2 pi i l t / N} g[t - k] with weight 1, which
makes them exactly tight with bound N ||g||^2.

Wavelet systems sample band-limited periodic atoms a^{-1/2} g((t dt - b) / a)
on N points of spacing dt. Each column is synthesized from the analytic
spectrum of the window, translations are equispaced on the circle of
length N dt and scales carry the Haar weight db d(ln a) / a. Such a
system is only approximately tight; its empirical constant and deviation
from tightness are measured and stored on the system.
"""

import logging
import re
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from src.domain_model import (
    CoefficientFunction,
    DimensionMismatchError,
    Frame,
    FrameToolkitError,
    InadmissibleWindowError,
    LinearOperator,
    MeasureSpace,
    Symbol,
    TensorFrame,
)
from src.frames import analysis, frame_operator
from src.multiplier import multiplier
from src.tensor import tensor_frame

logger = logging.getLogger(__name__)

ZERO_FREQUENCY_EPS = 1e-8
TIGHTNESS_BUDGET = 5e-2

_BANDLIMITED = re.compile(r"^bandlimited\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)$")


# ─────────────────────────────────────────────
# WINDOWS
# ─────────────────────────────────────────────


def _parse_bandlimited(name: str) -> Optional[tuple[float, float]]:
    match = _BANDLIMITED.match(name)
    if match is None:
        return None
    lo, hi = float(match.group(1)), float(match.group(2))
    if not 0 < lo < hi:
        raise InadmissibleWindowError(f"bandlimited window needs 0 < lo < hi, got {name}")
    return lo, hi


def window(name: str, N: int) -> np.ndarray:
    """
    Unit-norm window preset on Z_N.

    :param name: "delta", "gauss", "mexican-hat" or "bandlimited(lo,hi)"
        (integer frequency band lo <= |nu| <= hi).
    :param N: Signal length.
    :return: Complex window of length N.
    """
    t = np.arange(N)
    distance = np.minimum(t, N - t).astype(float)
    if name == "delta":
        g = (t == 0).astype(complex)
    elif name == "gauss":
        g = np.exp(-np.pi * distance**2 / N).astype(complex)
    elif name == "mexican-hat":
        x = distance * np.sqrt(2 * np.pi / N)
        g = ((1 - x**2) * np.exp(-(x**2) / 2)).astype(complex)
    elif (band := _parse_bandlimited(name)) is not None:
        nu = np.abs(np.fft.fftfreq(N, d=1.0 / N))
        g = np.fft.ifft(((nu >= band[0]) & (nu <= band[1])).astype(complex))
    else:
        raise InadmissibleWindowError(f"unknown window preset '{name}'")
    norm = np.linalg.norm(g)
    if norm == 0:
        raise InadmissibleWindowError(f"window '{name}' vanishes for N={N}")
    return g / norm


@dataclass(frozen=True)
class WaveletWindow:
    """
    Even real wavelet profile with its analytic spectrum.

    ``constant`` is the one-sided admissibility integral
    int_0^inf |g^(w)|^2 dw / w.
    """

    name: str
    profile: Callable[[np.ndarray], np.ndarray]
    spectrum: Callable[[np.ndarray], np.ndarray]
    constant: float


def _mexican_hat() -> WaveletWindow:
    return WaveletWindow(
        name="mexican-hat",
        profile=lambda t: (1 - t**2) * np.exp(-(t**2) / 2),
        spectrum=lambda w: np.sqrt(2 * np.pi) * (2 * np.pi * w) ** 2 * np.exp(-2 * np.pi**2 * w**2),
        constant=np.pi,
    )


def _bandlimited(lo: float, hi: float) -> WaveletWindow:
    return WaveletWindow(
        name=f"bandlimited({lo:g},{hi:g})",
        profile=lambda t: 2 * hi * np.sinc(2 * hi * t) - 2 * lo * np.sinc(2 * lo * t),
        spectrum=lambda w: ((np.abs(w) >= lo) & (np.abs(w) <= hi)).astype(float),
        constant=float(np.log(hi / lo)),
    )


def wavelet_window(name: str) -> WaveletWindow:
    """
    Admissible wavelet preset by name: "mexican-hat" or "bandlimited(lo,hi)".
    """
    if name == "mexican-hat":
        return _mexican_hat()
    if (band := _parse_bandlimited(name)) is not None:
        return _bandlimited(*band)
    if name in ("delta", "gauss"):
        raise InadmissibleWindowError(f"'{name}' has zero-frequency mass and is not a wavelet")
    raise InadmissibleWindowError(f"unknown wavelet preset '{name}'")


# ─────────────────────────────────────────────
# ADMISSIBILITY
# ─────────────────────────────────────────────


def _check_zero_frequency(spectrum: np.ndarray, freqs: np.ndarray) -> None:
    energy = float(np.sum(np.abs(spectrum) ** 2))
    if energy == 0:
        raise InadmissibleWindowError("window spectrum vanishes")
    zero = freqs == 0
    if np.any(zero) and float(np.max(np.abs(spectrum[zero]) ** 2)) >= ZERO_FREQUENCY_EPS * energy:
        raise InadmissibleWindowError("window has zero-frequency mass")


def _half_line(first: np.ndarray, second: np.ndarray, freqs: np.ndarray, sign: int) -> complex:
    mask = sign * freqs > 0
    if np.count_nonzero(mask) < 2:
        return 0j
    omega = np.abs(freqs[mask])
    order = np.argsort(omega)
    integrand = np.conj(first[mask]) * second[mask] / omega
    return complex(trapezoid(integrand[order], omega[order]))


def _spectra(freqs, *spectra) -> tuple[np.ndarray, ...]:
    freqs = np.asarray(freqs, dtype=float)
    arrays = tuple(np.asarray(s, dtype=complex) for s in spectra)
    if freqs.ndim != 1 or any(s.shape != freqs.shape for s in arrays):
        raise DimensionMismatchError("spectrum and frequency grid must be equal-length vectors")
    return (freqs, *arrays)


def admissibility(spectrum, freqs) -> float:
    """
    Quadrature of int |g^(w)|^2 / |w| dw over the supplied frequency grid.

    The zero bin is dropped and each half-line is integrated with the
    trapezoidal rule. A grid of nonnegative frequencies yields the
    one-sided constant.

    :param spectrum: Sampled spectrum g^(w).
    :param freqs: Frequency grid.
    :return: The admissibility constant C_g.
    """
    freqs, spectrum = _spectra(freqs, spectrum)
    _check_zero_frequency(spectrum, freqs)
    value = _half_line(spectrum, spectrum, freqs, 1) + _half_line(spectrum, spectrum, freqs, -1)
    return float(value.real)


def cross_admissibility(spectrum1, spectrum2, freqs) -> complex:
    """
    C_{g1,g2} = int_0^inf conj(g1^(s w)) g2^(s w) ds / s in one dimension.

    The directions w = +1 and w = -1 are averaged when the grid holds
    negative frequencies; otherwise the positive direction is returned.
    """
    freqs, first, second = _spectra(freqs, spectrum1, spectrum2)
    _check_zero_frequency(first, freqs)
    _check_zero_frequency(second, freqs)
    positive = _half_line(first, second, freqs, 1)
    if not np.any(freqs < 0):
        return positive
    return (positive + _half_line(first, second, freqs, -1)) / 2


# ─────────────────────────────────────────────
# GABOR SYSTEMS
# ─────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class GaborSystem:
    window: np.ndarray
    weight: float
    frame: Frame

    @property
    def N(self) -> int:
        return int(self.window.size)

    @property
    def bound(self) -> float:
        return self.weight * self.N * float(np.vdot(self.window, self.window).real)


def gabor_grid(N: int, weight: float = 1.0) -> MeasureSpace:
    """The N x N time-frequency grid; atom (k, l) sits at index k * N + l."""
    k, l = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    points = np.stack([k, l], axis=-1).reshape(-1, 2)
    return MeasureSpace(points=points, weights=np.full(N * N, float(weight)))


def _shifts(g: np.ndarray) -> np.ndarray:
    return np.stack([np.roll(g, k) for k in range(g.size)])


def gabor_frame(g, weight: float = 1.0, parseval: bool = False) -> GaborSystem:
    """
    Gabor system {M_l T_k g} on Z_N.

    :param g: Nonzero window of length N.
    :param weight: Mass of every grid atom.
    :param parseval: Replace ``weight`` by 1 / (N ||g||^2).
    :return: GaborSystem with bound weight * N ||g||^2.
    """
    g = np.asarray(g, dtype=complex)
    if g.ndim != 1 or not np.any(g):
        raise InadmissibleWindowError("Gabor window must be a nonzero vector")
    N = g.size
    if parseval:
        weight = 1.0 / (N * float(np.vdot(g, g).real))
    t = np.arange(N)
    modulations = np.exp(2j * np.pi * np.outer(t, t) / N)
    atoms = _shifts(g)[:, None, :] * modulations[None, :, :]
    frame = Frame(gabor_grid(N, weight), atoms.reshape(N * N, N).T)
    return GaborSystem(window=g, weight=float(weight), frame=frame)


def stft(f, g, method: str = "fft", weight: float = 1.0) -> CoefficientFunction:
    """
    Short-time Fourier transform V_g f(k, l) = <f, M_l T_k g> on Z_N.

    :param f: Signal of length N.
    :param g: Window of length N.
    :param method: "fft" (one FFT per shift) or "direct" (frame analysis).
    :param weight: Atom mass of the returned grid.
    :return: Coefficients on the N x N grid.
    """
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if f.ndim != 1 or f.shape != g.shape:
        raise DimensionMismatchError(f"signal of length {f.size} with window of length {g.size}")
    if method == "direct":
        return analysis(gabor_frame(g, weight).frame, f)
    if method != "fft":
        raise FrameToolkitError(f"unknown STFT method '{method}'")
    values = np.fft.fft(f[None, :] * np.conj(_shifts(g)), axis=1)
    return CoefficientFunction(gabor_grid(f.size, weight), values.reshape(-1))


def spectrogram(f, g) -> np.ndarray:
    """|V_g f|^2 as an N x N grid, rows are shifts and columns frequencies."""
    N = np.asarray(f).size
    return (np.abs(stft(f, g).values) ** 2).reshape(N, N)


def rectangle_mask(N: int, times: range, frequencies: range) -> np.ndarray:
    """Flattened indicator of a time-frequency rectangle on the N x N grid."""
    mask = np.zeros((N, N))
    mask[np.ix_(list(times), list(frequencies))] = 1.0
    return mask.reshape(-1)


# ─────────────────────────────────────────────
# WAVELET SYSTEMS
# ─────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class WaveletSystem:
    window: WaveletWindow
    scales: np.ndarray
    translations: int
    dt: float
    mirror: bool
    frame: Frame
    tight_constant: float
    deviation: float

    @property
    def N(self) -> int:
        return self.frame.dim

    @property
    def expected_constant(self) -> float:
        """Continuum tight constant C_{g,g} / dt, doubled with mirrored scales."""
        return self.window.constant / self.dt * (2 if self.mirror else 1)

    @property
    def is_tight(self) -> bool:
        return self.deviation <= TIGHTNESS_BUDGET


def log_scales(lo: float, hi: float, count: int) -> np.ndarray:
    if not 0 < lo <= hi or count < 1:
        raise FrameToolkitError(f"degenerate scale range [{lo}, {hi}] with {count} scales")
    return np.geomspace(lo, hi, count)


def _log_trapezoid_weights(scales: np.ndarray) -> np.ndarray:
    if scales.size == 1:
        return np.ones(1)
    log_a = np.log(scales)
    steps = np.diff(log_a)
    weights = np.zeros_like(log_a)
    weights[:-1] += steps / 2
    weights[1:] += steps / 2
    return weights


def wavelet_frame(
    g: WaveletWindow | str,
    scales,
    translations: int,
    N: int,
    dt: float = 0.625,
    mirror: bool = False,
    parallel: bool = False,
) -> WaveletSystem:
    """
    Discretized wavelet system with Haar weights.

    Atom (b_m, a_j) sits at index m * J + j with b_m = m N dt / M and
    weight (N dt / M) * d(ln a)_j / a_j, where d(ln a) is the trapezoid
    weight of the log-scale grid (1 for a single scale).

    :param g: Wavelet preset or its name.
    :param scales: Strictly increasing positive scales.
    :param translations: Number M of equispaced translations.
    :param N: Number of samples.
    :param dt: Sample spacing.
    :param mirror: Also include the negative scales -a_j.
    :param parallel: Opt into parallel frame-operator accumulation.
    :return: WaveletSystem with its measured tight constant and deviation.
    """
    if isinstance(g, str):
        g = wavelet_window(g)
    if abs(complex(g.spectrum(np.zeros(1))[0])) > 0 or g.constant <= 0:
        raise InadmissibleWindowError(f"wavelet '{g.name}' is not admissible")
    scales = np.asarray(scales, dtype=float).reshape(-1)
    if scales.size == 0 or np.any(scales <= 0) or np.any(np.diff(scales) <= 0):
        raise FrameToolkitError("scale grid must be non-empty, positive and increasing")
    if translations < 1 or N < 2 or dt <= 0:
        raise FrameToolkitError(f"degenerate grid: M={translations}, N={N}, dt={dt}")

    log_weights = _log_trapezoid_weights(scales)
    if mirror:
        scales = np.concatenate([scales, -scales])
        log_weights = np.concatenate([log_weights, log_weights])
    step = N * dt / translations
    shifts = np.arange(translations) * step
    freqs = np.fft.fftfreq(N, d=dt)

    dilated = np.sqrt(np.abs(scales))[None, :] * g.spectrum(np.outer(freqs, scales))
    phases = np.exp(-2j * np.pi * np.outer(freqs, shifts))
    columns = np.fft.ifft(phases[:, :, None] * dilated[:, None, :], axis=0) / dt
    vectors = columns.reshape(N, -1)

    J = scales.size
    points = np.column_stack([np.repeat(shifts, J), np.tile(scales, translations)])
    weights = np.tile(step * log_weights / np.abs(scales), translations)
    frame = Frame(MeasureSpace(points=points, weights=weights), vectors)

    S = frame_operator(frame, parallel=parallel).entries
    constant = float(np.trace(S).real) / N
    deviation = float(np.max(np.abs(S / constant - np.eye(N))))
    logger.debug("wavelet system J=%d M=%d N=%d: c=%.6g, deviation=%.3e", J, translations, N, constant, deviation)
    if deviation > TIGHTNESS_BUDGET:
        logger.warning("wavelet system deviates from tightness by %.3e", deviation)
    return WaveletSystem(
        window=g,
        scales=scales,
        translations=translations,
        dt=float(dt),
        mirror=mirror,
        frame=frame,
        tight_constant=constant,
        deviation=deviation,
    )


# ─────────────────────────────────────────────
# MIXED SYSTEMS
# ─────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class MixedSystem:
    gabor: GaborSystem
    wavelet: WaveletSystem
    frame: TensorFrame


def mixed_system(gabor: GaborSystem, wavelet: WaveletSystem) -> MixedSystem:
    return MixedSystem(gabor=gabor, wavelet=wavelet, frame=tensor_frame(gabor.frame, wavelet.frame))


# ─────────────────────────────────────────────
# LOCALIZATION OPERATORS
# ─────────────────────────────────────────────


def _pair(windows: Sequence) -> tuple:
    windows = tuple(windows)
    if len(windows) != 2:
        raise DimensionMismatchError(f"expected a pair of windows, got {len(windows)}")
    return windows


def localize_stft(
    m: Symbol, phi: Sequence, psi: Sequence | None = None, weight: float = 1.0
) -> LinearOperator:
    """
    Bilinear STFT localization operator M_{m, pi phi1 ⊗ pi phi2, pi psi1 ⊗ pi psi2}.

    :param m: Symbol on the product of the two N x N grids.
    :param phi: Analysis windows (phi1, phi2).
    :param psi: Synthesis windows, ``phi`` when omitted.
    :param weight: Grid atom mass of both factors.
    """
    phi = _pair(phi)
    psi = phi if psi is None else _pair(psi)
    F = tensor_frame(gabor_frame(phi[0], weight).frame, gabor_frame(phi[1], weight).frame)
    G = tensor_frame(gabor_frame(psi[0], weight).frame, gabor_frame(psi[1], weight).frame)
    return multiplier(m, F, G)


def localize_wavelet(m: Symbol, phi: Sequence, psi: Sequence | None = None) -> LinearOperator:
    """Bilinear wavelet localization operator over two wavelet systems."""
    phi = _pair(phi)
    psi = phi if psi is None else _pair(psi)
    F = tensor_frame(phi[0].frame, phi[1].frame)
    G = tensor_frame(psi[0].frame, psi[1].frame)
    return multiplier(m, F, G)


def localize_mixed(m: Symbol, phi: GaborSystem, psi: WaveletSystem) -> LinearOperator:
    """Mixed STFT / wavelet localization operator M_{m,F,F} with F = pi phi ⊗ pi_aff psi."""
    F = mixed_system(phi, psi).frame
    return multiplier(m, F, F)
