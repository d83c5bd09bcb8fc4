"""
Named experiments. Each takes resolved parameters and a seeded generator
and returns an ExperimentOutcome of check records.
"""

import logging

import numpy as np

from src.domain_model import (
    CoefficientFunction,
    Frame,
    LinearOperator,
    MeasureSpace,
    NotRedundantError,
    Symbol,
    TensorVector,
)
from src.experiment_model import (
    ExperimentOutcome,
    check_at_most,
    check_close,
    check_true,
)
from src.frames import (
    FRAME_EPS,
    analysis,
    canonical_dual,
    cross_frame_operator,
    dual_from_bessel,
    dual_space_dimension,
    frame_bounds,
    frame_from_columns,
    frame_operator,
    is_dual_pair,
    mercedes_frame,
    orthonormal_basis,
    random_family,
    random_frame,
    synthesis,
)
from src.localization import (
    admissibility,
    cross_admissibility,
    gabor_frame,
    gabor_grid,
    localize_mixed,
    localize_stft,
    localize_wavelet,
    log_scales,
    rectangle_mask,
    spectrogram,
    stft,
    window,
    wavelet_frame,
    wavelet_window,
)
from src.measure import product
from src.multiplier import (
    kron_factorization_defect,
    multiplier,
    multiplier_partial_trace,
    norm_bound_check,
    partial_trace,
    schatten_bound,
    schatten_norm,
    trace,
)
from src.quantum import density_report, is_admissible, purity, separable_density, trace_formula
from src.tensor import (
    bound_constants,
    column_ranks,
    kron_vec,
    nonsimple_dual,
    schmidt,
    tensor_frame,
    tensor_symbol,
)

logger = logging.getLogger(__name__)


def rel_err(computed, expected) -> float:
    computed = np.asarray(computed, dtype=complex)
    expected = np.asarray(expected, dtype=complex)
    scale = max(float(np.max(np.abs(expected))), np.finfo(float).tiny)
    return float(np.max(np.abs(computed - expected))) / scale


def _complex(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _dims(rng: np.random.Generator, max_dim: int, max_atoms: int) -> tuple[int, int]:
    n = int(rng.integers(1, max_dim + 1))
    return n, int(rng.integers(n, max(n, max_atoms) + 1))


# ─────────────────────────────────────────────
# FRAME BOUNDS
# ─────────────────────────────────────────────


def frame_bounds_experiment(params: dict, rng: np.random.Generator) -> ExperimentOutcome:
    outcome = ExperimentOutcome()
    records = outcome.records

    records.append(check_close("onb-parseval", list(frame_bounds(orthonormal_basis(3))), [1.0, 1.0], 1e-12))
    mercedes = mercedes_frame()
    records.append(check_close("mercedes-tight", list(frame_bounds(mercedes)), [1.5, 1.5], 1e-12))
    degenerate = frame_bounds(frame_from_columns([[1, 0], [1, 0]]))
    records.append(check_true("repeated-vector-not-a-frame", not degenerate.is_frame, list(degenerate)))

    sandwich_violations = 0
    inverse_error = quadratic_error = adjoint_error = 0.0
    for _ in range(params["instances"]):
        n, K = _dims(rng, params["max_dim"], params["max_atoms"])
        F = random_frame(rng, n, K, random_weights=True)
        A, B = frame_bounds(F)
        S = frame_operator(F).entries
        for _ in range(params["vectors_per_instance"]):
            f = _complex(rng, n)
            energy = float(np.sum(F.space.weights * np.abs(analysis(F, f).values) ** 2))
            norm2 = float(np.vdot(f, f).real)
            if not A * norm2 * (1 - 1e-10) <= energy <= B * norm2 * (1 + 1e-10):
                sandwich_violations += 1
            quadratic_error = max(quadratic_error, abs(np.vdot(f, S @ f) - energy) / energy)
            c = _complex(rng, K)
            lhs = np.vdot(f, synthesis(F, CoefficientFunction(F.space, c)))
            rhs = np.sum(F.space.weights * c * np.conj(analysis(F, f).values))
            adjoint_error = max(adjoint_error, abs(lhs - rhs) / max(abs(rhs), 1e-300))
        dual_bounds = frame_bounds(canonical_dual(F))
        inverse_error = max(inverse_error, rel_err(list(dual_bounds), [1 / B, 1 / A]))

    records.append(check_at_most("bound-sandwich-violations", sandwich_violations, 0))
    records.append(check_at_most("quadratic-form-identity", quadratic_error, 1e-12))
    records.append(check_at_most("adjoint-relation", adjoint_error, 1e-12))
    records.append(check_at_most("inverse-bounds", inverse_error, 1e-10))
    outcome.payloads["mercedes-frame-operator"] = frame_operator(mercedes).entries
    return outcome


# ─────────────────────────────────────────────
# TENSOR CONSISTENCY
# ─────────────────────────────────────────────


def tensor_check_experiment(params: dict, rng: np.random.Generator) -> ExperimentOutcome:
    outcome = ExperimentOutcome()
    bound_error = factorization_error = constant_error = dual_error = analysis_error = 0.0
    schmidt_error = 0.0

    for _ in range(params["instances"]):
        if params["dims"]:
            n1, n2 = params["dims"]
            K1, K2 = params["atoms"] or (n1 + 1, n2 + 1)
        else:
            n1, K1 = _dims(rng, params["max_dim"], params["max_atoms"])
            n2, K2 = _dims(rng, params["max_dim"], params["max_atoms"])
        F1 = random_frame(rng, n1, K1, random_weights=True)
        F2 = random_frame(rng, n2, K2, random_weights=True)
        F = tensor_frame(F1, F2)

        (A1, B1), (A2, B2), (A, B) = frame_bounds(F1), frame_bounds(F2), frame_bounds(F)
        bound_error = max(bound_error, abs(A - A1 * A2) / (A1 * A2), abs(B - B1 * B2) / (B1 * B2))

        kron = np.kron(frame_operator(F1).entries, frame_operator(F2).entries)
        factorization_error = max(factorization_error, rel_err(frame_operator(F).entries, kron))

        C2, D2 = bound_constants(F2)
        constant_error = max(constant_error, abs(A / C2 - A1) / A1, abs(B / D2 - B1) / B1)

        expected_dual = tensor_frame(canonical_dual(F1), canonical_dual(F2)).vectors
        dual_error = max(dual_error, rel_err(canonical_dual(F).vectors, expected_dual))

        f1, f2 = _complex(rng, n1), _complex(rng, n2)
        coefficients = analysis(F, kron_vec(f1, f2).entries).values
        expected = np.kron(analysis(F1, f1).values, analysis(F2, f2).values)
        analysis_error = max(analysis_error, rel_err(coefficients, expected))

        x = TensorVector((n1, n2), _complex(rng, n1 * n2))
        decomposition = schmidt(x)
        schmidt_error = max(
            schmidt_error,
            rel_err(decomposition.reconstruct(), x.entries),
            abs(np.sum(decomposition.coefficients**2) - x.norm**2) / x.norm**2,
        )

    outcome.records += [
        check_at_most("bound-multiplication", bound_error, 1e-10),
        check_at_most("frame-operator-factorization", factorization_error, 1e-12),
        check_at_most("bound-constant-formulas", constant_error, 1e-10),
        check_at_most("canonical-dual-factorization", dual_error, 1e-10),
        check_at_most("analysis-factorization", analysis_error, 1e-12),
        check_at_most("schmidt-reconstruction", schmidt_error, 1e-12),
    ]
    return outcome


# ─────────────────────────────────────────────
# DUAL FRAMES
# ─────────────────────────────────────────────


def _brute_force_dual_dimension(F: Frame) -> int:
    n, K = F.dim, F.size
    coupling = F.space.weights[:, None] * F.vectors.conj().T
    system = np.kron(coupling.T, np.eye(n))
    return n * K - int(np.linalg.matrix_rank(system, rtol=FRAME_EPS))


def _parameterization_images(F: Frame) -> tuple[int, float]:
    n, K = F.dim, F.size
    gram = canonical_dual(F).vectors.T @ F.vectors.conj()
    projector = np.eye(K) - F.space.weights[:, None] * gram.T
    images = []
    for a in range(n):
        for j in range(K):
            theta = np.zeros((n, K), dtype=complex)
            theta[a, j] = 1.0
            images.append((theta @ projector).reshape(-1, order="F"))
    images = np.array(images).T
    coupling = F.space.weights[:, None] * F.vectors.conj().T
    leak = float(np.max(np.abs(np.kron(coupling.T, np.eye(n)) @ images)))
    return int(np.linalg.matrix_rank(images, rtol=FRAME_EPS)), leak


def duals_experiment(params: dict, rng: np.random.Generator) -> ExperimentOutcome:
    outcome = ExperimentOutcome()
    records = outcome.records

    example = frame_from_columns([[1, 0], [0, 1], [1, 0]])
    canonical = canonical_dual(example)
    records.append(
        check_close("canonical-dual-example", canonical.vectors.T, [[0.5, 0], [0, 1], [0.5, 0]], 1e-12)
    )
    zero = Frame(example.space, np.zeros((2, 3)))
    records.append(check_close("zero-theta-gives-canonical", dual_from_bessel(example, zero).vectors, canonical.vectors, 1e-12))
    records.append(check_close("canonical-theta-fixed", dual_from_bessel(example, canonical).vectors, canonical.vectors, 1e-12))
    theta = Frame(example.space, np.array([[1, 0, -1], [0, 0, 0]]))
    records.append(
        check_close("hand-example", dual_from_bessel(example, theta).vectors.T, [[1.5, 0], [0, 1], [-0.5, 0]], 1e-12)
    )

    identity_error = 0.0
    leak_max = 0.0
    for n in range(1, params["max_dim"] + 1):
        for K in range(n + 1, params["max_atoms"] + 1):
            F = random_frame(rng, n, K, random_weights=True)
            thetas = [Frame(F.space, np.zeros((n, K))), canonical_dual(F)]
            thetas += [random_family(rng, F.space, n) for _ in range(params["bessel_samples"])]
            for theta in thetas:
                G = dual_from_bessel(F, theta)
                defect = cross_frame_operator(F, G).entries - np.eye(n)
                identity_error = max(identity_error, float(np.max(np.abs(defect))))
            span, leak = _parameterization_images(F)
            leak_max = max(leak_max, leak)
            expected = n * (K - n)
            records.append(
                check_close(
                    f"dual-space-dimension n={n} K={K}",
                    [_brute_force_dual_dimension(F), dual_space_dimension(F), span],
                    [expected] * 3,
                    0.0,
                )
            )
    records.append(check_at_most("dual-identity", identity_error, 1e-10))
    records.append(check_at_most("parameterization-inside-solution-space", leak_max, 1e-10))

    F = tensor_frame(example, example)
    dual = nonsimple_dual(F, seed=params["candidate_seed"])
    records.append(check_true("nonsimple-dual-is-dual", is_dual_pair(F, dual)))
    records.append(check_true("nonsimple-dual-has-entangled-column", max(column_ranks(dual)) >= 2, max(column_ranks(dual))))
    onb = orthonormal_basis(2)
    try:
        nonsimple_dual(tensor_frame(onb, onb))
        rejected = False
    except NotRedundantError:
        rejected = True
    records.append(check_true("non-redundant-rejected", rejected))
    return outcome


# ─────────────────────────────────────────────
# MULTIPLIERS
# ─────────────────────────────────────────────


def _random_instance(rng: np.random.Generator, max_dim: int, max_atoms: int):
    n, K = _dims(rng, max_dim, max_atoms)
    space = MeasureSpace(np.arange(K, dtype=float), rng.uniform(0.5, 2.0, K))
    return Symbol(space, _complex(rng, K)), random_family(rng, space, n), random_family(rng, space, n)


def multiplier_experiment(params: dict, rng: np.random.Generator) -> ExperimentOutcome:
    outcome = ExperimentOutcome()
    records = outcome.records

    example = frame_from_columns([[1, 0], [0, 1], [1, 0]])
    M = multiplier(Symbol(example.space, [2, 0, 1]), example, example)
    records.append(check_close("hand-example", M.entries, np.diag([3.0, 0.0]), 1e-12))
    outcome.payloads["example-multiplier"] = M.entries

    norm_violations = 0
    schatten_violations = {p: 0 for p in params["p_values"]}
    for _ in range(params["instances"]):
        m, F, G = _random_instance(rng, params["max_dim"], params["max_atoms"])
        if not norm_bound_check(m, F, G, check=False).holds:
            norm_violations += 1
        for p in params["p_values"]:
            if not schatten_bound(m, F, G, p, check=False).within_bound:
                schatten_violations[p] += 1
    records.append(check_at_most("operator-norm-bound-violations", norm_violations, 0))
    for p, count in schatten_violations.items():
        records.append(check_at_most(f"schatten-bound-violations p={p:g}", count, 0))

    adjoint_error = positivity_error = square_root_error = monotone_violations = 0.0
    for _ in range(params["adjoint_instances"]):
        m, F, G = _random_instance(rng, params["max_dim"], params["max_atoms"])
        lhs = multiplier(m, F, G).adjoint().entries
        adjoint_error = max(adjoint_error, rel_err(lhs, multiplier(m.conj(), G, F).entries))

        positive = Symbol(m.space, rng.uniform(0.1, 2.0, m.space.size))
        P = multiplier(positive, F, F).entries
        eigenvalues = np.linalg.eigvalsh((P + P.conj().T) / 2)
        positivity_error = max(positivity_error, max(0.0, -eigenvalues[0]) / eigenvalues[-1])
        rooted = Frame(F.space, F.vectors * np.sqrt(positive.values.real))
        square_root_error = max(square_root_error, rel_err(frame_operator(rooted).entries, P))

        norms = [schatten_norm(LinearOperator(P), p).norm for p in (1, 1.5, 2, 3, np.inf)]
        if any(b > a * (1 + 1e-12) for a, b in zip(norms, norms[1:])):
            monotone_violations += 1
    records += [
        check_at_most("adjoint-identity", adjoint_error, 1e-12),
        check_at_most("positivity", positivity_error, 1e-12),
        check_at_most("frame-operator-of-root-symbol", square_root_error, 1e-12),
        check_at_most("schatten-monotonicity-violations", monotone_violations, 0),
    ]

    product_error = trace_error = 0.0
    for _ in range(params["trace_instances"]):
        n1, n2 = (int(v) for v in rng.integers(1, 4, 2))
        A1, A2 = _complex(rng, n1, n1), _complex(rng, n2, n2)
        full = LinearOperator(np.kron(A1, A2))
        product_error = max(
            product_error,
            rel_err(partial_trace(full, (n1, n2), "right").entries, A1 * np.trace(A2)),
            rel_err(partial_trace(full, (n1, n2), "left").entries, A2 * np.trace(A1)),
        )
        T = LinearOperator(_complex(rng, n1 * n2, n1 * n2))
        for over in ("left", "right"):
            reduced = trace(partial_trace(T, (n1, n2), over))
            trace_error = max(trace_error, abs(reduced - trace(T)) / max(1.0, abs(trace(T))))
    records += [
        check_at_most("partial-trace-of-products", product_error, 1e-12),
        check_at_most("partial-trace-preserves-trace", trace_error, 1e-12),
    ]

    factor_error = reduction_error = 0.0
    for _ in range(params["tensor_instances"]):
        m1, F1, G1 = _random_instance(rng, 3, 4)
        m2, F2, G2 = _random_instance(rng, 3, 4)
        factor_error = max(factor_error, kron_factorization_defect(m1, F1, G1, m2, F2, G2))
        unit = m2.scaled(1.0 / trace(multiplier(m2, F2, G2)))
        reduced = multiplier_partial_trace(m1, F1, G1, unit, F2, G2, check=False)
        reduction_error = max(reduction_error, rel_err(reduced.entries, multiplier(m1, F1, G1).entries))
    records += [
        check_at_most("tensor-multiplier-factorization", factor_error, 1e-12),
        check_at_most("unit-trace-partial-trace-of-multipliers", reduction_error, 1e-10),
    ]
    return outcome


# ─────────────────────────────────────────────
# GABOR SYSTEMS
# ─────────────────────────────────────────────


def gabor_experiment(params: dict, rng: np.random.Generator) -> ExperimentOutcome:
    outcome = ExperimentOutcome()
    records = outcome.records

    tightness_error = 0.0
    presets = ["delta", "gauss", "mexican-hat"]
    for N in params["sizes"]:
        windows = [window(name, N) for name in presets]
        while len(windows) < params["windows_per_size"]:
            windows.append(_complex(rng, N))
        for g in windows[: params["windows_per_size"]]:
            system = gabor_frame(g)
            tightness_error = max(tightness_error, rel_err(list(frame_bounds(system.frame)), [system.bound] * 2))
    records.append(check_at_most("gabor-tightness", tightness_error, 1e-10))

    energy_error = fft_error = 0.0
    for index in range(params["signal_pairs"]):
        N = params["sizes"][index % len(params["sizes"])]
        f1, f2, g = _complex(rng, N), _complex(rng, N), _complex(rng, N)
        V1, V2 = stft(f1, g).values, stft(f2, g).values
        expected = N * np.vdot(f2, f1) * np.vdot(g, g).real
        scale = N * np.linalg.norm(f1) * np.linalg.norm(f2) * np.vdot(g, g).real
        energy_error = max(energy_error, abs(np.sum(V1 * np.conj(V2)) - expected) / scale)
        fft_error = max(fft_error, rel_err(V1, stft(f1, g, method="direct").values))
    records.append(check_at_most("stft-orthogonality", energy_error, 1e-12))
    records.append(check_at_most("stft-fft-matches-direct", fft_error, 1e-12))

    small = params["localization_size"]
    phi1, phi2 = window("gauss", small), window("delta", small)
    tensor = tensor_frame(gabor_frame(phi1).frame, gabor_frame(phi2).frame)
    expected_bound = small**2 * np.vdot(phi1, phi1).real * np.vdot(phi2, phi2).real
    records.append(check_close("gabor-tensor-tightness", list(frame_bounds(tensor)), [expected_bound] * 2, 1e-10, relative=True))

    space = product(gabor_grid(small), gabor_grid(small))
    mask = rectangle_mask(small, range(small // 2), range(small // 2))
    m = Symbol(space, np.kron(mask, mask))
    L = localize_stft(m, (phi1, phi2)).entries
    eigenvalues = np.linalg.eigvalsh((L + L.conj().T) / 2)
    records.append(check_true("localization-hermitian", rel_err(L, L.conj().T) <= 1e-12))
    records.append(
        check_true(
            "localization-spectrum-in-range",
            eigenvalues[0] >= -1e-10 * eigenvalues[-1] and eigenvalues[-1] <= m.sup_norm * expected_bound * (1 + 1e-10),
            [float(eigenvalues[0]), float(eigenvalues[-1])],
        )
    )
    report = schatten_bound(m, tensor, tensor, 2, check=False)
    records.append(check_true("localization-schatten-bound", report.within_bound, [report.norm, report.bound]))

    signal = _complex(rng, params["spectrogram_size"])
    outcome.payloads["spectrogram"] = spectrogram(signal, window("gauss", signal.size))
    outcome.payloads["symbol-mask"] = mask.reshape(small, small)
    return outcome


# ─────────────────────────────────────────────
# WAVELET SYSTEMS
# ─────────────────────────────────────────────


def wavelet_experiment(params: dict, rng: np.random.Generator) -> ExperimentOutcome:
    outcome = ExperimentOutcome()
    records = outcome.records
    lo, hi = params["scale_range"]
    N, dt, budget = params["samples"], params["dt"], params["tolerance"]

    def build(J: int, M: int, **kwargs):
        return wavelet_frame(params["window"], log_scales(lo, hi, J), M, N, dt, **kwargs)

    reference = build(params["reference_scales"], params["reference_translations"])
    records.append(check_at_most("reference-tightness", reference.deviation, budget))
    records.append(
        check_close("tight-constant", reference.tight_constant, reference.expected_constant, 0.1, relative=True)
    )

    deviations = [build(J, M).deviation for J, M in params["refinement_levels"]]
    records.append(check_true("refinement-decreases-deviation", all(np.diff(deviations) < 0), deviations))

    single = wavelet_frame(params["window"], [1.0], params["reference_translations"], N, dt)
    records.append(check_true("single-scale-not-tight", single.deviation > budget, single.deviation))

    small = params["mirror_check"]
    plain = build(small[0], small[1])
    mirrored = build(small[0], small[1], mirror=True)
    records.append(check_close("mirror-doubles-constant", mirrored.tight_constant, 2 * plain.tight_constant, 1e-12, relative=True))

    band_lo, band_hi = params["admissibility_band"]
    freqs = np.linspace(0.0, 2 * band_hi, params["admissibility_points"])
    band = wavelet_window(f"bandlimited({band_lo},{band_hi})")
    records.append(check_close("admissibility-bandlimited", admissibility(band.spectrum(freqs), freqs), np.log(band_hi / band_lo), 1e-3))
    shifted = wavelet_window(f"bandlimited({1.5 * band_lo},{1.5 * band_hi})")
    overlap = cross_admissibility(band.spectrum(freqs), shifted.spectrum(freqs), freqs)
    records.append(check_close("cross-admissibility-overlap", overlap.real, np.log(band_hi / (1.5 * band_lo)), 1e-3))

    J, M, n_small = params["localization_grid"]
    left = wavelet_frame(params["window"], log_scales(lo, hi, J), M, n_small, dt)
    right = wavelet_frame(params["window"], log_scales(lo, hi, J), M, n_small, dt)
    space = product(left.frame.space, right.frame.space)
    L = localize_wavelet(Symbol(space, np.ones(space.size)), (left, right)).entries
    c = left.tight_constant * right.tight_constant
    allowed = left.deviation + right.deviation + left.deviation * right.deviation
    gap = float(np.max(np.abs(L / c - np.eye(L.shape[0]))))
    records.append(check_at_most("wavelet-localization-near-identity", gap, allowed * (1 + 1e-9) + 1e-12))

    band_mask = (left.frame.space.points[:, 1] >= 1.0).astype(float)
    m = tensor_symbol(Symbol(left.frame.space, band_mask), Symbol(right.frame.space, np.ones(right.frame.size)))
    L = localize_wavelet(m, (left, right)).entries
    F = tensor_frame(left.frame, right.frame)
    expected_trace = float(np.sum(F.space.weights * m.values.real * np.linalg.norm(F.vectors, axis=0) ** 2))
    eigenvalues = np.linalg.eigvalsh((L + L.conj().T) / 2)
    records.append(check_true("scale-band-localization-psd", eigenvalues[0] >= -1e-10 * eigenvalues[-1]))
    records.append(check_close("scale-band-trace", np.trace(L).real, expected_trace, 1e-10, relative=True))

    gabor = gabor_frame(window("delta", params["mixed_gabor_size"]))
    mixed_space = product(gabor.frame.space, left.frame.space)
    L = localize_mixed(Symbol(mixed_space, np.ones(mixed_space.size)), gabor, left).entries
    gap = float(np.max(np.abs(L / (gabor.bound * left.tight_constant) - np.eye(L.shape[0]))))
    records.append(check_at_most("mixed-localization-near-identity", gap, left.deviation * (1 + 1e-9) + 1e-12))
    m1 = Symbol(gabor.frame.space, rng.uniform(0, 1, gabor.frame.size))
    m2 = Symbol(left.frame.space, rng.uniform(0, 1, left.frame.size))
    L = localize_mixed(tensor_symbol(m1, m2), gabor, left).entries
    kron = np.kron(multiplier(m1, gabor.frame, gabor.frame).entries, multiplier(m2, left.frame, left.frame).entries)
    records.append(check_at_most("mixed-separable-factorization", rel_err(L, kron), 1e-12))

    outcome.details = {"reference_constant": reference.tight_constant, "refinement_deviations": deviations}
    outcome.payloads["refinement-deviations"] = np.array([deviations])
    return outcome


# ─────────────────────────────────────────────
# DENSITY OPERATORS
# ─────────────────────────────────────────────


def _uniform_symbol(N: int, value: float) -> Symbol:
    return Symbol(gabor_grid(N), np.full(N * N, value))


def density_experiment(params: dict, rng: np.random.Generator) -> ExperimentOutcome:
    outcome = ExperimentOutcome()
    records = outcome.records

    N = params["example_size"]
    names = params["example_windows"]
    phi1, phi2 = window(names[0], N), window(names[1], N)
    example = separable_density(_uniform_symbol(N, 1.0 / N**2), _uniform_symbol(N, 1.0 / N**2), phi1, phi2)
    records.append(check_close("example-trace", trace(example.rho.op), 1.0, 1e-12))
    records.append(check_close("example-purity", purity(example.rho), purity(example.left) * purity(example.right), 1e-12))
    if names == ["delta", "delta"]:
        records.append(check_close("example-reduced-left", example.left.matrix, np.eye(N) / N, 1e-12))
        records.append(check_close("example-reduced-right", example.right.matrix, np.eye(N) / N, 1e-12))
        records.append(check_close("example-rho", example.rho.matrix, np.eye(N * N) / N**2, 1e-12))
    outcome.details = density_report(example)
    outcome.payloads["rho"] = example.rho.matrix

    trace_failures, trace_defect = 0, 0.0
    for index in range(params["trace_instances"]):
        n = int(rng.integers(2, params["max_trace_size"] + 1))
        phi, psi = _complex(rng, n), _complex(rng, n)
        if index % 4 == 0:
            psi = psi - np.vdot(phi, psi) / np.vdot(phi, phi) * phi
        m = Symbol(gabor_grid(n), _complex(rng, n * n))
        result = trace_formula(m, phi, psi, check=False)
        trace_defect = max(trace_defect, result.defect / max(1.0, abs(result.rhs)))
        trace_failures += 0 if result.holds else 1
    records.append(check_at_most("trace-formula-failures", trace_failures, 0))
    records.append(check_at_most("trace-formula-defect", trace_defect, 1e-10))

    invalid = 0
    reduction_defect = factor_defect = mechanism_defect = 0.0
    for n in params["sizes"]:
        for _ in range(params["instances"]):
            phi1, phi2 = _complex(rng, n), _complex(rng, n)
            m1 = Symbol(gabor_grid(n), rng.uniform(0.1, 1.0, n * n))
            m2 = Symbol(gabor_grid(n), rng.uniform(0.1, 1.0, n * n))
            state = separable_density(m1, m2, phi1, phi2, check=False)
            invalid += sum(not s.valid for s in state)
            reduction_defect = max(
                reduction_defect,
                float(np.max(np.abs(partial_trace(state.rho.op, (n, n), "right").entries - state.left.matrix))),
                float(np.max(np.abs(partial_trace(state.rho.op, (n, n), "left").entries - state.right.matrix))),
            )
            factor_defect = max(factor_defect, abs(purity(state.rho) - purity(state.left) * purity(state.right)))
            F = tensor_frame(gabor_frame(phi1).frame, gabor_frame(phi2).frame)
            rooted = frame_operator(Frame(F.space, F.vectors * np.sqrt(np.kron(m1.values, m2.values).real))).entries
            mechanism_defect = max(mechanism_defect, rel_err(state.rho.matrix, rooted / np.trace(rooted).real))
    records += [
        check_at_most("invalid-density-operators", invalid, 0),
        check_at_most("reduced-operators-match-factors", reduction_defect, 1e-10),
        check_at_most("purity-factorization", factor_defect, 1e-10),
        check_at_most("frame-operator-mechanism", mechanism_defect, 1e-10),
    ]

    n = params["example_size"]
    atom = np.zeros(n * n)
    atom[0] = 1.0
    pure = separable_density(Symbol(gabor_grid(n), atom), Symbol(gabor_grid(n), atom), _complex(rng, n), _complex(rng, n))
    records.append(check_close("pure-product-state", purity(pure.rho), 1.0, 1e-10))

    admissible, diagnostics = is_admissible(LinearOperator(np.diag([1.0, -0.1]) / 0.9))
    records.append(check_true("indefinite-operator-rejected", not admissible, diagnostics["violations"]))
    return outcome


# ─────────────────────────────────────────────
# REGISTRY
# ─────────────────────────────────────────────

EXPERIMENTS = {
    "frame-bounds": frame_bounds_experiment,
    "tensor-check": tensor_check_experiment,
    "duals": duals_experiment,
    "multiplier": multiplier_experiment,
    "gabor": gabor_experiment,
    "wavelet": wavelet_experiment,
    "density": density_experiment,
}
