import numpy as np
import pytest

from src.domain_model import (
    DimensionMismatchError,
    Frame,
    FrameToolkitError,
    LinearOperator,
    NotRedundantError,
    Symbol,
    TensorVector,
)
from src.frames import (
    canonical_dual,
    frame_bounds,
    frame_from_columns,
    frame_operator,
    is_dual_pair,
    random_frame,
)
from src.measure import make_space
from src.tensor import (
    bound_constants,
    column_ranks,
    kron_op,
    kron_vec,
    nonsimple_dual,
    recover_factor_bounds,
    schmidt,
    simple_rank,
    tensor_frame,
    tensor_symbol,
)

# ─────────────────────────────────────────────
# KRONECKER PRODUCTS
# ─────────────────────────────────────────────


def test_kron_vec_basis_vectors():
    x = kron_vec([1, 0], [0, 1])
    assert x.dims == (2, 2)
    np.testing.assert_array_equal(x.entries, [0, 1, 0, 0])


def test_kron_vec_entries():
    np.testing.assert_array_equal(kron_vec([1, 2], [3, 4, 5]).entries, [3, 4, 5, 6, 8, 10])


def test_kron_vec_norm_is_multiplicative(rng):
    u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    assert kron_vec(u, v).norm == pytest.approx(np.linalg.norm(u) * np.linalg.norm(v))


def test_kron_op_identity_and_diagonal():
    np.testing.assert_array_equal(
        kron_op(LinearOperator(np.eye(2)), LinearOperator(np.eye(3))).entries, np.eye(6)
    )
    np.testing.assert_array_equal(
        kron_op(LinearOperator(np.diag([2, 3])), LinearOperator(np.eye(2))).entries,
        np.diag([2, 2, 3, 3]),
    )


def test_kron_op_acts_on_kron_vec(rng):
    S = LinearOperator(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    T = LinearOperator(rng.standard_normal((3, 3)))
    u, v = rng.standard_normal(2), rng.standard_normal(3)
    np.testing.assert_allclose(kron_op(S, T) @ kron_vec(u, v).entries, kron_vec(S @ u, T @ v).entries)


def test_kron_op_requires_square():
    with pytest.raises(DimensionMismatchError):
        kron_op(LinearOperator(np.ones((2, 3))), LinearOperator(np.eye(2)))


# ─────────────────────────────────────────────
# TENSOR FRAMES
# ─────────────────────────────────────────────


def test_tensor_of_bases_is_parseval(onb):
    F = tensor_frame(onb, onb)
    assert F.size == 4 and F.dims == (2, 2)
    assert frame_bounds(F).is_parseval


def test_tensor_of_mercedes_frames(mercedes):
    F = tensor_frame(mercedes, mercedes)
    assert F.size == 9
    lower, upper = frame_bounds(F)
    assert lower == pytest.approx(2.25)
    assert upper == pytest.approx(2.25)


def test_tensor_column_order(repeated_frame, onb):
    F = tensor_frame(repeated_frame, onb)
    for i in range(3):
        for j in range(2):
            expected = np.kron(repeated_frame.column(i), onb.column(j))
            np.testing.assert_array_equal(F.column(i * 2 + j), expected)


def test_frame_operator_factorizes(rng):
    F1 = random_frame(rng, 2, 4, random_weights=True)
    F2 = random_frame(rng, 3, 5, random_weights=True)
    S = frame_operator(tensor_frame(F1, F2)).entries
    expected = kron_op(frame_operator(F1), frame_operator(F2)).entries
    np.testing.assert_allclose(S, expected, atol=1e-10 * np.max(np.abs(expected)))


def test_bounds_are_multiplicative(rng):
    F1, F2 = random_frame(rng, 2, 5), random_frame(rng, 3, 4)
    A1, B1 = frame_bounds(F1)
    A2, B2 = frame_bounds(F2)
    A, B = frame_bounds(tensor_frame(F1, F2))
    assert A == pytest.approx(A1 * A2, rel=1e-10)
    assert B == pytest.approx(B1 * B2, rel=1e-10)


def test_factor_bounds_recovered(rng):
    F1, F2 = random_frame(rng, 3, 6), random_frame(rng, 2, 3)
    recovered = recover_factor_bounds(frame_bounds(tensor_frame(F1, F2)), F2)
    assert recovered == pytest.approx(tuple(frame_bounds(F1)), rel=1e-9)


def test_bound_constants_of_tight_frame(mercedes):
    assert bound_constants(mercedes) == pytest.approx((1.5, 1.5))


def test_canonical_dual_of_tensor_is_tensor_of_duals(rng):
    F1, F2 = random_frame(rng, 2, 3), random_frame(rng, 2, 4)
    expected = tensor_frame(canonical_dual(F1), canonical_dual(F2)).vectors
    np.testing.assert_allclose(canonical_dual(tensor_frame(F1, F2)).vectors, expected, atol=1e-10)


def test_tensor_symbol_values():
    m1 = Symbol(make_space([0, 1], [1, 1]), [1, 2])
    m2 = Symbol(make_space([0, 1, 2], [1, 2, 3]), [3, 4, 5])
    m = tensor_symbol(m1, m2)
    np.testing.assert_array_equal(m.values, [3, 4, 5, 6, 8, 10])
    np.testing.assert_array_equal(m.space.weights, [1, 2, 3, 1, 2, 3])


# ─────────────────────────────────────────────
# SCHMIDT DECOMPOSITION
# ─────────────────────────────────────────────


class TestSchmidt:
    def test_simple_tensor(self):
        decomposition = schmidt(kron_vec([1, 0], [1, 0]))
        np.testing.assert_allclose(decomposition.coefficients, [1.0])

    def test_maximally_entangled(self):
        x = TensorVector((2, 2), np.array([1, 0, 0, 1]) / np.sqrt(2))
        decomposition = schmidt(x)
        np.testing.assert_allclose(decomposition.coefficients, [1 / np.sqrt(2)] * 2)
        assert simple_rank(x) == 2

    def test_zero_vector(self):
        decomposition = schmidt(TensorVector((2, 3), np.zeros(6)))
        assert decomposition.coefficients.size == 0
        assert decomposition.left.shape == (2, 0)
        assert simple_rank(TensorVector((2, 3), np.zeros(6))) == 0

    def test_reconstruction_and_energy(self, rng):
        x = TensorVector((3, 4), rng.standard_normal(12) + 1j * rng.standard_normal(12))
        decomposition = schmidt(x)
        np.testing.assert_allclose(decomposition.reconstruct(), x.entries, atol=1e-12)
        assert np.sum(decomposition.coefficients**2) == pytest.approx(x.norm**2)
        assert np.all(np.diff(decomposition.coefficients) <= 0)

    def test_orthonormal_factors(self, rng):
        x = TensorVector((3, 3), rng.standard_normal(9) + 1j * rng.standard_normal(9))
        decomposition = schmidt(x)
        r = decomposition.coefficients.size
        np.testing.assert_allclose(decomposition.left.conj().T @ decomposition.left, np.eye(r), atol=1e-12)
        np.testing.assert_allclose(decomposition.right.conj().T @ decomposition.right, np.eye(r), atol=1e-12)

    @pytest.mark.parametrize("dims", [(3, 2), (2, 3), (4, 1)])
    def test_unequal_dimensions(self, dims):
        n1, n2 = dims
        u, v = np.arange(1, n1 + 1), np.arange(1, n2 + 1)
        decomposition = schmidt(kron_vec(u, v))
        assert decomposition.left.shape == (n1, 1)
        assert decomposition.right.shape == (n2, 1)
        assert decomposition.coefficients[0] == pytest.approx(np.linalg.norm(u) * np.linalg.norm(v))
        assert simple_rank(kron_vec(u, v)) == 1

    def test_entangled_tall_tensor(self):
        x = TensorVector((3, 2), np.array([1, 0, 0, 1, 0, 0]) / np.sqrt(2))
        assert simple_rank(x) == 2
        np.testing.assert_allclose(schmidt(x).reconstruct(), x.entries, atol=1e-12)

    def test_phase_convention(self, rng):
        x = TensorVector((2, 3), rng.standard_normal(6) + 1j * rng.standard_normal(6))
        for column in schmidt(x).left.T:
            pivot = column[np.argmax(np.abs(column) > 1e-10)]
            assert pivot.imag == pytest.approx(0.0, abs=1e-12)
            assert pivot.real > 0


# ─────────────────────────────────────────────
# NON-SIMPLE DUALS
# ─────────────────────────────────────────────


class TestNonsimpleDual:
    def test_tensor_columns_are_simple(self, repeated_frame, onb):
        assert column_ranks(tensor_frame(repeated_frame, onb)) == [1] * 6

    def test_found_for_redundant_frame(self, repeated_frame, onb):
        F = tensor_frame(repeated_frame, onb)
        G = nonsimple_dual(F)
        assert is_dual_pair(F, G)
        assert max(column_ranks(G)) == 2
        assert not G.is_simple

    def test_found_for_random_frames(self, rng):
        F = tensor_frame(random_frame(rng, 2, 3), random_frame(rng, 2, 3))
        G = nonsimple_dual(F, seed=5)
        assert is_dual_pair(F, G, tol=1e-9)
        assert max(column_ranks(G)) >= 2

    def test_zero_family_gives_canonical_dual(self, repeated_frame, onb):
        F = tensor_frame(repeated_frame, onb)
        W = Frame(F.space, np.zeros((F.dim, F.size)))
        G = nonsimple_dual(F, W=W)
        np.testing.assert_allclose(G.vectors, canonical_dual(F).vectors)

    def test_bases_are_not_redundant(self, onb):
        with pytest.raises(NotRedundantError):
            nonsimple_dual(tensor_frame(onb, onb))

    def test_one_dimensional_factor(self, repeated_frame):
        line = frame_from_columns([[1], [1]])
        with pytest.raises(DimensionMismatchError):
            nonsimple_dual(tensor_frame(line, repeated_frame))

    def test_requires_factor_provenance(self, repeated_frame, onb):
        G = nonsimple_dual(tensor_frame(repeated_frame, onb))
        with pytest.raises(FrameToolkitError):
            nonsimple_dual(G)

    def test_deterministic_for_seed(self, repeated_frame, onb):
        F = tensor_frame(repeated_frame, onb)
        np.testing.assert_array_equal(nonsimple_dual(F, seed=3).vectors, nonsimple_dual(F, seed=3).vectors)
