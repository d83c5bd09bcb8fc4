import numpy as np
import pytest

from src.domain_model import DimensionMismatchError, FrameToolkitError
from src.measure import atom_index, atom_pair, integrate, make_space, product, total_mass


class TestMakeSpace:
    def test_single_atom(self):
        space = make_space([0], [1])
        assert space.size == 1
        assert total_mass(space) == 1.0

    def test_total_mass(self):
        assert total_mass(make_space([0, 1, 2], [0.5, 0.5, 0.5])) == pytest.approx(1.5)

    def test_rejects_negative_weight(self):
        with pytest.raises(FrameToolkitError):
            make_space([0, 1], [1, -1])

    def test_rejects_empty_and_mismatched(self):
        with pytest.raises(FrameToolkitError):
            make_space([], [])
        with pytest.raises(DimensionMismatchError):
            make_space([0, 1], [1])


class TestProduct:
    def test_single_atoms_multiply(self):
        space = product(make_space([0], [2]), make_space([0], [3]))
        assert space.size == 1
        assert space.weights[0] == 6

    def test_unit_weights(self):
        space = product(make_space([0, 1], [1, 1]), make_space([0, 1, 2], [1, 1, 1]))
        np.testing.assert_array_equal(space.weights, np.ones(6))

    def test_row_major_order(self):
        space = product(make_space([0, 1], [1, 2]), make_space([5], [3]))
        np.testing.assert_array_equal(space.weights, [3, 6])
        np.testing.assert_array_equal(space.points, [[0, 5], [1, 5]])

    def test_mass_factorizes(self, rng):
        a = make_space(np.arange(3), rng.uniform(0.1, 2, 3))
        b = make_space(np.arange(4), rng.uniform(0.1, 2, 4))
        assert total_mass(product(a, b)) == pytest.approx(total_mass(a) * total_mass(b))

    def test_atom_index_bijection(self):
        space = product(make_space(np.arange(3), np.ones(3)), make_space(np.arange(4), np.ones(4)))
        indices = [atom_index(space, i, j) for i in range(3) for j in range(4)]
        assert indices == list(range(12))
        assert all(atom_pair(space, atom_index(space, i, j)) == (i, j) for i in range(3) for j in range(4))
        with pytest.raises(DimensionMismatchError):
            atom_pair(space, 12)


class TestIntegrate:
    def test_unit_weights(self):
        assert integrate([1, 1, 1], make_space([0, 1, 2], [1, 1, 1])) == 3

    def test_cancellation(self):
        assert integrate([1j, -1j], make_space([0, 1], [2, 2])) == 0

    def test_weighted_sum(self):
        assert integrate([1, 2, 3], make_space([0, 1, 2], [0.5, 0.5, 1])) == pytest.approx(4.5)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            integrate([1, 2], make_space([0, 1, 2], [1, 1, 1]))

    def test_linearity(self, rng):
        space = make_space(np.arange(6), rng.uniform(0.1, 2, 6))
        u = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        alpha, beta = 0.3 - 2j, -1.7 + 0.2j
        lhs = integrate(alpha * u + beta * v, space)
        rhs = alpha * integrate(u, space) + beta * integrate(v, space)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
