"""
Tests for step functions and their algebra.
"""

import unittest

import numpy as np
import pytest

from src.algebra.step_function import (
    Cell,
    StepFunction,
    common_refinement,
    conj,
    inner,
    inner_pow,
    mul,
    norm_inf,
    norm_p,
    pointwise,
    power,
    refine_cells,
)
from src.utils.errors import DimensionMismatch, InvalidCell, OverlappingCells


class TestCell(unittest.TestCase):
    """Test cases for the Cell class."""

    def test_measure_is_product_of_sides(self):
        cell = Cell([0.0, 1.0], [0.5, 3.0])
        self.assertAlmostEqual(cell.measure, 1.0)
        self.assertEqual(cell.dimension, 2)
        self.assertEqual(cell.sides, (0.5, 2.0))

    def test_degenerate_cell_rejected(self):
        with self.assertRaises(InvalidCell):
            Cell([0.0], [0.0])
        with self.assertRaises(InvalidCell):
            Cell([1.0], [0.0])
        with self.assertRaises(InvalidCell):
            Cell([0.0, 0.0], [1.0])

    def test_cells_are_immutable(self):
        cell = Cell([0.0], [1.0])
        with self.assertRaises(AttributeError):
            cell._lower = (2.0,)

    def test_intersection(self):
        a = Cell([0.0], [1.0])
        b = Cell([0.5], [2.0])
        self.assertEqual(a.intersect(b), Cell([0.5], [1.0]))
        self.assertIsNone(a.intersect(Cell([1.0], [2.0])))

    def test_affine_image_keeps_shared_faces(self):
        source = Cell([0.0], [1.0])
        target = Cell([1.0], [2.0])
        self.assertEqual(source.affine_to(target, source), target)
        self.assertEqual(source.affine_to(target, Cell([0.0], [0.5])), Cell([1.0], [1.5]))

    def test_hash_and_equality(self):
        self.assertEqual(len({Cell([0.0], [1.0]), Cell([0.0], [1.0])}), 1)


class TestStepFunction:
    def test_overlapping_cells_rejected(self):
        with pytest.raises(OverlappingCells):
            StepFunction([Cell([0.0], [1.0]), Cell([0.5], [2.0])], [1.0, 2.0])

    def test_touching_cells_allowed(self):
        f = StepFunction([Cell([0.0], [1.0]), Cell([1.0], [2.0])], [1.0, 2.0])
        assert len(f) == 2

    def test_evaluation_is_half_open(self):
        f = StepFunction.from_breaks([0.0, 1.0, 2.0], [1.0, 2.0])
        assert f([0.0]) == 1.0
        assert f([1.0]) == 2.0
        assert f([2.0]) == 0.0
        assert f([-0.1]) == 0.0

    def test_evaluation_dimension_checked(self):
        f = StepFunction.indicator([0.0], [1.0])
        with pytest.raises(DimensionMismatch):
            f([0.0, 0.0])

    def test_zero_cells_kept_but_not_counted(self):
        f = StepFunction.from_breaks([0.0, 1.0, 3.0], [0.0, 0.5])
        assert len(f) == 2
        assert f.support_measure() == pytest.approx(2.0)
        assert f.domain_measure() == pytest.approx(3.0)
        assert norm_p(f, 2) == pytest.approx(np.sqrt(0.5))

    def test_values_are_read_only(self):
        values = np.array([1.0, 2.0], dtype=complex)
        f = StepFunction.from_breaks([0.0, 1.0, 2.0], values)
        with pytest.raises(ValueError):
            f.values[0] = 3.0
        values[0] = 5.0
        assert f([0.5]) == 1.0

    def test_dimension_mismatch(self):
        f = StepFunction.indicator([0.0], [1.0])
        g = StepFunction.indicator([0.0, 0.0], [1.0, 1.0])
        with pytest.raises(DimensionMismatch):
            inner(f, g)


class TestAlgebra:
    def test_inner_is_antilinear_in_first_slot(self):
        f = StepFunction.indicator([0.0], [1.0], 1j)
        g = StepFunction.indicator([0.0], [2.0], 2.0)
        assert inner(f, g) == pytest.approx(-2j)
        assert inner(g, f) == pytest.approx(2j)

    def test_inner_pow_on_overlapping_cells(self):
        f = StepFunction.from_breaks([0.0, 0.5, 1.0], [0.4, 0.2])
        g = StepFunction.indicator([0.25], [0.75], 0.3)
        expected = 0.25 * (0.4 * 0.3) ** 2 + 0.25 * (0.2 * 0.3) ** 2
        assert inner_pow(f, g, 2) == pytest.approx(expected)

    def test_inner_pow_matches_power_then_inner(self, make_function):
        f, g = make_function(), make_function()
        for k in range(1, 9):
            assert inner_pow(f, g, k) == pytest.approx(inner(power(f, k), power(g, k)), rel=1e-12)

    def test_inner_pow_is_hermitian(self, make_function):
        for _ in range(5):
            f, g = make_function(), make_function()
            for k in (1, 2, 5):
                assert inner_pow(f, g, k) == pytest.approx(np.conj(inner_pow(g, f, k)), rel=1e-12, abs=1e-15)

    def test_inner_pow_holder_bound(self, make_function):
        for _ in range(5):
            f, g = make_function(), make_function()
            for k in range(1, 7):
                bound = norm_p(f, 2 * k) ** k * norm_p(g, 2 * k) ** k
                assert abs(inner_pow(f, g, k)) <= bound * (1 + 1e-12)

    def test_pointwise_multiplication(self, make_function):
        f, g = make_function(), make_function()
        assert pointwise(f, g).equals(mul(f, g))
        assert pointwise(f, g, "mul").equals(mul(g, f), tol=1e-15)
        with pytest.raises(ValueError):
            pointwise(f, g, "add")

    def test_norms(self):
        f = StepFunction.from_breaks([0.0, 0.5, 2.0], [0.3, -0.4j])
        assert norm_inf(f) == pytest.approx(0.4)
        assert norm_p(f, 2) ** 2 == pytest.approx(0.5 * 0.09 + 1.5 * 0.16)
        assert norm_p(f, 1) == pytest.approx(0.5 * 0.3 + 1.5 * 0.4)
        assert norm_inf(StepFunction.zero()) == 0.0

    def test_mul_uses_intersections(self):
        f = StepFunction.from_breaks([0.0, 1.0, 2.0], [2.0, 3.0])
        g = StepFunction.indicator([0.5], [1.5], 1j)
        h = mul(f, g)
        assert h([0.75]) == pytest.approx(2j)
        assert h([1.25]) == pytest.approx(3j)
        assert h([1.75]) == 0.0

    def test_conj(self):
        f = StepFunction.indicator([0.0], [1.0], 1 + 2j)
        assert conj(f)([0.5]) == 1 - 2j

    def test_common_refinement(self):
        f = StepFunction.from_breaks([0.0, 1.0], [1.0])
        g = StepFunction.from_breaks([0.5, 2.0], [2.0])
        ref = common_refinement(f, g)
        assert [c.lower[0] for c in ref.cells] == [0.0, 0.5, 1.0]
        np.testing.assert_allclose(ref.values_a, [1.0, 1.0, 0.0])
        np.testing.assert_allclose(ref.values_b, [0.0, 2.0, 2.0])
        assert ref.measures.sum() == pytest.approx(2.0)

    def test_refinement_in_two_dimensions(self):
        f = StepFunction.indicator([0.0, 0.0], [1.0, 1.0], 1.0)
        g = StepFunction.indicator([0.5, 0.5], [1.5, 1.5], 1.0)
        ref = common_refinement(f, g)
        assert ref.measures.sum() == pytest.approx(1.75)
        assert f.equals(ref.function_a(2))

    def test_equals_with_tolerance(self):
        f = StepFunction.from_breaks([0.0, 0.5, 1.0], [1.0, 1.0])
        g = StepFunction.indicator([0.0], [1.0], 1.0 + 1e-13)
        assert f.equals(g, tol=1e-12)
        assert not f.equals(g)

    def test_refine_cells_splits_overlaps(self):
        cells = refine_cells([Cell([0.0], [1.0]), Cell([0.5], [2.0])])
        assert cells == [Cell([0.0], [0.5]), Cell([0.5], [1.0]), Cell([1.0], [2.0])]
        assert refine_cells([]) == []
