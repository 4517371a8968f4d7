"""
Tests for the exponential-vector kernel.
"""

import unittest

import numpy as np
import pytest

from src.algebra.step_function import StepFunction
from src.fock.kernel import (
    CouplingConstant,
    kernel,
    kernel_gram,
    kernel_taylor_coefficients,
    log_kernel,
    qexp_exists,
)
from src.fock.nparticle import inner_n_sequence
from src.utils.errors import DimensionMismatch, DomainError


def constant(value, lo=0.0, hi=1.0):
    return StepFunction.indicator([lo], [hi], value)


class TestExistence(unittest.TestCase):
    """Test cases for the existence radius."""

    def test_zero_function(self):
        self.assertTrue(qexp_exists(StepFunction.zero()))

    def test_strict_boundary(self):
        self.assertTrue(qexp_exists(constant(0.4)))
        self.assertTrue(qexp_exists(constant(0.499999)))
        self.assertFalse(qexp_exists(constant(0.5)))
        self.assertFalse(qexp_exists(constant(0.5j)))

    def test_kernel_raises_at_boundary(self):
        with self.assertRaises(DomainError) as ctx:
            kernel(constant(0.5), constant(0.1), 1.0)
        self.assertEqual(ctx.exception.details["argument"], "f")

    def test_coupling_must_be_positive(self):
        with self.assertRaises(DomainError):
            CouplingConstant(0.0)
        with self.assertRaises(DomainError):
            kernel(constant(0.1), constant(0.1), -1.0)


class TestKernel:
    def test_constant_closed_form(self):
        result = kernel(constant(0.4), constant(0.4), 1.0)
        assert result.value == pytest.approx(5.0 / 3.0, rel=1e-12)
        assert np.exp(result.log_value) == pytest.approx(result.value, rel=1e-12)

    def test_partial_overlap(self):
        f = constant(0.4, 0.0, 0.5)
        g = constant(0.4, 0.0, 1.0)
        assert kernel(f, g, 1.0).value == pytest.approx(0.36 ** -0.25, rel=1e-12)

    def test_vacuum(self):
        zero = StepFunction.zero()
        assert kernel(zero, constant(0.3), 2.0).value == 1.0
        assert log_kernel(zero, zero, 1.0) == 0j

    def test_hermitian_symmetry(self, make_function):
        f, g = make_function(), make_function()
        assert kernel(f, g, 1.5).value == pytest.approx(np.conj(kernel(g, f, 1.5).value), rel=1e-12)

    def test_gauge_invariance(self, make_function, rng):
        f, g = make_function(), make_function()
        phase = np.exp(1j * rng.uniform(-np.pi, np.pi))
        assert kernel(f.scale(phase), g.scale(phase), 1.0).value == pytest.approx(
            kernel(f, g, 1.0).value, rel=1e-12
        )

    @pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
    def test_coupling_is_an_exponent(self, make_function, c):
        f, g = make_function(), make_function()
        base = kernel(f, g, 1.0).log_value
        assert kernel(f, g, c).log_value == pytest.approx(c * base, rel=1e-12)

    def test_splitting_a_cell_changes_nothing(self):
        whole = constant(0.35 - 0.1j)
        split = StepFunction.from_breaks([0.0, 0.3, 0.65, 1.0], [0.35 - 0.1j] * 3)
        g = StepFunction.from_breaks([0.0, 0.5, 1.0], [0.2, 0.4j])
        assert kernel(split, g, 1.3).value == pytest.approx(kernel(whole, g, 1.3).value, rel=1e-12)

    def test_disjoint_supports_multiply(self, make_function):
        f1, g1 = make_function(), make_function()
        f2, g2 = make_function(lo=1.0, hi=2.0), make_function(lo=1.0, hi=2.0)
        f = StepFunction(f1.cells + f2.cells, np.concatenate([f1.values, f2.values]))
        g = StepFunction(g1.cells + g2.cells, np.concatenate([g1.values, g2.values]))
        product = kernel(f1, g1, 0.8).value * kernel(f2, g2, 0.8).value
        assert kernel(f, g, 0.8).value == pytest.approx(product, rel=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            kernel(constant(0.1), StepFunction.indicator([0.0, 0.0], [1.0, 1.0], 0.1), 1.0)


class TestGram:
    def test_counterexample_matrix(self):
        gram = kernel_gram([constant(0.4, 0.0, 0.5), constant(0.4)], 1.0)
        expected = [[0.36 ** -0.25, 0.36 ** -0.25], [0.36 ** -0.25, 0.36 ** -0.5]]
        np.testing.assert_allclose(gram.entries, expected, rtol=1e-12)
        assert gram.hermitian

    def test_single_function(self):
        gram = kernel_gram([constant(0.2)], 1.0)
        assert gram.order == 1
        assert gram.entries[0, 0].imag == 0.0
        assert gram.entries[0, 0].real > 1.0

    def test_positive_definite(self, make_function):
        gram = kernel_gram([make_function() for _ in range(5)], 1.0)
        assert np.linalg.eigvalsh(gram.entries)[0] > 0.0

    def test_reports_inadmissible_index(self):
        with pytest.raises(DomainError) as info:
            kernel_gram([constant(0.1), constant(0.2), constant(0.6)], 1.0)
        assert info.value.details["index"] == 2


class TestTaylorCoefficients:
    def test_coefficients_are_normalized_moments(self, make_function):
        f, g = make_function(), make_function()
        coefficients = kernel_taylor_coefficients(f, g, 1.3, 10)
        moments = inner_n_sequence(f, g, 1.3, 10)
        factorial_sq = 1.0
        for n in range(11):
            factorial_sq *= max(n, 1) ** 2
            assert coefficients[n] == pytest.approx(moments[n] / factorial_sq, rel=1e-10, abs=1e-15)

    def test_series_matches_kernel(self):
        f, g = constant(0.3), constant(0.2)
        coefficients = kernel_taylor_coefficients(f, g, 1.0, 60)
        assert sum(coefficients) == pytest.approx(kernel(f, g, 1.0).value, rel=1e-12)

    def test_derivative_at_zero(self, make_function):
        f, g = make_function(), make_function()
        h = 1e-6
        slope = (kernel(f.scale(h), g, 1.0).value - kernel(f.scale(-h), g, 1.0).value) / (2 * h)
        coefficients = kernel_taylor_coefficients(f, g, 1.0, 1)
        # antilinear first slot: d/dt at real t
        assert slope == pytest.approx(coefficients[1], rel=1e-6, abs=1e-9)
