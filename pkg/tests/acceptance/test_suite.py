"""
Tests for the acceptance criteria behind the selftest command.
"""

import numpy as np
import pytest

from src.acceptance.suite import (
    check_closed_form,
    check_counterexample,
    check_existence_boundary,
    check_functoriality,
    check_independence,
    check_isometries,
    check_method_agreement,
    check_misprint,
    check_schur,
    check_semigroup,
    failed,
    random_isometry,
    random_step_function,
    run_suite,
)
from src.operators.classifier import classify


class TestHelpers:
    def test_random_step_function(self, rng):
        for _ in range(20):
            f = random_step_function(rng, max_cells=4, lo=1.0, hi=3.0)
            assert 1 <= len(f) <= 4
            assert f.domain_measure() == pytest.approx(2.0)
            assert np.max(np.abs(f.values)) <= 0.45

    def test_random_isometry_classifies_as_unitary(self, rng):
        T = random_isometry(rng)
        n = len(T.cell_maps()[0].pairs)
        samples = [
            (random_step_function(rng, hi=float(n)), random_step_function(rng, hi=float(n))) for _ in range(3)
        ]
        result = classify(T, samples)
        assert result.isometry
        assert result.unitary


class TestCriteria:
    def test_method_agreement(self):
        assert check_method_agreement(0).passed

    def test_misprint(self):
        result = check_misprint()
        assert result.passed
        assert result.measured["printed"] == pytest.approx(0.8192)

    def test_closed_form(self):
        assert check_closed_form().passed

    def test_existence_boundary(self):
        assert check_existence_boundary().passed

    def test_isometries(self):
        result = check_isometries(0)
        assert result.passed, result.measured

    def test_counterexample(self):
        result = check_counterexample(0)
        assert result.passed, result.measured

    def test_semigroup(self):
        assert check_semigroup(0).passed

    def test_functoriality(self):
        assert check_functoriality(0).passed

    @pytest.mark.slow
    def test_schur(self):
        assert check_schur(0).passed

    def test_independence(self):
        assert check_independence(0).passed


class TestMutant:
    def test_mutant_fails_agreement_criteria(self):
        assert not check_method_agreement(0, mutant=True).passed
        assert not check_misprint(mutant=True).passed

    @pytest.mark.slow
    def test_suite_reports_failed_numbers(self):
        assert failed(run_suite(seed=1)) is None
        assert failed(run_suite(seed=1, mutant=True)) == [1, 2]
