"""
Tests for spans of exponential vectors, Loewner ordering and semigroup checks.
"""

import numpy as np
import pytest

from src.algebra.step_function import Cell, StepFunction
from src.fock.schema import span_from_json, span_to_json
from src.fock.span import (
    FockSpan,
    contraction_witness_search,
    counterexample,
    gamma2_apply,
    h0_eigencheck,
    h0_expectation,
    loewner_leq,
    random_admissible_function,
    sampling_cells,
    schur_order_check,
    semigroup_apply,
    span_norm,
    submarkov_eigenvalue,
)
from src.linalg.hermitian import HermitianMatrix
from src.operators.spec import Average, CellMap, Compose, Gauge, Mult, Rearrange
from src.utils.errors import DimensionMismatch, DomainError, PreconditionFailed, SchemaError

LEFT = Cell([0.0], [0.5])
RIGHT = Cell([0.5], [1.0])
UNIT = Cell([0.0], [1.0])


def constant(value, lo=0.0, hi=1.0):
    return StepFunction.indicator([lo], [hi], value)


class TestFockSpan:
    def test_vacuum_has_unit_norm(self):
        assert span_norm(FockSpan.vacuum(2.0)) == pytest.approx(1.0)

    def test_single_vector_norm(self):
        assert span_norm(FockSpan.single(constant(0.4), 1.0)) == pytest.approx(np.sqrt(5.0 / 3.0), rel=1e-12)

    def test_cancelling_terms(self):
        f = constant(0.3, 0.0, 0.5)
        assert span_norm(FockSpan([1.0, -1.0], [f, f], 1.0)) == pytest.approx(0.0, abs=1e-6)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            FockSpan([1.0, 2.0], [constant(0.1)], 1.0)
        with pytest.raises(DimensionMismatch):
            FockSpan([], [], 1.0)

    def test_inadmissible_function_named(self):
        with pytest.raises(DomainError) as info:
            FockSpan([1.0, 1.0], [constant(0.1), constant(0.5)], 1.0)
        assert info.value.details["index"] == 1

    def test_coefficients_are_read_only(self):
        xi = FockSpan.single(constant(0.1), 1.0)
        with pytest.raises(ValueError):
            xi.coefficients[0] = 2.0


class TestGamma2:
    def test_vacuum_is_fixed(self):
        xi = gamma2_apply(Average(UNIT), FockSpan.vacuum(1.0))
        assert span_norm(xi) == pytest.approx(1.0)

    def test_average_maps_functions(self):
        xi = FockSpan([1.0, -1.0], [constant(0.4, 0.0, 0.5), constant(0.4)], 1.0)
        image = gamma2_apply(Average(UNIT), xi)
        assert image.functions[0].equals(constant(0.2), tol=1e-15)
        assert image.functions[1].equals(constant(0.4), tol=1e-15)
        np.testing.assert_array_equal(image.coefficients, xi.coefficients)

    def test_isometry_preserves_norm(self, make_function):
        T = Compose((Gauge(constant(1.3, 0.0, 0.5)), Rearrange(CellMap.swap(LEFT, RIGHT))))
        xi = FockSpan([0.5, 0.25j], [make_function(), make_function()], 1.5)
        assert span_norm(gamma2_apply(T, xi)) == pytest.approx(span_norm(xi), rel=1e-10)


class TestLoewner:
    def test_ordered_pair(self):
        report = loewner_leq(HermitianMatrix(np.eye(2)), HermitianMatrix(2 * np.eye(2)))
        assert report.psd_A_minus_B
        assert report.witness_vector is None

    def test_unordered_pair_has_witness(self):
        A = HermitianMatrix(np.eye(2))
        B = HermitianMatrix([[1.0, 0.5], [0.5, 1.0]])
        report = loewner_leq(B, A)
        assert not report.psd_A_minus_B
        assert report.min_eigenvalue == pytest.approx(-0.5)
        v = np.array(report.witness_vector)
        assert (A - B).quadratic_form(v) < 0.0
        assert report.to_dict()["det_A_minus_B"]["re"] == pytest.approx(-0.25)

    def test_order_mismatch(self):
        with pytest.raises(DimensionMismatch):
            loewner_leq(HermitianMatrix(np.eye(2)), HermitianMatrix(np.eye(3)))


class TestCounterexample:
    def test_determinant_at_default_lambda(self):
        result = counterexample(0.4)
        assert not result.report.psd_A_minus_B
        assert result.report.determinant.real == pytest.approx(-6.1334e-3, abs=1e-6)
        assert result.report.min_eigenvalue < 0.0
        assert result.A.entries[1, 1] == pytest.approx(result.B.entries[1, 1], rel=1e-12)

    def test_witness_span_grows(self):
        result = counterexample(0.4)
        xi = result.witness_span(1.0)
        assert span_norm(gamma2_apply(result.operator, xi)) > span_norm(xi)

    @pytest.mark.parametrize("lam", [0.05, 0.2, 0.49])
    def test_fails_for_every_lambda(self, lam):
        assert counterexample(lam).report.determinant.real < 0.0

    @pytest.mark.parametrize("lam", [0.5, 0.7, 0.0])
    def test_lambda_out_of_range(self, lam):
        with pytest.raises(DomainError):
            counterexample(lam)


class TestWitnessSearch:
    def test_isometry_has_no_witness(self):
        T = Compose((Gauge(constant(0.7, 0.5, 1.0)), Rearrange(CellMap.swap(LEFT, RIGHT))))
        result = contraction_witness_search(T, 1.0, trials=40, rng_seed=3)
        assert not result.found
        assert result.trial is None

    def test_average_has_witness(self):
        result = contraction_witness_search(Average(UNIT), 1.0, trials=200, rng_seed=0)
        assert result.found
        assert result.ratio > 1.0
        assert span_norm(gamma2_apply(Average(UNIT), result.span)) > span_norm(result.span)

    def test_multiplication_has_no_witness(self):
        result = contraction_witness_search(Mult(constant(0.5)), 1.0, trials=40, rng_seed=5)
        assert not result.found

    def test_deterministic(self):
        first = contraction_witness_search(Average(UNIT), 1.0, trials=200, rng_seed=11)
        second = contraction_witness_search(Average(UNIT), 1.0, trials=200, rng_seed=11)
        assert first.trial == second.trial
        assert first.ratio == second.ratio

    def test_sampling_cells(self, rng):
        T = Compose((Average(UNIT), Rearrange(CellMap.swap(LEFT, RIGHT))))
        assert sampling_cells(T) == [LEFT, RIGHT]
        assert sampling_cells(Average(UNIT)) == [UNIT]
        for _ in range(20):
            f = random_admissible_function(rng, [LEFT, RIGHT])
            assert f.domain_measure() == pytest.approx(1.0)


class TestSemigroup:
    def test_semigroup_law(self, make_function):
        xi = FockSpan([1.0, 0.5j], [make_function(), make_function()], 1.0)
        z1, z2 = -0.3 + 0.7j, -0.1 - 1.1j
        nested = semigroup_apply(z1, semigroup_apply(z2, xi))
        direct = semigroup_apply(z1 + z2, xi)
        for f, g in zip(nested.functions, direct.functions):
            assert f.equals(g, tol=1e-14)

    def test_contractive(self, make_function):
        xi = FockSpan([1.0, -0.7], [make_function(), make_function()], 2.0)
        assert span_norm(semigroup_apply(-0.5, xi)) <= span_norm(xi) * (1 + 1e-12)
        assert span_norm(semigroup_apply(0.9j, xi)) == pytest.approx(span_norm(xi), rel=1e-10)

    def test_rejects_growth(self):
        with pytest.raises(DomainError):
            semigroup_apply(0.1, FockSpan.vacuum(1.0))

    @pytest.mark.parametrize("n", [0, 1, 3, 6])
    def test_particle_number_eigenvalue(self, make_function, n):
        assert h0_eigencheck(make_function(), 1.2, n, 0.83)

    def test_mean_particle_number(self):
        assert h0_expectation(constant(0.4), 1.0) == pytest.approx(0.32 / 0.36, rel=1e-10)
        assert h0_expectation(StepFunction.zero(), 1.0) == 0.0
        with pytest.raises(DomainError):
            h0_expectation(constant(0.5), 1.0)

    def test_submarkov(self):
        assert submarkov_eigenvalue(0.0) == 1.0
        assert submarkov_eigenvalue(1.0) == pytest.approx(np.exp(-1.0))
        with pytest.raises(DomainError):
            submarkov_eigenvalue(-1.0)


class TestSchurOrder:
    def test_holds_for_ordered_gram_matrices(self, make_function):
        fs = [make_function() for _ in range(3)]
        gram = FockSpan(np.ones(3), fs, 1.0).gram()
        half = HermitianMatrix(0.5 * gram.entries)
        assert schur_order_check(half, gram, half, gram)

    def test_precondition_named(self):
        eye = HermitianMatrix(np.eye(2))
        with pytest.raises(PreconditionFailed) as info:
            schur_order_check(eye, HermitianMatrix(0.5 * np.eye(2)), eye, eye)
        assert info.value.details["ordering"] == "A <= B"
        with pytest.raises(PreconditionFailed) as info:
            schur_order_check(eye, eye, HermitianMatrix(-np.eye(2)), eye)
        assert info.value.details["ordering"] == "0 <= C"


class TestSpanSchema:
    PAYLOAD = {
        "c": 1.0,
        "terms": [
            {"coefficient": {"re": 1.0}, "function": {"dim": 1, "cells": [{"lo": [0.0], "hi": [1.0], "re": 0.4}]}}
        ],
    }

    def test_parse(self):
        xi = span_from_json(self.PAYLOAD)
        assert span_norm(xi) == pytest.approx(np.sqrt(5.0 / 3.0))

    def test_serialize_then_parse(self):
        xi = span_from_json(span_to_json(span_from_json(self.PAYLOAD)))
        assert xi.coefficients[0] == 1.0
        assert float(xi.c) == 1.0

    @pytest.mark.parametrize(
        "payload",
        [
            {"c": 0.0, "terms": PAYLOAD["terms"]},
            {"c": 1.0, "terms": []},
            {"c": 1.0, "terms": [{"function": {"dim": 1, "cells": [{"lo": [0.0], "hi": [1.0]}, {"lo": [0.5], "hi": [2.0]}]}}]},
        ],
    )
    def test_invalid(self, payload):
        with pytest.raises(SchemaError):
            span_from_json(payload)

    def test_inadmissible_is_domain_error(self):
        payload = {"c": 1.0, "terms": [{"function": {"dim": 1, "cells": [{"lo": [0.0], "hi": [1.0], "re": 0.6}]}}]}
        with pytest.raises(DomainError):
            span_from_json(payload)
