"""
JSON mapping for spans of exponential vectors.

Schema: {"c": c, "terms": [{"coefficient": {"re", "im"}, "function": <step function>}, ...]}.
"""

import json
from typing import Any, Dict, List

from pydantic import BaseModel, Field, ValidationError

from src.algebra.schema import ComplexModel, StepFunctionModel
from src.fock.span import FockSpan
from src.utils.errors import QFockError, SchemaError


class TermModel(BaseModel):
    coefficient: ComplexModel = Field(default_factory=lambda: ComplexModel(re=1.0))
    function: StepFunctionModel


class SpanModel(BaseModel):
    c: float = Field(gt=0.0)
    terms: List[TermModel] = Field(min_length=1)

    def to_span(self) -> FockSpan:
        return FockSpan(
            [t.coefficient.to_complex() for t in self.terms],
            [t.function.to_step_function() for t in self.terms],
            self.c,
        )


def span_from_json(data: Dict[str, Any]) -> FockSpan:
    """
    Raises:
        SchemaError: if the payload is malformed
        DomainError: if a function is outside the existence radius
    """
    try:
        model = SpanModel.model_validate(data)
    except ValidationError as e:
        raise SchemaError("invalid span", {"errors": json.loads(e.json(include_url=False))})
    try:
        return model.to_span()
    except SchemaError:
        raise
    except QFockError as e:
        if e.kind in ("invalid_cell", "overlapping_cells", "dimension_mismatch"):
            raise SchemaError(e.message, {"cause": e.kind, **e.details})
        raise


def span_to_json(xi: FockSpan) -> Dict[str, Any]:
    return {
        "c": float(xi.c),
        "terms": [
            {
                "coefficient": ComplexModel.of(a).model_dump(),
                "function": StepFunctionModel.from_step_function(f).model_dump(),
            }
            for a, f in zip(xi.coefficients, xi.functions)
        ],
    }
