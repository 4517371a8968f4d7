"""
JSON mapping for step functions.

Schema: {"dim": d, "cells": [{"lo": [...], "hi": [...], "re": x, "im": y}, ...]}.
File I/O lives in the command-line front end; this module only maps between
the wire models and the in-memory types.
"""

import json
from typing import Any, Dict, List

from pydantic import BaseModel, Field, ValidationError, model_validator

from src.algebra.step_function import Cell, StepFunction
from src.utils.errors import QFockError, SchemaError


class ComplexModel(BaseModel):
    """Complex number on the wire."""
    re: float = 0.0
    im: float = 0.0

    @classmethod
    def of(cls, z: complex) -> "ComplexModel":
        z = complex(z)
        return cls(re=z.real, im=z.imag)

    def to_complex(self) -> complex:
        return complex(self.re, self.im)


class CellModel(BaseModel):
    """One cell of a step function with its value."""
    lo: List[float]
    hi: List[float]
    re: float = 0.0
    im: float = 0.0

    @model_validator(mode="after")
    def _check_bounds(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi must have equal length")
        return self

    def to_cell(self) -> Cell:
        return Cell(self.lo, self.hi)


class StepFunctionModel(BaseModel):
    """Wire model of a step function."""
    dim: int = Field(default=1, ge=1)
    cells: List[CellModel] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_dimension(self):
        for i, cell in enumerate(self.cells):
            if len(cell.lo) != self.dim:
                raise ValueError(f"cell {i} has dimension {len(cell.lo)}, expected {self.dim}")
        return self

    def to_step_function(self) -> StepFunction:
        return StepFunction(
            [c.to_cell() for c in self.cells],
            [complex(c.re, c.im) for c in self.cells],
            dimension=self.dim,
        )

    @classmethod
    def from_step_function(cls, f: StepFunction) -> "StepFunctionModel":
        return cls(
            dim=f.dimension,
            cells=[
                CellModel(lo=list(c.lower), hi=list(c.upper), re=float(v.real), im=float(v.imag))
                for c, v in zip(f.cells, f.values)
            ],
        )


def step_function_from_json(data: Dict[str, Any]) -> StepFunction:
    """
    Parse a step function from decoded JSON.

    Raises:
        SchemaError: if the payload is malformed or the cells are invalid
    """
    try:
        return StepFunctionModel.model_validate(data).to_step_function()
    except ValidationError as e:
        raise SchemaError("invalid step function", {"errors": json.loads(e.json(include_url=False))})
    except QFockError as e:
        raise SchemaError(e.message, {"cause": e.kind, **e.details})


def step_function_to_json(f: StepFunction) -> Dict[str, Any]:
    return StepFunctionModel.from_step_function(f).model_dump()
