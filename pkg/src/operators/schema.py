"""
JSON grammar for operators.

Discriminated on "op":
    {"op": "mult", "phi": <step function>}
    {"op": "gauge", "alpha": <step function with real values>}
    {"op": "rearrange", "pairs": [{"source": {"lo", "hi"}, "target": {...}}], "allow_unmapped": false}
    {"op": "average", "window": {"lo", "hi"}}
    {"op": "scalar_exp", "z": {"re", "im"}}
    {"op": "compose", "items": [...]}
"""

import json
from typing import Annotated, Any, Dict, List, Literal, Union

from pydantic import BaseModel, Field, TypeAdapter, ValidationError, model_validator

from src.algebra.schema import ComplexModel, StepFunctionModel
from src.algebra.step_function import Cell
from src.operators.spec import (
    Average,
    CellMap,
    Compose,
    Gauge,
    Mult,
    OperatorSpec,
    Rearrange,
    ScalarExp,
)
from src.utils.errors import QFockError, SchemaError


class BoxModel(BaseModel):
    lo: List[float]
    hi: List[float]

    @model_validator(mode="after")
    def _check_bounds(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi must have equal length")
        return self

    def to_cell(self) -> Cell:
        return Cell(self.lo, self.hi)

    @classmethod
    def of(cls, cell: Cell) -> "BoxModel":
        return cls(lo=list(cell.lower), hi=list(cell.upper))


class PairModel(BaseModel):
    source: BoxModel
    target: BoxModel


class MultModel(BaseModel):
    op: Literal["mult"]
    phi: StepFunctionModel

    def to_operator(self) -> OperatorSpec:
        return Mult(self.phi.to_step_function())


class GaugeModel(BaseModel):
    op: Literal["gauge"]
    alpha: StepFunctionModel

    def to_operator(self) -> OperatorSpec:
        return Gauge(self.alpha.to_step_function())


class RearrangeModel(BaseModel):
    op: Literal["rearrange"]
    pairs: List[PairModel] = Field(min_length=1)
    allow_unmapped: bool = False

    def to_operator(self) -> OperatorSpec:
        cell_map = CellMap(tuple((p.source.to_cell(), p.target.to_cell()) for p in self.pairs))
        return Rearrange(cell_map, allow_unmapped=self.allow_unmapped)


class AverageModel(BaseModel):
    op: Literal["average"]
    window: BoxModel

    def to_operator(self) -> OperatorSpec:
        return Average(self.window.to_cell())


class ScalarExpModel(BaseModel):
    op: Literal["scalar_exp"]
    z: ComplexModel

    def to_operator(self) -> OperatorSpec:
        return ScalarExp(self.z.to_complex())


class ComposeModel(BaseModel):
    op: Literal["compose"]
    items: List["OperatorModel"] = Field(min_length=1)

    def to_operator(self) -> OperatorSpec:
        return Compose(tuple(item.to_operator() for item in self.items))


OperatorModel = Annotated[
    Union[MultModel, GaugeModel, RearrangeModel, AverageModel, ScalarExpModel, ComposeModel],
    Field(discriminator="op"),
]

ComposeModel.model_rebuild()

_adapter = TypeAdapter(OperatorModel)


def operator_from_json(data: Dict[str, Any]) -> OperatorSpec:
    """
    Parse an operator from decoded JSON.

    Raises:
        SchemaError: if the payload is malformed or violates an operator invariant
    """
    try:
        return _adapter.validate_python(data).to_operator()
    except ValidationError as e:
        raise SchemaError("invalid operator", {"errors": json.loads(e.json(include_url=False))})
    except QFockError as e:
        raise SchemaError(e.message, {"cause": e.kind, **e.details})


def operator_to_json(T: OperatorSpec) -> Dict[str, Any]:
    if isinstance(T, Mult):
        return {"op": "mult", "phi": StepFunctionModel.from_step_function(T.phi).model_dump()}
    if isinstance(T, Gauge):
        return {"op": "gauge", "alpha": StepFunctionModel.from_step_function(T.alpha).model_dump()}
    if isinstance(T, Rearrange):
        return {
            "op": "rearrange",
            "pairs": [
                {"source": BoxModel.of(s).model_dump(), "target": BoxModel.of(t).model_dump()}
                for s, t in T.cell_map.pairs
            ],
            "allow_unmapped": T.allow_unmapped,
        }
    if isinstance(T, Average):
        return {"op": "average", "window": BoxModel.of(T.window).model_dump()}
    if isinstance(T, ScalarExp):
        return {"op": "scalar_exp", "z": ComplexModel.of(T.z).model_dump()}
    if isinstance(T, Compose):
        return {"op": "compose", "items": [operator_to_json(t) for t in T.items]}
    raise TypeError(f"unknown operator variant: {type(T).__name__}")
