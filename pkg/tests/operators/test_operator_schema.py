import pytest

from src.algebra.step_function import Cell, StepFunction
from src.operators.schema import operator_from_json, operator_to_json
from src.operators.spec import Average, CellMap, Compose, Gauge, Mult, Rearrange, ScalarExp
from src.utils.errors import SchemaError

HALF = {"dim": 1, "cells": [{"lo": [0.0], "hi": [0.5], "re": 0.7}]}


class TestOperatorSchema:
    def test_parse_compose(self):
        T = operator_from_json(
            {
                "op": "compose",
                "items": [
                    {"op": "gauge", "alpha": HALF},
                    {
                        "op": "rearrange",
                        "pairs": [
                            {"source": {"lo": [0.0], "hi": [0.5]}, "target": {"lo": [0.5], "hi": [1.0]}},
                            {"source": {"lo": [0.5], "hi": [1.0]}, "target": {"lo": [0.0], "hi": [0.5]}},
                        ],
                    },
                ],
            }
        )
        assert isinstance(T, Compose)
        assert [t.op for t in T.flatten()] == ["gauge", "rearrange"]
        assert T.is_well_defined()

    def test_variants(self):
        assert isinstance(operator_from_json({"op": "mult", "phi": HALF}), Mult)
        assert isinstance(operator_from_json({"op": "average", "window": {"lo": [0.0], "hi": [1.0]}}), Average)
        z = operator_from_json({"op": "scalar_exp", "z": {"re": -0.5, "im": 1.0}})
        assert z.z == complex(-0.5, 1.0)

    def test_serialized_form_parses_back(self, make_function):
        T = Compose(
            (
                ScalarExp(-0.25 + 0.5j),
                Gauge(StepFunction.indicator([0.0], [0.5], 1.2)),
                Rearrange(CellMap.swap(Cell([0.0], [0.5]), Cell([0.5], [1.0])), allow_unmapped=True),
                Mult(StepFunction.indicator([0.0], [1.0], 0.5j)),
                Average(Cell([0.0], [1.0])),
            )
        )
        data = operator_to_json(T)
        assert data["items"][2]["allow_unmapped"] is True
        f = make_function()
        assert operator_from_json(data).apply(f).equals(T.apply(f))

    @pytest.mark.parametrize(
        "payload, cause",
        [
            ({"op": "unknown"}, None),
            ({"op": "compose", "items": []}, None),
            ({"op": "average"}, None),
            ({"op": "gauge", "alpha": {"dim": 1, "cells": [{"lo": [0.0], "hi": [1.0], "im": 1.0}]}}, "invalid_operator"),
            (
                {"op": "rearrange", "pairs": [{"source": {"lo": [0.0], "hi": [1.0]}, "target": {"lo": [0.0], "hi": [0.5]}}]},
                "invalid_operator",
            ),
            ({"op": "average", "window": {"lo": [1.0], "hi": [0.0]}}, "invalid_cell"),
        ],
    )
    def test_invalid(self, payload, cause):
        with pytest.raises(SchemaError) as info:
            operator_from_json(payload)
        if cause is not None:
            assert info.value.details["cause"] == cause
