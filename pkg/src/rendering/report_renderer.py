"""
Report renderer for command output.

This module turns computation results into canonical JSON for stdout, CSV
tables for matrices and convergence runs, and rich console lines for the
selftest summary.
"""

import csv
import hashlib
import io
import json
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field
from rich.console import Console
from rich.text import Text

from src.utils.logger import setup_logger

logger = setup_logger("report_renderer")


class RunReport(BaseModel):
    """Envelope printed by every successful command."""
    command: str
    inputs_digest: str
    outputs: Any
    seed: Optional[int] = None
    timings_ms: Dict[str, float] = Field(default_factory=dict)


def complex_json(z: complex) -> Dict[str, float]:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def to_jsonable(value: Any) -> Any:
    """Recursively convert numpy scalars/arrays and complex numbers"""
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump())
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return complex_json(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def canonical_json(value: Any) -> str:
    """Key-sorted, compact JSON"""
    return json.dumps(to_jsonable(value), sort_keys=True, separators=(",", ":"))


def inputs_digest(inputs: Any) -> str:
    return hashlib.sha256(canonical_json(inputs).encode("utf-8")).hexdigest()


class ReportRenderer:
    """
    Renders command results in a consistent format.

    Responsibilities:
    - Format success reports as JSON
    - Format error reports as JSON
    - Format matrices and tables as CSV
    - Print selftest lines to the console
    """

    def __init__(self, console: Optional[Console] = None):
        """Initialize the report renderer"""
        self.logger = logger
        self.console = console or Console(stderr=False, highlight=False)

    def format_response(self, response: Dict[str, Any]) -> str:
        """
        Format a response dictionary.

        Args:
            response: RunReport dump or structured error dict

        Returns:
            JSON text
        """
        if response.get("status") == "error":
            return self._format_error(response)
        return canonical_json(response)

    def format_report(self, report: RunReport) -> str:
        return canonical_json(report)

    def _format_error(self, response: Dict[str, Any]) -> str:
        """Format an error response"""
        body = {
            "status": "error",
            "kind": response.get("kind", "error"),
            "error": response.get("error", "An unknown error occurred"),
            "details": response.get("details", {}),
        }
        return canonical_json(body)

    def matrix_csv(self, matrix) -> str:
        """One row per entry: i, j, re, im"""
        entries = np.asarray(matrix, dtype=complex)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["i", "j", "re", "im"])
        for (i, j), z in np.ndenumerate(entries):
            writer.writerow([i, j, repr(float(z.real)), repr(float(z.imag))])
        return buffer.getvalue()

    def table_csv(self, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return buffer.getvalue()

    def print_criteria(self, results: List[Any]) -> None:
        """Selftest summary: one PASS/FAIL line per criterion"""
        for result in results:
            line = Text(f"{result.number:>2} ")
            line.append("PASS" if result.passed else "FAIL", style="bold green" if result.passed else "bold red")
            line.append(f" {result.name} {canonical_json(result.measured)}")
            self.console.print(line, soft_wrap=True)
