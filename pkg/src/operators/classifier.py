"""
Classification of Γ₂(T) and the constructive structure theorem.

Isometries of the quadratic Fock space come from operators of the form
e^{iα}·(rearrangement). On a finite cell basis this module recovers α and
the rearrangement from the matrix of T, or names the first property that
rules the form out:

    C   a column is not unimodular on its support
    D   a column's support does not have the measure of its cell
    E   two columns have overlapping supports
    FG  the reconstructed operator does not reproduce T
"""

from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.algebra.step_function import (
    Cell,
    StepFunction,
    common_refinement,
    inner_pow,
    norm_inf,
    norm_p,
    refine_cells,
)
from src.operators.spec import CellMap, Compose, Gauge, OperatorSpec, Rearrange
from src.utils.errors import NotRepresentable, QFockError, UnmappedSupport
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

MOMENT_TOL = 1e-10
UNIMODULAR_TOL = 1e-10
# Relative slack for slab and support measures; widths carry rounding of order 1e-16/width
SLAB_RTOL = 1e-9
MAX_CLOSURE_ROUNDS = 16
# Decomposition failures that rule out an isometry outright
STRUCTURAL_LEMMAS = ("C", "D", "E")


class MomentFailure(NamedTuple):
    k: int
    index: int
    expected: complex
    actual: complex


class MomentCheck(NamedTuple):
    passed: bool
    failure: Optional[MomentFailure]


def moment_isometry_check(
    T: OperatorSpec,
    samples: Sequence[Tuple[StepFunction, StepFunction]],
    K: int,
    tol: float = MOMENT_TOL,
) -> MomentCheck:
    """
    Check ⟨(Tf)^k, (Tg)^k⟩ == ⟨f^k, g^k⟩ for k = 1..K on every sample pair.

    Failures are reported for the first sample (in input order), then the
    smallest k.
    """
    if K < 1:
        raise ValueError(f"K must be at least 1, got {K}")
    for index, (f, g) in enumerate(samples):
        tf, tg = T.apply(f), T.apply(g)
        for k in range(1, K + 1):
            expected = inner_pow(f, g, k)
            actual = inner_pow(tf, tg, k)
            if abs(actual - expected) > tol * max(1.0, abs(expected)):
                return MomentCheck(False, MomentFailure(k, index, expected, actual))
    return MomentCheck(True, None)


class DiscreteOperator:
    """
    Matrix of T on a cell basis.

    ``matrix[j, i]`` is the value of T(χ_{columns[i]}) on ``rows[j]``;
    ``columns`` holds indices into ``rows`` (the cells in T's domain).
    """

    def __init__(self, rows: Sequence[Cell], columns: Sequence[int], matrix):
        self.rows: Tuple[Cell, ...] = tuple(rows)
        self.columns: Tuple[int, ...] = tuple(int(i) for i in columns)
        self.matrix = np.array(matrix, dtype=complex).reshape(len(self.rows), len(self.columns))

    @property
    def row_measures(self) -> np.ndarray:
        return np.array([c.measure for c in self.rows], dtype=float)

    def column_cell(self, i: int) -> Cell:
        return self.rows[self.columns[i]]

    def column_function(self, i: int) -> StepFunction:
        """T(χ_I) as a step function on the rows"""
        return StepFunction(self.rows, self.matrix[:, i], dimension=self.rows[0].dimension)

    def __repr__(self) -> str:
        return "DiscreteOperator(rows=%d, columns=%d)" % (len(self.rows), len(self.columns))


def _snap(cell: Cell, breakpoints: List[np.ndarray]) -> Cell:
    """Move coordinates within rounding distance onto existing breakpoints"""
    def nearest(x: float, axis: int) -> float:
        points = breakpoints[axis]
        if points.size == 0:
            return x
        k = int(np.argmin(np.abs(points - x)))
        return float(points[k]) if abs(points[k] - x) <= 1e-12 * max(1.0, abs(x)) else x

    lo = [nearest(x, a) for a, x in enumerate(cell.lower)]
    hi = [nearest(x, a) for a, x in enumerate(cell.upper)]
    return Cell(lo, hi)


def working_partition(T: OperatorSpec, functions: Sequence[StepFunction]) -> List[Cell]:
    """
    Disjoint boxes refining the sample cells and every cell T references,
    closed under the images of T's rearrangements.

    Raises:
        NotRepresentable: if there is nothing to partition or the closure
            does not stabilize
    """
    cells = [c for f in functions for c in f.cells] + T.referenced_cells()
    if not cells:
        raise NotRepresentable("no cells to build a working partition from")
    partition = refine_cells(cells)
    maps = T.cell_maps()
    d = partition[0].dimension
    for _ in range(MAX_CLOSURE_ROUNDS):
        breakpoints = [
            np.unique([x for c in partition for x in (c.lower[a], c.upper[a])]) for a in range(d)
        ]
        images = [
            _snap(image, breakpoints)
            for cell_map in maps
            for box in partition
            for image in cell_map.image(box)
        ]
        refined = refine_cells(partition + images)
        if set(refined) == set(partition):
            return refined
        partition = refined
    raise NotRepresentable(
        "working partition does not close under the rearrangements",
        {"rounds": MAX_CLOSURE_ROUNDS, "cells": len(partition)},
    )


def _represent(image: StepFunction, rows: Sequence[Cell], tol: float) -> np.ndarray:
    """Values of ``image`` on the rows, which it must be constant on"""
    d = rows[0].dimension
    labels = StepFunction(rows, np.arange(len(rows)), dimension=d)
    ref = common_refinement(image, labels)
    measures = ref.measures
    outside = ref.index_b < 0
    if np.sum(measures[outside] * np.abs(ref.values_a[outside])) > tol * max(1.0, np.sum(measures)):
        raise NotRepresentable("operator image leaves the cell basis")
    column = np.zeros(len(rows), dtype=complex)
    for j, row in enumerate(rows):
        inside = ref.index_b == j
        weights = measures[inside]
        values = ref.values_a[inside]
        mean = complex(weights @ values) / row.measure
        deviation = float(weights @ np.abs(values - mean)) / row.measure
        if deviation > tol:
            raise NotRepresentable(
                "operator image is not constant on a basis cell",
                {"row": j, "deviation": deviation},
            )
        column[j] = mean
    return column


def operator_matrix(
    T: OperatorSpec,
    basis: Sequence[Cell],
    columns: Optional[Sequence[int]] = None,
    tol: float = UNIMODULAR_TOL,
) -> DiscreteOperator:
    """
    Matrix of T on ``basis``.

    When ``columns`` is omitted the domain is every basis cell that T can be
    applied to without leaving its rearrangement sources.

    Raises:
        NotRepresentable: if some T(χ_I) is not a step function on the basis
    """
    basis = list(basis)
    if not basis:
        raise NotRepresentable("empty cell basis")
    d = basis[0].dimension
    candidates = range(len(basis)) if columns is None else columns
    kept: List[int] = []
    entries: List[np.ndarray] = []
    for i in candidates:
        chi = StepFunction((basis[i],), (1.0,), dimension=d)
        try:
            image = T.apply(chi)
        except UnmappedSupport:
            if columns is not None:
                raise
            continue
        entries.append(_represent(image, basis, tol))
        kept.append(i)
    if not kept:
        raise NotRepresentable("no basis cell lies in the operator's domain")
    matrix = np.stack(entries, axis=1)
    return DiscreteOperator(basis, kept, matrix)


class NotIsometry(NamedTuple):
    lemma: str
    cells: Tuple[int, ...]
    residual: float


class IsometryDecomposition(NamedTuple):
    alpha: StepFunction
    cell_map: CellMap
    residual: float
    surjective: bool

    def operator(self) -> OperatorSpec:
        """Gauge(α) ∘ Rearrange(τ)"""
        return Compose((Gauge(self.alpha), Rearrange(self.cell_map)))


def _split_along_first_axis(cell: Cell, measures: np.ndarray) -> List[Cell]:
    """Slabs of ``cell`` with widths proportional to ``measures``"""
    if measures.size == 1:
        return [cell]
    lo, hi = cell.lower[0], cell.upper[0]
    cuts = lo + (hi - lo) * np.cumsum(measures)[:-1] / np.sum(measures)
    bounds = [lo] + [float(x) for x in cuts] + [hi]
    slabs = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        slabs.append(Cell((a,) + cell.lower[1:], (b,) + cell.upper[1:]))
    return slabs


def decompose_isometry(
    op: DiscreteOperator, tol: float = UNIMODULAR_TOL
) -> Union[IsometryDecomposition, NotIsometry]:
    """
    Recover the phase α and the cell map τ with T = e^{iα}·Rearrange(τ).

    α is the phase of T(χ_I) on each row it covers and 0 on rows no column
    reaches. τ splits each column cell along its first axis into slabs, one
    per covered row, each sent affinely onto its row.
    """
    m = op.matrix
    row_measures = op.row_measures
    magnitude = np.abs(m)
    support = magnitude > tol

    for i in range(m.shape[1]):
        rows = np.flatnonzero(support[:, i])
        gap = np.abs(magnitude[rows, i] - 1.0)
        if gap.size and np.max(gap) > tol:
            j = int(rows[np.argmax(gap)])
            return NotIsometry("C", (i, j), float(np.max(gap)))

    for i in range(m.shape[1]):
        covered = float(np.sum(row_measures[support[:, i]]))
        measure = op.column_cell(i).measure
        if abs(covered - measure) > SLAB_RTOL * max(covered, measure):
            return NotIsometry("D", (i,), abs(covered - measure))

    owner = np.full(m.shape[0], -1, dtype=int)
    for i in range(m.shape[1]):
        for j in np.flatnonzero(support[:, i]):
            if owner[j] >= 0:
                return NotIsometry("E", (int(owner[j]), i), float(row_measures[j]))
            owner[j] = i

    d = op.rows[0].dimension
    phases = np.zeros(m.shape[0])
    pairs = []
    for i in range(m.shape[1]):
        rows = np.flatnonzero(support[:, i])
        phases[rows] = np.angle(m[rows, i])
        slabs = _split_along_first_axis(op.column_cell(i), row_measures[rows])
        pairs.extend((slab, op.rows[j]) for slab, j in zip(slabs, rows))
    alpha = StepFunction(op.rows, phases, dimension=d)
    cell_map = CellMap(tuple(pairs), rtol=SLAB_RTOL)
    surjective = bool(np.all(owner >= 0))

    candidate = IsometryDecomposition(alpha, cell_map, 0.0, surjective)
    try:
        rebuilt = operator_matrix(candidate.operator(), op.rows, columns=op.columns, tol=tol)
    except QFockError as e:
        logger.info(f"Reconstruction failed: {e.message}")
        return NotIsometry("FG", tuple(range(m.shape[1])), float("inf"))
    residuals = np.max(np.abs(rebuilt.matrix - m), axis=0)
    worst = int(np.argmax(residuals))
    if residuals[worst] > tol:
        return NotIsometry("FG", (worst,), float(residuals[worst]))
    return candidate._replace(residual=float(residuals[worst]))


class Evidence(BaseModel):
    """Witness record attached to a classification."""
    kind: str
    details: Dict[str, Any] = Field(default_factory=dict)


class Classification(BaseModel):
    """Properties of Γ₂(T) derived from T."""
    well_defined: bool
    isometry: bool
    unitary: bool
    contraction_sufficient: bool
    necessary_ok: bool
    evidence: List[Evidence] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_implications(self):
        if self.unitary and not self.isometry:
            raise ValueError("unitary classification must also be isometric")
        if self.isometry and not self.well_defined:
            raise ValueError("isometric classification must also be well defined")
        return self


def _complex_dict(z: complex) -> Dict[str, float]:
    return {"re": float(np.real(z)), "im": float(np.imag(z))}


def _sampled_contractivity(
    T: OperatorSpec, functions: Sequence[StepFunction], tol: float
) -> Optional[Evidence]:
    """First sample with ‖Tf‖₂ > ‖f‖₂ or ‖Tf‖∞ > ‖f‖∞, if any"""
    for index, f in enumerate(functions):
        tf = T.apply(f)
        for name, norm in (("l2", lambda h: norm_p(h, 2)), ("linf", norm_inf)):
            before, after = norm(f), norm(tf)
            if after > before * (1.0 + tol) + tol:
                return Evidence(
                    kind="norm_growth",
                    details={"norm": name, "sample": index, "before": before, "after": after},
                )
    return None


def _bisect(cell: Cell) -> Tuple[Cell, Cell]:
    """Halves of ``cell`` along its first axis"""
    lo, hi = cell.lower[0], cell.upper[0]
    mid = 0.5 * (lo + hi)
    return (
        Cell((lo,) + cell.lower[1:], (mid,) + cell.upper[1:]),
        Cell((mid,) + cell.lower[1:], (hi,) + cell.upper[1:]),
    )


def partition_probes(
    T: OperatorSpec, basis: Sequence[Cell]
) -> List[Tuple[StepFunction, StepFunction]]:
    """
    Indicator pairs on the halves of the basis cells in T's domain.

    Each half h gives (χ_h, χ_h) and (χ_h, χ_U), U the union of all halves.
    Halving exposes operators that fix the basis cells but mix values
    inside them (Average on its own window); pairing with χ_U exposes
    halves sent onto overlapping supports.
    """
    halves: List[StepFunction] = []
    for cell in basis:
        for half in _bisect(cell):
            chi = StepFunction((half,), (1.0,), dimension=half.dimension)
            try:
                T.apply(chi)
            except UnmappedSupport:
                continue
            halves.append(chi)
    if not halves:
        return []
    union = StepFunction([h.cells[0] for h in halves], np.ones(len(halves)), dimension=halves[0].dimension)
    return [pair for h in halves for pair in ((h, h), (h, union))]


def _moment_evidence(failure: MomentFailure, source: str, index: int) -> Evidence:
    return Evidence(
        kind="moment",
        details={
            "k": failure.k,
            "source": source,
            "sample": index,
            "expected": _complex_dict(failure.expected),
            "actual": _complex_dict(failure.actual),
        },
    )


def classify(
    T: OperatorSpec,
    samples: Sequence[Tuple[StepFunction, StepFunction]],
    K: int = 4,
    tol: float = MOMENT_TOL,
) -> Classification:
    """
    Classify Γ₂(T).

    well_defined, contraction_sufficient and the L²/L∞ part of necessary_ok
    are structural. isometry needs at least one sample pair, the moment
    check on the samples and on indicator pairs of the halved working
    partition, and no structural refutation (C, D, E) from the
    decomposition. unitary additionally needs a surjective cell map.
    """
    evidence: List[Evidence] = []
    well_defined = T.is_well_defined()
    functions = [h for pair in samples for h in pair]

    moments_ok = False
    sampled_ok = True
    basis: Optional[List[Cell]] = None
    if not samples:
        evidence.append(Evidence(kind="inconclusive", details={"reason": "no sample pairs"}))
    else:
        sampled_passed = False
        try:
            moments = moment_isometry_check(T, samples, K, tol=tol)
            sampled_passed = moments.passed
            if moments.failure is not None:
                evidence.append(_moment_evidence(moments.failure, "sample", moments.failure.index))
            growth = _sampled_contractivity(T, functions, tol)
            if growth is not None:
                sampled_ok = False
                evidence.append(growth)
        except QFockError as e:
            sampled_ok = False
            evidence.append(Evidence(kind=e.kind, details={"error": e.message, **e.details}))

        if sampled_passed and well_defined:
            try:
                basis = working_partition(T, functions)
                probes = moment_isometry_check(T, partition_probes(T, basis), K, tol=tol)
                if probes.failure is not None:
                    evidence.append(_moment_evidence(probes.failure, "partition", probes.failure.index))
                moments_ok = probes.passed
            except QFockError as e:
                evidence.append(Evidence(kind=e.kind, details={"error": e.message, **e.details}))

    isometry = well_defined and moments_ok
    unitary = False
    if isometry:
        try:
            result = decompose_isometry(operator_matrix(T, basis, tol=tol), tol=tol)
            if isinstance(result, NotIsometry):
                evidence.append(
                    Evidence(
                        kind="decomposition",
                        details={"lemma": result.lemma, "cells": list(result.cells), "residual": result.residual},
                    )
                )
                if result.lemma in STRUCTURAL_LEMMAS:
                    isometry = False
            else:
                unitary = result.surjective
                if not unitary:
                    evidence.append(Evidence(kind="not_surjective", details={"cells": len(basis)}))
        except QFockError as e:
            evidence.append(Evidence(kind=e.kind, details={"error": e.message, **e.details}))

    classification = Classification(
        well_defined=well_defined,
        isometry=isometry,
        unitary=unitary,
        contraction_sufficient=T.has_contraction_form(),
        necessary_ok=well_defined and T.is_l2_contraction() and sampled_ok,
        evidence=evidence,
    )
    logger.info(
        f"Classified {T.op}: well_defined={well_defined} isometry={isometry} unitary={unitary}"
    )
    return classification
