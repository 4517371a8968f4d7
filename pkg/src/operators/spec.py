"""
One-particle operators on step functions.

Each variant knows its pointwise action and the structural facts the
classifier needs: whether it maps the ‖·‖∞ ball into itself, whether it is
an L² contraction, and whether it has the multiplication-after-rearrangement
form that certifies Γ₂(T) as a contraction.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from src.algebra.step_function import (
    Cell,
    StepFunction,
    common_refinement,
    mul,
    norm_inf,
    overlap_matrix,
)
from src.utils.errors import DimensionMismatch, InvalidOperator, UnmappedSupport

# Relative slack for |source| == |target|
MEASURE_RTOL = 1e-12


def _measure_close(a: float, b: float, rtol: float) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def _check_disjoint(cells: Sequence[Cell], role: str) -> None:
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            if cells[i].intersect(cells[j]) is not None:
                raise InvalidOperator(
                    f"{role} cells overlap", {"role": role, "first": i, "second": j}
                )


@dataclass(frozen=True)
class CellMap:
    """
    Measure-preserving injective map of boxes.

    Each pair sends its source box onto its target box by the axis-wise
    affine map. Sources are pairwise disjoint, so are targets.
    """

    pairs: Tuple[Tuple[Cell, Cell], ...]
    rtol: float = field(default=MEASURE_RTOL, compare=False)

    def __post_init__(self):
        pairs = tuple((s, t) for s, t in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise InvalidOperator("cell map needs at least one pair")
        dimension = pairs[0][0].dimension
        for i, (source, target) in enumerate(pairs):
            if source.dimension != dimension or target.dimension != dimension:
                raise DimensionMismatch("cell map pairs must share a dimension", {"pair": i})
            if not _measure_close(source.measure, target.measure, self.rtol):
                raise InvalidOperator(
                    "cell map pair is not measure preserving",
                    {"pair": i, "source": source.measure, "target": target.measure},
                )
        _check_disjoint(self.sources, "source")
        _check_disjoint(self.targets, "target")

    @property
    def sources(self) -> Tuple[Cell, ...]:
        return tuple(s for s, _ in self.pairs)

    @property
    def targets(self) -> Tuple[Cell, ...]:
        return tuple(t for _, t in self.pairs)

    @property
    def dimension(self) -> int:
        return self.pairs[0][0].dimension

    def image(self, cell: Cell) -> List[Cell]:
        """Images of the pieces of ``cell`` lying inside some source"""
        images = []
        for source, target in self.pairs:
            piece = cell.intersect(source)
            if piece is not None:
                images.append(source.affine_to(target, piece))
        return images

    @classmethod
    def identity(cls, cells: Sequence[Cell]) -> "CellMap":
        return cls(tuple((c, c) for c in cells))

    @classmethod
    def swap(cls, a: Cell, b: Cell) -> "CellMap":
        return cls(((a, b), (b, a)))

    @classmethod
    def shift(cls, cells: Sequence[Cell], offset: Sequence[float]) -> "CellMap":
        """Translate every cell by ``offset``"""
        offset = np.atleast_1d(np.asarray(offset, dtype=float))
        return cls(
            tuple(
                (c, Cell(np.add(c.lower, offset), np.add(c.upper, offset))) for c in cells
            )
        )


class OperatorSpec:
    """Base class of the operator variants."""

    op = "operator"

    def apply(self, f: StepFunction) -> StepFunction:
        raise NotImplementedError

    def is_well_defined(self) -> bool:
        """T maps the ‖·‖∞ unit ball into itself"""
        raise NotImplementedError

    def is_l2_contraction(self) -> bool:
        raise NotImplementedError

    def has_contraction_form(self) -> bool:
        """T is a factor of the form M_φ T₁ with ‖φ‖∞ <= 1"""
        return False

    def flatten(self) -> List["OperatorSpec"]:
        return [self]

    def referenced_cells(self) -> List[Cell]:
        return []

    def cell_maps(self) -> List[CellMap]:
        return []

    def __call__(self, f: StepFunction) -> StepFunction:
        return self.apply(f)


@dataclass(frozen=True, eq=False)
class Mult(OperatorSpec):
    """f ↦ φ·f"""

    phi: StepFunction
    op = "mult"

    def apply(self, f: StepFunction) -> StepFunction:
        return mul(self.phi, f)

    def is_well_defined(self) -> bool:
        return norm_inf(self.phi) <= 1.0

    def is_l2_contraction(self) -> bool:
        return norm_inf(self.phi) <= 1.0

    def has_contraction_form(self) -> bool:
        return norm_inf(self.phi) <= 1.0

    def referenced_cells(self) -> List[Cell]:
        return list(self.phi.cells)


@dataclass(frozen=True, eq=False)
class Gauge(OperatorSpec):
    """f ↦ e^{iα} f, with α = 0 outside its cells"""

    alpha: StepFunction
    op = "gauge"

    def __post_init__(self):
        if np.any(self.alpha.values.imag != 0.0):
            raise InvalidOperator("gauge phase must be real")

    def apply(self, f: StepFunction) -> StepFunction:
        ref = common_refinement(self.alpha, f)
        keep = ref.index_b >= 0
        values = ref.values_b[keep] * np.exp(1j * ref.values_a[keep].real)
        cells = [c for c, k in zip(ref.cells, keep) if k]
        return StepFunction(cells, values, dimension=f.dimension)

    def is_well_defined(self) -> bool:
        return True

    def is_l2_contraction(self) -> bool:
        return True

    def has_contraction_form(self) -> bool:
        return True

    def referenced_cells(self) -> List[Cell]:
        return list(self.alpha.cells)


@dataclass(frozen=True, eq=False)
class Rearrange(OperatorSpec):
    """
    Discrete *-endomorphism χ_I ↦ χ_{τ(I)}.

    Support outside the sources raises UnmappedSupport unless
    ``allow_unmapped`` is set, in which case it is sent to zero.
    """

    cell_map: CellMap
    allow_unmapped: bool = False
    op = "rearrange"

    def apply(self, f: StepFunction) -> StepFunction:
        if f.dimension != self.cell_map.dimension:
            raise DimensionMismatch(
                "dimension mismatch", {"left": self.cell_map.dimension, "right": f.dimension}
            )
        cells: List[Cell] = []
        values: List[complex] = []
        for index, (cell, value) in enumerate(zip(f.cells, f.values)):
            covered = 0.0
            for source, target in self.cell_map.pairs:
                piece = cell.intersect(source)
                if piece is None:
                    continue
                covered += piece.measure
                cells.append(source.affine_to(target, piece))
                values.append(value)
            if value != 0 and not self.allow_unmapped and covered < cell.measure * (1.0 - MEASURE_RTOL):
                raise UnmappedSupport(
                    "function support lies outside the rearrangement sources",
                    {"cell": index, "unmapped_measure": cell.measure - covered},
                )
        return StepFunction(cells, values, dimension=f.dimension)

    def is_well_defined(self) -> bool:
        return True

    def is_l2_contraction(self) -> bool:
        return True

    def has_contraction_form(self) -> bool:
        return True

    def referenced_cells(self) -> List[Cell]:
        return list(self.cell_map.sources) + list(self.cell_map.targets)

    def cell_maps(self) -> List[CellMap]:
        return [self.cell_map]


@dataclass(frozen=True, eq=False)
class Average(OperatorSpec):
    """f ↦ (|W|⁻¹ ∫_W f) χ_W"""

    window: Cell
    op = "average"

    def apply(self, f: StepFunction) -> StepFunction:
        w = StepFunction((self.window,), (1.0,), dimension=self.window.dimension)
        overlap = overlap_matrix(w, f)
        mean = complex(overlap[0] @ f.values) / self.window.measure if len(f) else 0j
        return StepFunction((self.window,), (mean,), dimension=f.dimension)

    def is_well_defined(self) -> bool:
        return True

    def is_l2_contraction(self) -> bool:
        return True

    def referenced_cells(self) -> List[Cell]:
        return [self.window]


@dataclass(frozen=True, eq=False)
class ScalarExp(OperatorSpec):
    """f ↦ e^z f"""

    z: complex
    op = "scalar_exp"

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))

    def apply(self, f: StepFunction) -> StepFunction:
        return f.scale(np.exp(self.z))

    def is_well_defined(self) -> bool:
        return self.z.real <= 0.0

    def is_l2_contraction(self) -> bool:
        return self.z.real <= 0.0

    def has_contraction_form(self) -> bool:
        return self.z.real <= 0.0


@dataclass(frozen=True, eq=False)
class Compose(OperatorSpec):
    """Product items[0] ∘ items[1] ∘ ... (the last item acts first)"""

    items: Tuple[OperatorSpec, ...]
    op = "compose"

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise InvalidOperator("compose needs at least one operator")

    def apply(self, f: StepFunction) -> StepFunction:
        for item in reversed(self.items):
            f = item.apply(f)
        return f

    def is_well_defined(self) -> bool:
        return all(t.is_well_defined() for t in self.flatten())

    def is_l2_contraction(self) -> bool:
        return all(t.is_l2_contraction() for t in self.flatten())

    def has_contraction_form(self) -> bool:
        return all(t.has_contraction_form() for t in self.flatten())

    def flatten(self) -> List[OperatorSpec]:
        return [t for item in self.items for t in item.flatten()]

    def referenced_cells(self) -> List[Cell]:
        return [c for t in self.flatten() for c in t.referenced_cells()]

    def cell_maps(self) -> List[CellMap]:
        return [m for t in self.flatten() for m in t.cell_maps()]


def identity() -> OperatorSpec:
    return ScalarExp(0j)


def apply(T: OperatorSpec, f: StepFunction) -> StepFunction:
    return T.apply(f)


def is_well_defined_gamma2(T: OperatorSpec) -> bool:
    """Structural test that T maps the ‖·‖∞ unit ball into itself"""
    return T.is_well_defined()
