"""
Step functions on R^d.

This module provides the computational stand-in for the test-function
algebra L2(R^d) ∩ L∞(R^d): complex step functions supported on finitely many
pairwise disjoint, axis-aligned, half-open boxes. Pointwise algebra, integrals
and norms are exact sums over cells.
"""

from itertools import product
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.utils.errors import DimensionMismatch, InvalidCell, OverlappingCells


class Cell:
    """
    Half-open box [lower, upper) in R^d.

    Cells are immutable; ``measure`` is the product of the side lengths.
    """

    __slots__ = ("_lower", "_upper", "_measure")

    def __init__(self, lower: Iterable[float], upper: Iterable[float]):
        lo = tuple(float(x) for x in np.atleast_1d(np.asarray(lower, dtype=float)))
        hi = tuple(float(x) for x in np.atleast_1d(np.asarray(upper, dtype=float)))
        if len(lo) != len(hi) or not lo:
            raise InvalidCell(
                "Cell bounds must be non-empty and of equal length",
                {"lower": list(lo), "upper": list(hi)},
            )
        if not all(np.isfinite(lo)) or not all(np.isfinite(hi)):
            raise InvalidCell("Cell bounds must be finite", {"lower": list(lo), "upper": list(hi)})
        if any(a >= b for a, b in zip(lo, hi)):
            raise InvalidCell(
                "Cell requires lower[i] < upper[i] on every axis",
                {"lower": list(lo), "upper": list(hi)},
            )
        object.__setattr__(self, "_lower", lo)
        object.__setattr__(self, "_upper", hi)
        object.__setattr__(self, "_measure", float(np.prod(np.subtract(hi, lo))))

    def __setattr__(self, name, value):
        raise AttributeError("Cell is immutable")

    @property
    def lower(self) -> Tuple[float, ...]:
        return self._lower

    @property
    def upper(self) -> Tuple[float, ...]:
        return self._upper

    @property
    def measure(self) -> float:
        return self._measure

    @property
    def dimension(self) -> int:
        return len(self._lower)

    @property
    def sides(self) -> Tuple[float, ...]:
        return tuple(b - a for a, b in zip(self._lower, self._upper))

    def intersect(self, other: "Cell") -> Optional["Cell"]:
        """Intersection with another cell, or None when it has empty interior"""
        _check_dimension(self.dimension, other.dimension)
        lo = [max(a, b) for a, b in zip(self._lower, other._lower)]
        hi = [min(a, b) for a, b in zip(self._upper, other._upper)]
        if any(a >= b for a, b in zip(lo, hi)):
            return None
        return Cell(lo, hi)

    def affine_to(self, target: "Cell", sub: "Cell") -> "Cell":
        """
        Image of ``sub`` (a sub-box of this cell) under the axis-wise affine
        map sending this cell onto ``target``.
        """
        lo, hi = [], []
        for a, b, ta, tb, sa, sb in zip(
            self._lower, self._upper, target._lower, target._upper, sub._lower, sub._upper
        ):
            scale = (tb - ta) / (b - a)
            # shared faces map exactly onto the target faces
            lo.append(ta if sa == a else ta + (sa - a) * scale)
            hi.append(tb if sb == b else ta + (sb - a) * scale)
        return Cell(lo, hi)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cell):
            return NotImplemented
        return self._lower == other._lower and self._upper == other._upper

    def __hash__(self) -> int:
        return hash((self._lower, self._upper))

    def __repr__(self) -> str:
        return "Cell(lower=%r, upper=%r)" % (list(self._lower), list(self._upper))


class StepFunction:
    """
    Complex step function on pairwise disjoint cells, zero elsewhere.

    Cells with value exactly zero may be present; they are invisible to
    norms and integrals but still mark a domain (e.g. for rearrangements).
    """

    __slots__ = ("_cells", "_values", "_lower", "_upper", "_measures", "_dimension")

    def __init__(
        self,
        cells: Sequence[Cell],
        values: Sequence[complex],
        dimension: Optional[int] = None,
    ):
        cells = tuple(cells)
        values = np.array(values, dtype=complex).reshape(-1)
        if len(cells) != values.shape[0]:
            raise InvalidCell(
                "cells and values must have equal length",
                {"cells": len(cells), "values": int(values.shape[0])},
            )
        if dimension is None:
            dimension = cells[0].dimension if cells else 1
        if dimension < 1:
            raise InvalidCell("dimension must be positive", {"dimension": dimension})
        for cell in cells:
            _check_dimension(dimension, cell.dimension)
        if not np.all(np.isfinite(values)):
            raise InvalidCell("values must be finite")

        if cells:
            lower = np.array([c.lower for c in cells], dtype=float)
            upper = np.array([c.upper for c in cells], dtype=float)
        else:
            lower = np.zeros((0, dimension))
            upper = np.zeros((0, dimension))

        overlap = _overlap_measures(lower, upper, lower, upper)
        np.fill_diagonal(overlap, 0.0)
        if np.any(overlap > 0.0):
            i, j = np.argwhere(overlap > 0.0)[0]
            raise OverlappingCells(
                "Cells overlap in their interiors",
                {"first": int(i), "second": int(j), "overlap": float(overlap[i, j])},
            )

        values.setflags(write=False)
        lower.setflags(write=False)
        upper.setflags(write=False)
        measures = np.array([c.measure for c in cells], dtype=float)
        measures.setflags(write=False)

        object.__setattr__(self, "_cells", cells)
        object.__setattr__(self, "_values", values)
        object.__setattr__(self, "_lower", lower)
        object.__setattr__(self, "_upper", upper)
        object.__setattr__(self, "_measures", measures)
        object.__setattr__(self, "_dimension", int(dimension))

    def __setattr__(self, name, value):
        raise AttributeError("StepFunction is immutable")

    # -- constructors -- #

    @classmethod
    def zero(cls, dimension: int = 1) -> "StepFunction":
        return cls((), (), dimension=dimension)

    @classmethod
    def indicator(
        cls, lower: Iterable[float], upper: Iterable[float], value: complex = 1.0
    ) -> "StepFunction":
        """``value`` times the indicator of the box [lower, upper)"""
        cell = Cell(lower, upper)
        return cls((cell,), (value,), dimension=cell.dimension)

    @classmethod
    def from_breaks(cls, breaks: Sequence[float], values: Sequence[complex]) -> "StepFunction":
        """1-D step function with value ``values[i]`` on [breaks[i], breaks[i+1])"""
        if len(breaks) != len(values) + 1:
            raise InvalidCell(
                "need one more break than values",
                {"breaks": len(breaks), "values": len(values)},
            )
        cells = [Cell([a], [b]) for a, b in zip(breaks[:-1], breaks[1:])]
        return cls(cells, values, dimension=1)

    # -- accessors -- #

    @property
    def cells(self) -> Tuple[Cell, ...]:
        return self._cells

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    def measures(self) -> np.ndarray:
        return self._measures

    @property
    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        """Lower and upper corners as (n, d) arrays"""
        return self._lower, self._upper

    def __len__(self) -> int:
        return len(self._cells)

    def is_zero(self) -> bool:
        return not np.any(self._values != 0)

    def support_measure(self) -> float:
        """Measure of the set where the function is non-zero"""
        return float(np.sum(self._measures[self._values != 0]))

    def domain_measure(self) -> float:
        """Measure of all listed cells, zero-valued ones included"""
        return float(np.sum(self._measures))

    def __call__(self, x: Iterable[float]) -> complex:
        point = np.atleast_1d(np.asarray(x, dtype=float))
        if point.shape[0] != self._dimension:
            raise DimensionMismatch(
                "point has wrong dimension",
                {"expected": self._dimension, "got": int(point.shape[0])},
            )
        if not np.isfinite(point).all():
            raise ValueError("x must be finite")
        inside = np.all((self._lower <= point) & (point < self._upper), axis=1)
        hits = np.flatnonzero(inside)
        return complex(self._values[hits[0]]) if hits.size else 0j

    def scale(self, z: complex) -> "StepFunction":
        """The function z·f"""
        return StepFunction(self._cells, self._values * complex(z), dimension=self._dimension)

    def map_values(self, fn) -> "StepFunction":
        """Apply ``fn`` to the value array, keeping cells"""
        return StepFunction(self._cells, fn(np.array(self._values)), dimension=self._dimension)

    def equals(self, other: "StepFunction", tol: float = 0.0) -> bool:
        """Pointwise a.e. equality up to ``tol`` on the common refinement"""
        ref = common_refinement(self, other)
        if not ref.cells:
            return True
        return bool(np.max(np.abs(ref.values_a - ref.values_b)) <= tol)

    def __repr__(self) -> str:
        parts = ", ".join(
            "%r: %r" % ((list(c.lower), list(c.upper)), complex(v))
            for c, v in zip(self._cells, self._values)
        )
        return "StepFunction(dim=%d, {%s})" % (self._dimension, parts)


class Refinement:
    """
    Common refinement of two step functions.

    ``index_a[i]`` (resp. ``index_b[i]``) is the cell of the first (second)
    input containing refined cell ``i``, or -1 when it lies outside.
    """

    __slots__ = ("cells", "values_a", "values_b", "index_a", "index_b")

    def __init__(self, cells, values_a, values_b, index_a, index_b):
        self.cells: Tuple[Cell, ...] = tuple(cells)
        self.values_a = np.asarray(values_a, dtype=complex)
        self.values_b = np.asarray(values_b, dtype=complex)
        self.index_a = np.asarray(index_a, dtype=int)
        self.index_b = np.asarray(index_b, dtype=int)

    @property
    def measures(self) -> np.ndarray:
        return np.array([c.measure for c in self.cells], dtype=float)

    def function_a(self, dimension: int) -> StepFunction:
        keep = self.index_a >= 0
        return StepFunction(
            [c for c, k in zip(self.cells, keep) if k], self.values_a[keep], dimension=dimension
        )


def _check_dimension(a: int, b: int) -> None:
    if a != b:
        raise DimensionMismatch("dimension mismatch", {"left": int(a), "right": int(b)})


def _overlap_measures(lo_a, hi_a, lo_b, hi_b) -> np.ndarray:
    """Matrix of intersection measures between two families of boxes"""
    if lo_a.shape[0] == 0 or lo_b.shape[0] == 0:
        return np.zeros((lo_a.shape[0], lo_b.shape[0]))
    lo = np.maximum(lo_a[:, None, :], lo_b[None, :, :])
    hi = np.minimum(hi_a[:, None, :], hi_b[None, :, :])
    return np.prod(np.clip(hi - lo, 0.0, None), axis=2)


def overlap_matrix(f: StepFunction, g: StepFunction) -> np.ndarray:
    """Measures |I_i ∩ J_j| for the cells I of f and J of g"""
    _check_dimension(f.dimension, g.dimension)
    lo_f, hi_f = f.bounds
    lo_g, hi_g = g.bounds
    return _overlap_measures(lo_f, hi_f, lo_g, hi_g)


def _locate(lower: np.ndarray, upper: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Index of the box containing each point, -1 if none"""
    if lower.shape[0] == 0:
        return np.full(points.shape[0], -1, dtype=int)
    inside = np.all(
        (lower[None, :, :] <= points[:, None, :]) & (points[:, None, :] < upper[None, :, :]),
        axis=2,
    )
    found = inside.any(axis=1)
    return np.where(found, inside.argmax(axis=1), -1)


def _face_grid(lows: np.ndarray, highs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Boxes of the grid generated by every face of the given boxes"""
    d = lows.shape[1]
    axes = [np.unique(np.concatenate([lows[:, a], highs[:, a]])) for a in range(d)]
    grid = list(product(*[range(len(b) - 1) for b in axes]))
    grid_lo = np.array([[axes[a][idx[a]] for a in range(d)] for idx in grid], dtype=float)
    grid_hi = np.array([[axes[a][idx[a] + 1] for a in range(d)] for idx in grid], dtype=float)
    return grid_lo, grid_hi


def refine_cells(cells: Sequence[Cell]) -> List[Cell]:
    """
    Disjoint boxes covering the union of possibly overlapping ``cells`` such
    that every input cell is a union of output boxes.
    """
    if not cells:
        return []
    for cell in cells[1:]:
        _check_dimension(cells[0].dimension, cell.dimension)
    lows = np.array([c.lower for c in cells], dtype=float)
    highs = np.array([c.upper for c in cells], dtype=float)
    grid_lo, grid_hi = _face_grid(lows, highs)
    keep = _locate(lows, highs, 0.5 * (grid_lo + grid_hi)) >= 0
    return [Cell(lo, hi) for lo, hi, k in zip(grid_lo, grid_hi, keep) if k]


def common_refinement(f: StepFunction, g: StepFunction) -> Refinement:
    """
    Partition of the union of both domains on which f and g are constant.

    The refinement is the grid generated by every cell face of both inputs,
    restricted to grid boxes lying inside some input cell.
    """
    _check_dimension(f.dimension, g.dimension)
    d = f.dimension
    lo_f, hi_f = f.bounds
    lo_g, hi_g = g.bounds
    lows = np.vstack([lo_f, lo_g])
    highs = np.vstack([hi_f, hi_g])
    if lows.shape[0] == 0:
        return Refinement((), [], [], [], [])

    grid_lo, grid_hi = _face_grid(lows, highs)
    mid = 0.5 * (grid_lo + grid_hi)

    index_a = _locate(lo_f, hi_f, mid)
    index_b = _locate(lo_g, hi_g, mid)
    keep = (index_a >= 0) | (index_b >= 0)

    cells = [Cell(lo, hi) for lo, hi, k in zip(grid_lo, grid_hi, keep) if k]
    index_a = index_a[keep]
    index_b = index_b[keep]
    values_a = np.where(index_a >= 0, f.values[np.maximum(index_a, 0)] if len(f) else 0, 0)
    values_b = np.where(index_b >= 0, g.values[np.maximum(index_b, 0)] if len(g) else 0, 0)
    return Refinement(cells, values_a, values_b, index_a, index_b)


def mul(f: StepFunction, g: StepFunction) -> StepFunction:
    """Pointwise product, carried by the pairwise cell intersections"""
    overlap = overlap_matrix(f, g)
    cells: List[Cell] = []
    values: List[complex] = []
    for i, j in np.argwhere(overlap > 0.0):
        cells.append(f.cells[i].intersect(g.cells[j]))
        values.append(f.values[i] * g.values[j])
    return StepFunction(cells, values, dimension=f.dimension)


def pointwise(f: StepFunction, g: StepFunction, op: str = "mul") -> StepFunction:
    """Binary pointwise operation; only ``mul`` is defined"""
    if op != "mul":
        raise ValueError(f"unsupported pointwise operation: {op}")
    return mul(f, g)


def conj(f: StepFunction) -> StepFunction:
    return f.map_values(np.conj)


def power(f: StepFunction, k: int) -> StepFunction:
    """Pointwise power f^k for a positive integer k"""
    if int(k) != k or k < 1:
        raise ValueError(f"power requires a positive integer exponent, got {k}")
    if k == 1:
        return f
    return f.map_values(lambda v: v ** int(k))


def inner_pow(f: StepFunction, g: StepFunction, k: int = 1) -> complex:
    """
    ⟨f^k, g^k⟩ = Σ |I ∩ J| · conj(f_I)^k · g_J^k, antilinear in the first slot.
    """
    if int(k) != k or k < 1:
        raise ValueError(f"inner_pow requires k >= 1, got {k}")
    overlap = overlap_matrix(f, g)
    if overlap.size == 0:
        return 0j
    u = np.conj(f.values) ** int(k)
    v = g.values ** int(k)
    return complex(u @ overlap @ v)


def inner(f: StepFunction, g: StepFunction) -> complex:
    return inner_pow(f, g, 1)


def norm_inf(f: StepFunction) -> float:
    if len(f) == 0:
        return 0.0
    return float(np.max(np.abs(f.values)))


def norm_p(f: StepFunction, p: float = 2.0) -> float:
    """(Σ measure·|value|^p)^(1/p) for p >= 1"""
    if p < 1:
        raise ValueError(f"norm_p requires p >= 1, got {p}")
    if len(f) == 0:
        return 0.0
    return float(np.sum(f.measures * np.abs(f.values) ** p) ** (1.0 / p))
