"""
Finite spans of quadratic exponential vectors.

Norms come from the Gram matrix of the kernel; Γ₂(T) acts on a span by
mapping its functions. Contraction of Γ₂(T) on a span is the Loewner
ordering of two Gram matrices, which this module tests and searches
witnesses for.
"""

from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from src.algebra.step_function import Cell, StepFunction, norm_inf, refine_cells
from src.fock.kernel import CouplingConstant, GramMatrix, kernel_gram, kernel_taylor_coefficients, qexp_exists
from src.fock.nparticle import inner_n
from src.linalg.hermitian import HermitianMatrix, det, hadamard, is_psd
from src.operators.spec import Average, OperatorSpec, Rearrange, ScalarExp
from src.utils.errors import DimensionMismatch, DomainError, PreconditionFailed, QFockError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_TOL = 1e-10
GROWTH_RTOL = 1e-10
# Random spans: function values stay inside this modulus
SAMPLE_RADIUS = 0.45
MAX_SLABS = 6


class FockSpan:
    """
    Vector Σ αᵢ Ψ(fᵢ) in the quadratic Fock space with coupling c.
    """

    def __init__(self, coefficients: Sequence[complex], functions: Sequence[StepFunction], c: float):
        self.c = CouplingConstant(c)
        self.coefficients = np.array(coefficients, dtype=complex).reshape(-1)
        self.functions = tuple(functions)
        if len(self.functions) == 0 or len(self.functions) != self.coefficients.shape[0]:
            raise DimensionMismatch(
                "span needs equally many coefficients and functions (at least one)",
                {"coefficients": int(self.coefficients.shape[0]), "functions": len(self.functions)},
            )
        for i, f in enumerate(self.functions):
            if f.dimension != self.functions[0].dimension:
                raise DimensionMismatch("span functions must share a dimension", {"index": i})
            if not qexp_exists(f):
                raise DomainError(
                    f"exponential vector of function {i} does not exist",
                    {"index": i, "norm_inf": norm_inf(f)},
                )
        self.coefficients.setflags(write=False)

    @classmethod
    def vacuum(cls, c: float, dimension: int = 1) -> "FockSpan":
        """The vacuum Φ = Ψ(0)"""
        return cls([1.0], [StepFunction.zero(dimension)], c)

    @classmethod
    def single(cls, f: StepFunction, c: float, coefficient: complex = 1.0) -> "FockSpan":
        return cls([coefficient], [f], c)

    @property
    def dimension(self) -> int:
        return self.functions[0].dimension

    def gram(self) -> GramMatrix:
        return kernel_gram(self.functions, self.c)

    def __len__(self) -> int:
        return len(self.functions)

    def __repr__(self) -> str:
        return "FockSpan(terms=%d, c=%g)" % (len(self), float(self.c))


def span_norm(xi: FockSpan) -> float:
    """√(α† G α) with G the Gram matrix of the span's functions"""
    value = xi.gram().quadratic_form(xi.coefficients)
    return float(np.sqrt(max(value, 0.0)))


def gamma2_apply(T: OperatorSpec, xi: FockSpan) -> FockSpan:
    """
    Γ₂(T): Ψ(f) ↦ Ψ(Tf), coefficients unchanged.

    Raises:
        DomainError: if some Tfᵢ leaves the existence radius
    """
    return FockSpan(xi.coefficients, [T.apply(f) for f in xi.functions], xi.c)


class LoewnerReport(NamedTuple):
    psd_A_minus_B: bool
    min_eigenvalue: float
    determinant: complex
    witness_vector: Optional[List[complex]]

    def to_dict(self) -> dict:
        return {
            "psd": self.psd_A_minus_B,
            "min_eigenvalue": self.min_eigenvalue,
            "det_A_minus_B": {"re": self.determinant.real, "im": self.determinant.imag},
            "witness": None
            if self.witness_vector is None
            else [{"re": z.real, "im": z.imag} for z in self.witness_vector],
        }


def loewner_leq(B: HermitianMatrix, A: HermitianMatrix, tol: float = DEFAULT_TOL) -> LoewnerReport:
    """
    Test B ⪯ A, i.e. A − B positive semidefinite.

    When the test fails the witness v satisfies v†(A − B)v < 0: the span
    with coefficients v grows under Γ₂(T) when A, B are its Gram matrices
    before and after T.
    """
    if A.order != B.order:
        raise DimensionMismatch("Gram matrices have different orders", {"A": A.order, "B": B.order})
    diff = A - B
    result = is_psd(diff, tol=tol)
    witness = None
    if not result.is_psd and result.witness is not None:
        witness = [complex(z) for z in result.witness]
    return LoewnerReport(result.is_psd, result.min_eig, det(diff), witness)


class Counterexample(NamedTuple):
    A: GramMatrix
    B: GramMatrix
    report: LoewnerReport
    functions: List[StepFunction]
    operator: OperatorSpec

    def witness_span(self, c: float) -> Optional[FockSpan]:
        if self.report.witness_vector is None:
            return None
        return FockSpan(self.report.witness_vector, self.functions, c)


def counterexample(lam: float, c: float = 1.0, tol: float = DEFAULT_TOL) -> Counterexample:
    """
    Average over [0,1] is an L² and L∞ contraction whose Γ₂ is not a
    contraction: with f₁ = λχ_[0,½), f₂ = λχ_[0,1) the Gram matrix after
    averaging is not below the one before.

    Raises:
        DomainError: unless 0 < λ < 1/2
    """
    if not 0.0 < lam < 0.5:
        raise DomainError("lambda must lie in (0, 1/2)", {"lambda": lam})
    f1 = StepFunction.indicator([0.0], [0.5], lam)
    f2 = StepFunction.indicator([0.0], [1.0], lam)
    T = Average(Cell([0.0], [1.0]))
    A = kernel_gram([f1, f2], c)
    B = kernel_gram([T.apply(f1), T.apply(f2)], c)
    report = loewner_leq(B, A, tol=tol)
    logger.info(
        f"Counterexample at lambda={lam}, c={float(c)}: det(A-B)={report.determinant.real:.6e}, "
        f"min eigenvalue {report.min_eigenvalue:.6e}"
    )
    return Counterexample(A, B, report, [f1, f2], T)


class WitnessSearchResult(NamedTuple):
    span: Optional[FockSpan]
    trial: Optional[int]
    ratio: Optional[float]
    trials: int
    seed: int

    @property
    def found(self) -> bool:
        return self.span is not None


def sampling_cells(T: OperatorSpec) -> List[Cell]:
    """Cells random functions live on: the sources of the first rearrangement T applies"""
    for factor in reversed(T.flatten()):
        if isinstance(factor, Rearrange):
            return list(factor.cell_map.sources)
    cells = T.referenced_cells()
    if cells:
        return refine_cells(cells)
    return [Cell([0.0], [1.0])]


def _random_value(rng: np.random.Generator) -> complex:
    radius = SAMPLE_RADIUS * np.sqrt(rng.random())
    return complex(radius * np.exp(2j * np.pi * rng.random()))


def random_admissible_function(rng: np.random.Generator, cells: Sequence[Cell]) -> StepFunction:
    """Constant on all sampling cells half of the time, else ≤ 6 slabs per cell"""
    d = cells[0].dimension
    if rng.random() < 0.5:
        value = _random_value(rng)
        return StepFunction(cells, [value] * len(cells), dimension=d)
    pieces, values = [], []
    for cell in cells:
        k = int(rng.integers(1, MAX_SLABS + 1))
        lo, hi = cell.lower[0], cell.upper[0]
        cuts = np.sort(rng.uniform(lo, hi, size=k - 1))
        bounds = [lo] + [float(x) for x in cuts] + [hi]
        for a, b in zip(bounds[:-1], bounds[1:]):
            if b <= a:
                continue
            pieces.append(Cell((a,) + cell.lower[1:], (b,) + cell.upper[1:]))
            values.append(0j if rng.random() < 0.25 else _random_value(rng))
    return StepFunction(pieces, values, dimension=d)


def _random_coefficients(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform in the complex unit ball"""
    z = rng.normal(size=size) + 1j * rng.normal(size=size)
    radius = rng.random() ** (1.0 / (2 * size))
    return radius * z / np.linalg.norm(z)


def _grows(before: float, after: float) -> bool:
    return after > before * (1.0 + GROWTH_RTOL)


def contraction_witness_search(
    T: OperatorSpec, c: float, trials: int, rng_seed: int
) -> WitnessSearchResult:
    """
    Look for a span ξ with ‖Γ₂(T)ξ‖ > ‖ξ‖.

    Each trial draws 1 to 3 random admissible functions and tries random
    coefficients first, then the eigen-witness of the Gram difference.
    Deterministic in (trials, rng_seed).
    """
    c = CouplingConstant(c)
    rng = np.random.default_rng(rng_seed)
    cells = sampling_cells(T)
    for trial in range(trials):
        size = int(rng.integers(1, 4))
        functions = [random_admissible_function(rng, cells) for _ in range(size)]
        coefficients = _random_coefficients(rng, size)
        try:
            xi = FockSpan(coefficients, functions, c)
            image = gamma2_apply(T, xi)
            A, B = xi.gram(), image.gram()
        except QFockError as e:
            logger.debug(f"Witness trial {trial} skipped: {e.message}")
            continue

        before, after = A.quadratic_form(coefficients), B.quadratic_form(coefficients)
        if _grows(before, after):
            ratio = float(np.sqrt(after / before))
            logger.info(f"Contraction witness found at trial {trial} (ratio {ratio:.12f})")
            return WitnessSearchResult(xi, trial, ratio, trials, rng_seed)

        report = loewner_leq(B, A)
        if report.witness_vector is not None:
            v = np.array(report.witness_vector)
            before, after = A.quadratic_form(v), B.quadratic_form(v)
            if _grows(before, after):
                ratio = float(np.sqrt(after / before))
                logger.info(f"Contraction eigen-witness found at trial {trial} (ratio {ratio:.12f})")
                return WitnessSearchResult(FockSpan(v, functions, c), trial, ratio, trials, rng_seed)
    return WitnessSearchResult(None, None, None, trials, rng_seed)


def semigroup_apply(z: complex, xi: FockSpan) -> FockSpan:
    """
    e^{zH₀} on a span, i.e. Γ₂(e^z).

    Raises:
        DomainError: if Re z > 0
    """
    z = complex(z)
    if z.real > 0.0:
        raise DomainError("semigroup needs Re z <= 0", {"z": {"re": z.real, "im": z.imag}})
    return gamma2_apply(ScalarExp(z), xi)


def h0_eigencheck(f: StepFunction, c: float, n: int, t: float, tol: float = DEFAULT_TOL) -> bool:
    """
    The n-particle space is the eigenspace of H₀ for the eigenvalue n:
    inner_n(e^{it}f, f, c, n) == e^{-itn} inner_n(f, f, c, n).
    """
    rotated = f.scale(np.exp(1j * t))
    lhs = inner_n(rotated, f, c, n)
    rhs = np.exp(-1j * t * n) * inner_n(f, f, c, n)
    return bool(abs(lhs - rhs) <= tol * max(1.0, abs(rhs)))


def h0_expectation(f: StepFunction, c: float, n_max: int = 120) -> float:
    """
    ⟨Ψ(f), H₀ Ψ(f)⟩ / ‖Ψ(f)‖², the mean particle number of Ψ(f),
    truncated after n_max particles.
    """
    c = CouplingConstant(c)
    if not qexp_exists(f):
        raise DomainError("exponential vector does not exist", {"norm_inf": norm_inf(f)})
    weights = np.real(kernel_taylor_coefficients(f, f, c, n_max))
    n = np.arange(n_max + 1)
    return float(n @ weights / np.sum(weights))


def submarkov_eigenvalue(t: float) -> float:
    """Eigenvalue e^{-t} of e^{-tH₀} on the one-particle space"""
    if t < 0.0:
        raise DomainError("sub-Markov check needs t >= 0", {"t": t})
    value = float(np.exp(-t))
    assert value <= 1.0
    return value


def schur_order_check(
    A: HermitianMatrix,
    B: HermitianMatrix,
    C: HermitianMatrix,
    D: HermitianMatrix,
    tol: float = DEFAULT_TOL,
) -> bool:
    """
    0 ⪯ A ⪯ B and 0 ⪯ C ⪯ D imply 0 ⪯ A∘C ⪯ B∘D.

    Raises:
        PreconditionFailed: naming the first ordering that does not hold
    """
    for name, matrix in (("0 <= A", A), ("A <= B", B - A), ("0 <= C", C), ("C <= D", D - C)):
        result = is_psd(matrix, tol=tol)
        if not result.is_psd:
            raise PreconditionFailed(
                f"ordering {name} does not hold", {"ordering": name, "min_eigenvalue": result.min_eig}
            )
    lower = hadamard(A, C)
    upper = hadamard(B, D)
    return is_psd(lower, tol=tol).is_psd and is_psd(upper - lower, tol=tol).is_psd
