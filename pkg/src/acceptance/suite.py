"""
Acceptance criteria for the selftest command.

Each check returns a CriterionResult with the values it measured. The
criteria are anchored to closed forms (constant-function moments, the
averaging counterexample) and to agreement between independent methods.
"""

from typing import Any, Callable, Dict, List, NamedTuple, Optional

import numpy as np
from scipy.special import poch

from src.algebra.step_function import Cell, StepFunction, norm_inf
from src.fock.kernel import kernel, kernel_gram, qexp_exists
from src.fock.nparticle import (
    inner_n_partition,
    inner_n_partition_printed,
    inner_n_sequence,
    series_kernel,
    tail_ratio,
)
from src.fock.span import (
    FockSpan,
    counterexample,
    gamma2_apply,
    h0_eigencheck,
    schur_order_check,
    span_norm,
)
from src.linalg.hermitian import HermitianMatrix, eig_hermitian
from src.operators.classifier import IsometryDecomposition, NotIsometry, decompose_isometry, operator_matrix, working_partition
from src.operators.spec import Average, CellMap, Compose, Gauge, Mult, OperatorSpec, Rearrange, ScalarExp
from src.utils.errors import DomainError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

SAMPLE_RADIUS = 0.45


class CriterionResult(NamedTuple):
    number: int
    name: str
    passed: bool
    measured: Dict[str, Any]


def random_step_function(
    rng: np.random.Generator,
    max_cells: int = 10,
    radius: float = SAMPLE_RADIUS,
    lo: float = 0.0,
    hi: float = 1.0,
) -> StepFunction:
    """1-D step function on [lo, hi) with at most ``max_cells`` cells and |values| <= radius"""
    k = int(rng.integers(1, max_cells + 1))
    cuts = np.unique(rng.uniform(lo, hi, size=k - 1))
    breaks = [lo] + [float(x) for x in cuts if lo < x < hi] + [hi]
    size = len(breaks) - 1
    moduli = radius * np.sqrt(rng.random(size))
    values = moduli * np.exp(2j * np.pi * rng.random(size))
    return StepFunction.from_breaks(breaks, values)


def random_isometry(rng: np.random.Generator) -> OperatorSpec:
    """Gauge(α) ∘ Rearrange(permutation of unit cells on [0, n))"""
    n = int(rng.integers(2, 6))
    cells = [Cell([i], [i + 1]) for i in range(n)]
    perm = rng.permutation(n)
    cell_map = CellMap(tuple((cells[i], cells[int(perm[i])]) for i in range(n)))
    alpha = StepFunction(cells, rng.uniform(-3.0, 3.0, size=n))
    return Compose((Gauge(alpha), Rearrange(cell_map)))


def _relative_gap(a: complex, b: complex, scale: float) -> float:
    return abs(a - b) / max(scale, np.finfo(float).tiny)


def check_method_agreement(seed: int, mutant: bool = False) -> CriterionResult:
    """Recursion vs partition sum for n <= 12, and series vs kernel"""
    rng = np.random.default_rng(seed)
    partition = inner_n_partition_printed if mutant else (lambda f, g, c, n: inner_n_partition(f, g, c, n).value)
    worst_gap = 0.0
    worst_tail = 0.0
    series_ok = True
    for _ in range(50):
        f, g = random_step_function(rng), random_step_function(rng)
        rec = inner_n_sequence(f, g, 1.0, 12)
        ff = inner_n_sequence(f, f, 1.0, 12)
        gg = inner_n_sequence(g, g, 1.0, 12)
        for n in range(1, 13):
            scale = np.sqrt(abs(ff[n]) * abs(gg[n]))
            worst_gap = max(worst_gap, _relative_gap(rec[n], partition(f, g, 1.0, n), scale))
        value, tail = series_kernel(f, g, 1.0, 40)
        exact = kernel(f, g, 1.0).value
        if abs(value - exact) > tail.bound + 1e-12 * abs(exact):
            series_ok = False
        if norm_inf(f) * norm_inf(g) <= 0.16:
            worst_tail = max(worst_tail, tail.bound / abs(exact))
    passed = worst_gap <= 1e-9 and series_ok and worst_tail < 1e-8
    return CriterionResult(
        1,
        "method agreement",
        passed,
        {"max_rel_diff": worst_gap, "series_within_bound": series_ok, "max_rel_tail": worst_tail},
    )


def check_misprint(mutant: bool = False) -> CriterionResult:
    """n = 2, f = g = 0.4 on a unit cell, c = 1"""
    f = StepFunction.indicator([0.0], [1.0], 0.4)
    correct = inner_n_sequence(f, f, 1.0, 2)[2].real
    partition = inner_n_partition(f, f, 1.0, 2).value.real
    printed = inner_n_partition_printed(f, f, 1.0, 2).real
    compared = printed if mutant else partition
    agrees = abs(compared - correct) <= 1e-9 * abs(correct)
    rejected = abs(printed - correct) > 1e-9 * abs(correct)
    passed = abs(correct - 0.6144) <= 1e-12 and agrees and rejected
    return CriterionResult(
        2,
        "printed partition coefficient rejected",
        passed,
        {"correct": correct, "partition": compared, "printed": printed},
    )


def check_closed_form() -> CriterionResult:
    """I(n) = n! 4^n (c/2)_n |u|^{2n} for constant functions"""
    worst = 0.0
    for u in (0.1, 0.3, 0.45):
        f = StepFunction.indicator([0.0], [1.0], u)
        for c in (0.5, 1.0, 2.0):
            values = inner_n_sequence(f, f, c, 15)
            for n in range(16):
                expected = float(np.prod(np.arange(1, n + 1, dtype=float))) * 4.0 ** n * poch(c / 2.0, n) * u ** (2 * n)
                worst = max(worst, abs(values[n].real - expected) / expected)
    return CriterionResult(3, "constant-function closed form", worst <= 1e-10, {"max_rel_err": worst})


def check_existence_boundary() -> CriterionResult:
    below = StepFunction.indicator([0.0], [1.0], float(np.nextafter(0.5, 0.0)))
    at = StepFunction.indicator([0.0], [1.0], 0.5)
    flips = qexp_exists(below) and not qexp_exists(at)
    try:
        kernel(at, at, 1.0)
        raises = False
    except DomainError:
        raises = True
    ratio = tail_ratio(at, at, 1.0, 40)
    passed = flips and raises and ratio >= 1.0
    return CriterionResult(
        4,
        "existence boundary",
        passed,
        {"flips_at_half": flips, "kernel_raises": raises, "tail_ratio": ratio},
    )


def check_isometries(seed: int) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst_gram = 0.0
    worst_residual = 0.0
    round_trips = True
    for _ in range(20):
        T = random_isometry(rng)
        n = len(T.cell_maps()[0].pairs)
        functions = [random_step_function(rng, lo=0.0, hi=float(n)) for _ in range(3)]
        before = kernel_gram(functions, 1.0).entries
        after = kernel_gram([T.apply(f) for f in functions], 1.0).entries
        worst_gram = max(worst_gram, float(np.max(np.abs(before - after) / np.maximum(1.0, np.abs(before)))))
        result = decompose_isometry(operator_matrix(T, working_partition(T, [])))
        if isinstance(result, IsometryDecomposition):
            worst_residual = max(worst_residual, result.residual)
        else:
            round_trips = False

    rejected = 0
    for i in range(20):
        if i % 2 == 0:
            cells = [Cell([0.0], [0.5]), Cell([0.5], [1.0])]
            phi = StepFunction(cells, rng.uniform(0.1, 0.9, size=2) * np.exp(2j * np.pi * rng.random(2)))
            T = Mult(phi)
        else:
            width = float(rng.uniform(0.5, 2.0))
            T = Average(Cell([0.0], [width]))
        basis = working_partition(T, [StepFunction.from_breaks([0.0, 0.25, 0.5, 1.0], [0.1, 0.2, 0.3])])
        result = decompose_isometry(operator_matrix(T, basis))
        if isinstance(result, NotIsometry) and result.lemma in ("C", "D", "E"):
            rejected += 1
    passed = worst_gram <= 1e-12 and round_trips and worst_residual <= 1e-12 and rejected == 20
    return CriterionResult(
        5,
        "isometries and their decomposition",
        passed,
        {"max_gram_diff": worst_gram, "max_residual": worst_residual, "non_isometries_rejected": rejected},
    )


def check_counterexample(seed: int) -> CriterionResult:
    result = counterexample(0.4, 1.0)
    determinant = result.report.determinant.real
    witness = result.witness_span(1.0)
    grows = witness is not None and span_norm(gamma2_apply(result.operator, witness)) > span_norm(witness)

    rng = np.random.default_rng(seed)
    single_ok = True
    for _ in range(100):
        xi = FockSpan.single(random_step_function(rng), 1.0)
        if span_norm(gamma2_apply(result.operator, xi)) > span_norm(xi) * (1.0 + 1e-12):
            single_ok = False
    persists = {lam: counterexample(lam, 1.0).report.determinant.real for lam in (0.1, 0.2, 0.3, 0.45)}
    passed = (
        abs(determinant + 6.133e-3) <= 1e-6
        and result.report.min_eigenvalue < -1e-3
        and grows
        and single_ok
        and all(d < 0.0 for d in persists.values())
    )
    return CriterionResult(
        6,
        "averaging counterexample",
        passed,
        {
            "det_A_minus_B": determinant,
            "min_eigenvalue": result.report.min_eigenvalue,
            "witness_grows": grows,
            "single_vectors_contract": single_ok,
            "det_by_lambda": {str(k): v for k, v in persists.items()},
        },
    )


def check_semigroup(seed: int) -> CriterionResult:
    rng = np.random.default_rng(seed)
    law_ok = True
    for _ in range(20):
        z1 = complex(-rng.random(), rng.uniform(-3, 3))
        z2 = complex(-rng.random(), rng.uniform(-3, 3))
        xi = FockSpan([1.0, -0.5j], [random_step_function(rng), random_step_function(rng)], 1.0)
        twice = gamma2_apply(ScalarExp(z1), gamma2_apply(ScalarExp(z2), xi))
        once = gamma2_apply(ScalarExp(z1 + z2), xi)
        law_ok &= all(a.equals(b, tol=1e-14) for a, b in zip(twice.functions, once.functions))
    f = random_step_function(rng)
    eigen_ok = all(h0_eigencheck(f, 1.0, n, t) for n in range(11) for t in (0.1, 1.0))
    rejects = not ScalarExp(0.1).is_well_defined()
    return CriterionResult(
        7,
        "semigroup and free Hamiltonian",
        law_ok and eigen_ok and rejects,
        {"composition_law": law_ok, "eigencheck": eigen_ok, "rejects_re_z_positive": rejects},
    )


def _random_contraction(rng: np.random.Generator) -> OperatorSpec:
    cells = [Cell([0.0], [1.0]), Cell([1.0], [2.0]), Cell([2.0], [3.0])]
    choice = int(rng.integers(0, 4))
    if choice == 0:
        return Mult(StepFunction(cells, rng.random(3) * np.exp(2j * np.pi * rng.random(3))))
    if choice == 1:
        return Gauge(StepFunction(cells, rng.uniform(-np.pi, np.pi, size=3)))
    if choice == 2:
        perm = rng.permutation(3)
        return Rearrange(CellMap(tuple((cells[i], cells[int(perm[i])]) for i in range(3))))
    return ScalarExp(complex(-rng.random(), rng.uniform(-3, 3)))


def check_functoriality(seed: int) -> CriterionResult:
    rng = np.random.default_rng(seed)
    exact = True
    for _ in range(50):
        S, T = _random_contraction(rng), _random_contraction(rng)
        xi = FockSpan(
            [1.0, 0.5 + 0.5j], [random_step_function(rng, hi=3.0), random_step_function(rng, hi=3.0)], 1.0
        )
        composed = gamma2_apply(Compose((S, T)), xi)
        nested = gamma2_apply(S, gamma2_apply(T, xi))
        exact &= all(a.equals(b) for a, b in zip(composed.functions, nested.functions))
    return CriterionResult(8, "composition functoriality", exact, {"exact": exact})


def _random_psd(rng: np.random.Generator, n: int) -> np.ndarray:
    r = int(rng.integers(1, n + 1))
    x = rng.normal(size=(n, r)) + 1j * rng.normal(size=(n, r))
    return x @ x.conj().T


def check_schur(seed: int) -> CriterionResult:
    rng = np.random.default_rng(seed)
    holds = 0
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        A, P, C, Q = (_random_psd(rng, n) for _ in range(4))
        if schur_order_check(
            HermitianMatrix(A), HermitianMatrix(A + P), HermitianMatrix(C), HermitianMatrix(C + Q)
        ):
            holds += 1
    return CriterionResult(9, "Schur ordering", holds == 1000, {"trials_holding": holds})


def check_independence(seed: int) -> CriterionResult:
    worst = np.inf
    for k in range(20):
        rng = np.random.default_rng(seed + k)
        functions = [random_step_function(rng) for _ in range(5)]
        eigenvalues, _ = eig_hermitian(kernel_gram(functions, 1.0))
        worst = min(worst, float(eigenvalues[0]))
    return CriterionResult(10, "linear independence", worst > 1e-8, {"min_eigenvalue": worst})


def run_suite(seed: int = 0, mutant: bool = False) -> List[CriterionResult]:
    """
    Run all criteria in order.

    With ``mutant`` set, the partition sum is replaced by its printed
    coefficients, which criteria 1 and 2 must catch.
    """
    checks: List[Callable[[], CriterionResult]] = [
        lambda: check_method_agreement(seed, mutant),
        lambda: check_misprint(mutant),
        check_closed_form,
        check_existence_boundary,
        lambda: check_isometries(seed),
        lambda: check_counterexample(seed),
        lambda: check_semigroup(seed),
        lambda: check_functoriality(seed),
        lambda: check_schur(seed),
        lambda: check_independence(seed),
    ]
    results = []
    for check in checks:
        result = check()
        logger.info(f"Criterion {result.number} ({result.name}): {'PASS' if result.passed else 'FAIL'}")
        results.append(result)
    return results


def failed(results: List[CriterionResult]) -> Optional[List[int]]:
    numbers = [r.number for r in results if not r.passed]
    return numbers or None
