"""
Command Line Interface for the quadratic Fock space toolkit.

Every subcommand reads JSON inputs, runs one computation and prints a
RunReport as canonical JSON on stdout. Errors go to stderr as structured
JSON; the exit code is 0 on success, 1 on usage or schema errors and 2 on
domain errors.
"""

import argparse
import json
import os
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv
from rich.console import Console

# Add parent directory to path to import from src
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.acceptance.suite import failed, run_suite
from src.algebra.schema import step_function_from_json, step_function_to_json
from src.algebra.step_function import StepFunction
from src.fock.kernel import kernel, kernel_gram
from src.fock.nparticle import inner_n_partition, inner_n_recursive, inner_n_sequence, series_kernel, tail_ratio
from src.fock.schema import span_from_json, span_to_json
from src.fock.span import (
    contraction_witness_search,
    counterexample,
    random_admissible_function,
    sampling_cells,
    semigroup_apply,
    span_norm,
    submarkov_eigenvalue,
)
from src.linalg.hermitian import is_psd
from src.operators.classifier import (
    IsometryDecomposition,
    classify,
    decompose_isometry,
    operator_matrix,
    working_partition,
)
from src.operators.schema import BoxModel, operator_from_json
from src.rendering.report_renderer import ReportRenderer, RunReport, complex_json, inputs_digest
from src.utils.config import Config
from src.utils.errors import DomainError, QFockError, SchemaError
from src.utils.logger import setup_logger

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2

# Largest particle number the n-moment and convergence commands accept
MAX_PARTICLES = 60

# stdout carries reports only
console = Console(highlight=False, soft_wrap=True)


class UsageError(QFockError):
    kind = "usage"


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting"""

    def error(self, message):
        raise UsageError(message, {"usage": self.format_usage().strip()})


def _bounded_int(lo: int, hi: Optional[int] = None):
    """argparse type for an integer in [lo, hi]"""
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid integer: {text!r}")
        if value < lo or (hi is not None and value > hi):
            bound = f"at least {lo}" if hi is None else f"between {lo} and {hi}"
            raise argparse.ArgumentTypeError(f"must be {bound}, got {value}")
        return value

    return parse


def _read_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as e:
        raise UsageError(f"cannot read {path}", {"path": path, "reason": str(e)})
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path} is not valid JSON", {"path": path, "reason": str(e)})


def _read_functions(path: str) -> List[StepFunction]:
    data = _read_json(path)
    if isinstance(data, dict) and "functions" in data:
        data = data["functions"]
    if not isinstance(data, list):
        raise SchemaError("expected a list of step functions", {"path": path})
    return [step_function_from_json(item) for item in data]


def _complex_matrix(m) -> List[List[Dict[str, float]]]:
    return [[complex_json(z) for z in row] for row in np.asarray(m)]


class CLIInterface:
    """
    Command line front end.

    Each ``cmd_*`` method returns (outputs, inputs, seed) or a raw CSV string.
    """

    def __init__(self, renderer: Optional[ReportRenderer] = None):
        """Initialize the CLI interface."""
        load_dotenv()
        self.logger = setup_logger("cli_interface")
        self.config = Config()
        self.config.validate()
        self.renderer = renderer or ReportRenderer(console)
        self.parser = self.build_parser()

    def build_parser(self) -> argparse.ArgumentParser:
        parser = _Parser(prog="qfock", description="Quadratic Fock space toolkit")
        parser.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
        sub = parser.add_subparsers(dest="command", parser_class=_Parser)
        sub.required = True

        p = sub.add_parser("kernel", help="scalar product of two exponential vectors")
        p.add_argument("--f", required=True)
        p.add_argument("--g", required=True)
        p.add_argument("--c", type=float, default=1.0)

        p = sub.add_parser("gram", help="Gram matrix of exponential vectors")
        p.add_argument("--functions", required=True)
        p.add_argument("--c", type=float, default=1.0)
        p.add_argument("--format", choices=["json", "csv"], default="json")

        p = sub.add_parser("nmoment", help="n-particle scalar product by two methods")
        p.add_argument("--f", required=True)
        p.add_argument("--g", required=True)
        p.add_argument("--c", type=float, default=1.0)
        p.add_argument("--n", type=_bounded_int(0, MAX_PARTICLES), required=True)

        p = sub.add_parser("convergence", help="series reconstruction of the kernel")
        p.add_argument("--f", required=True)
        p.add_argument("--g", required=True)
        p.add_argument("--c", type=float, default=1.0)
        p.add_argument("--n", type=_bounded_int(1, MAX_PARTICLES), default=None)
        p.add_argument("--format", choices=["json", "csv"], default="json")

        p = sub.add_parser("classify", help="classify the second quantization of an operator")
        p.add_argument("--op", required=True)
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--samples", type=_bounded_int(0), default=10)
        p.add_argument("--k", type=_bounded_int(1), default=4)

        p = sub.add_parser("decompose", help="recover phase and cell map of an isometry")
        p.add_argument("--op", required=True)
        p.add_argument("--functions", default=None)

        p = sub.add_parser("counterexample", help="Gram matrices of the averaging counterexample")
        p.add_argument("--lambda", dest="lam", type=float, default=0.4)
        p.add_argument("--c", type=float, default=1.0)

        p = sub.add_parser("witness-search", help="random search for a span that grows")
        p.add_argument("--op", required=True)
        p.add_argument("--c", type=float, default=1.0)
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--trials", type=_bounded_int(0), default=None)

        p = sub.add_parser("semigroup", help="apply exp(z H0) to a span")
        p.add_argument("--span", required=True)
        p.add_argument("--z-re", type=float, default=0.0)
        p.add_argument("--z-im", type=float, default=0.0)

        p = sub.add_parser("selftest", help="run the acceptance suite")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--mutant", action="store_true", help="use the printed partition coefficients")
        return parser

    # -- subcommands -- #

    def cmd_kernel(self, args):
        f, g = step_function_from_json(_read_json(args.f)), step_function_from_json(_read_json(args.g))
        result = kernel(f, g, args.c)
        inputs = {"f": step_function_to_json(f), "g": step_function_to_json(g), "c": args.c}
        return {"value": complex_json(result.value), "log": complex_json(result.log_value)}, inputs, None

    def cmd_gram(self, args):
        functions = _read_functions(args.functions)
        gram = kernel_gram(functions, args.c)
        if args.format == "csv":
            return self.renderer.matrix_csv(gram.entries)
        psd = is_psd(gram, tol=self.config.tol, max_sweeps=self.config.jacobi_max_sweeps)
        inputs = {"functions": [step_function_to_json(f) for f in functions], "c": args.c}
        outputs = {"matrix": _complex_matrix(gram.entries), "min_eigenvalue": psd.min_eig}
        return outputs, inputs, None

    def cmd_nmoment(self, args):
        f, g = step_function_from_json(_read_json(args.f)), step_function_from_json(_read_json(args.g))
        recursion = inner_n_recursive(f, g, args.c, args.n).value
        partition = inner_n_partition(f, g, args.c, args.n).value
        rel_diff = abs(recursion - partition) / max(abs(recursion), np.finfo(float).tiny)
        inputs = {"f": step_function_to_json(f), "g": step_function_to_json(g), "c": args.c, "n": args.n}
        outputs = {
            "recursion": complex_json(recursion),
            "partition": complex_json(partition),
            "rel_diff": rel_diff,
        }
        return outputs, inputs, None

    def cmd_convergence(self, args):
        f, g = step_function_from_json(_read_json(args.f)), step_function_from_json(_read_json(args.g))
        n = self.config.series_terms if args.n is None else args.n
        inputs = {"f": step_function_to_json(f), "g": step_function_to_json(g), "c": args.c, "n": n}
        ratio = tail_ratio(f, g, args.c, n)
        if ratio >= 1.0:
            return {"contracting": False, "ratio": ratio, "truncation": n}, inputs, None

        partial, tail = series_kernel(f, g, args.c, n)
        exact = kernel(f, g, args.c).value
        if args.format == "csv":
            values = inner_n_sequence(f, g, args.c, n)
            rows, running, factorial_sq = [], 0j, 1.0
            for m, value in enumerate(values):
                factorial_sq *= float(max(m, 1)) ** 2
                running += value / factorial_sq
                rows.append([m, float(running.real), float(running.imag), float(abs(running - exact))])
            return self.renderer.table_csv(["n", "partial_re", "partial_im", "abs_error"], rows)
        outputs = {
            "contracting": True,
            "ratio": tail.ratio_at_n,
            "truncation": n,
            "partial_sum": complex_json(partial),
            "kernel": complex_json(exact),
            "tail_bound": tail.bound,
            "abs_error": abs(partial - exact),
        }
        return outputs, inputs, None

    def _random_samples(self, op, count: int, seed: int):
        rng = np.random.default_rng(seed)
        cells = sampling_cells(op)
        return [
            (random_admissible_function(rng, cells), random_admissible_function(rng, cells))
            for _ in range(count)
        ]

    def cmd_classify(self, args):
        data = _read_json(args.op)
        op = operator_from_json(data)
        samples = self._random_samples(op, args.samples, args.seed)
        result = classify(op, samples, args.k, tol=self.config.tol)
        inputs = {"op": data, "samples": args.samples, "k": args.k}
        return result.model_dump(), inputs, args.seed

    def cmd_decompose(self, args):
        data = _read_json(args.op)
        op = operator_from_json(data)
        functions = _read_functions(args.functions) if args.functions else []
        basis = working_partition(op, functions)
        matrix = operator_matrix(op, basis, tol=self.config.tol)
        result = decompose_isometry(matrix, tol=self.config.tol)
        outputs: Dict[str, Any] = {
            "basis": [BoxModel.of(c).model_dump() for c in basis],
            "columns": list(matrix.columns),
            "matrix": _complex_matrix(matrix.matrix),
        }
        if isinstance(result, IsometryDecomposition):
            outputs.update(
                isometry=True,
                surjective=result.surjective,
                residual=result.residual,
                alpha=step_function_to_json(result.alpha),
                pairs=[
                    {"source": BoxModel.of(s).model_dump(), "target": BoxModel.of(t).model_dump()}
                    for s, t in result.cell_map.pairs
                ],
            )
        else:
            outputs.update(
                isometry=False,
                witness={"lemma": result.lemma, "cells": list(result.cells), "residual": result.residual},
            )
        inputs = {"op": data, "functions": [step_function_to_json(f) for f in functions]}
        return outputs, inputs, None

    def cmd_counterexample(self, args):
        result = counterexample(args.lam, args.c, tol=self.config.tol)
        outputs = {
            "A": _complex_matrix(result.A.entries),
            "B": _complex_matrix(result.B.entries),
            **result.report.to_dict(),
        }
        return outputs, {"lambda": args.lam, "c": args.c}, None

    def cmd_witness_search(self, args):
        data = _read_json(args.op)
        op = operator_from_json(data)
        trials = self.config.witness_trials if args.trials is None else args.trials
        result = contraction_witness_search(op, args.c, trials, args.seed)
        outputs = {
            "found": result.found,
            "trial": result.trial,
            "ratio": result.ratio,
            "span": span_to_json(result.span) if result.found else None,
        }
        return outputs, {"op": data, "c": args.c, "trials": trials}, args.seed

    def cmd_semigroup(self, args):
        data = _read_json(args.span)
        xi = span_from_json(data)
        z = complex(args.z_re, args.z_im)
        image = semigroup_apply(z, xi)
        outputs = {
            "span": span_to_json(image),
            "norm_before": span_norm(xi),
            "norm_after": span_norm(image),
            "one_particle_eigenvalue": submarkov_eigenvalue(-z.real),
        }
        return outputs, {"span": data, "z": complex_json(z)}, None

    def cmd_selftest(self, args) -> int:
        self.logger.debug(f"Selftest seed={args.seed} mutant={args.mutant} config={self.config.get_numeric_config()}")
        results = run_suite(seed=args.seed, mutant=args.mutant)
        self.renderer.print_criteria(results)
        numbers = failed(results)
        if numbers:
            self.logger.warning(f"Failed criteria: {numbers}")
            return EXIT_DOMAIN
        return EXIT_OK

    # -- dispatch -- #

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """
        Parse ``argv``, run the subcommand and print its report.

        Returns:
            process exit code
        """
        try:
            args = self.parser.parse_args(argv)
            if args.command == "selftest":
                return self.cmd_selftest(args)
            handler = getattr(self, "cmd_" + args.command.replace("-", "_"))
            start = time.perf_counter()
            result = handler(args)
            elapsed = (time.perf_counter() - start) * 1000.0
            self.logger.info(f"{args.command} finished in {elapsed:.1f} ms")
            if isinstance(result, str):
                sys.stdout.write(result)
                return EXIT_OK
            outputs, inputs, seed = result
            report = RunReport(
                command=args.command,
                inputs_digest=inputs_digest({"command": args.command, "inputs": inputs, "seed": seed}),
                outputs=outputs,
                seed=seed,
                timings_ms={"compute": elapsed} if args.timings else {},
            )
            sys.stdout.write(self.renderer.format_report(report) + "\n")
            return EXIT_OK
        except QFockError as e:
            code = EXIT_USAGE if e.kind in ("usage", "schema") else EXIT_DOMAIN
            self.logger.error(f"{e.kind}: {e.message}")
            sys.stderr.write(self.renderer.format_response(e.to_dict()) + "\n")
            return code
        except (ValueError, ArithmeticError) as e:
            error = DomainError(str(e), {"exception": type(e).__name__})
            self.logger.error(f"{error.kind}: {error.message}")
            sys.stderr.write(self.renderer.format_response(error.to_dict()) + "\n")
            return EXIT_DOMAIN


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the CLI."""
    return CLIInterface().run(argv)


if __name__ == "__main__":
    sys.exit(main())
