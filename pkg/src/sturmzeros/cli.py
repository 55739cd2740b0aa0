"""Command line front end.

Exit codes: 0 when every check passes, 1 for usage or parse errors, 2 when a
mathematical check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import List, Optional

import numpy as np

from . import suites
from .errors import BudgetExceeded, EvalDomainError, NearSingular, PotentialSyntaxError, UnresolvedZero
from .rng import SplitMix64
from .slater import NodeSpec
from .spectral import DEFAULT_GRID, DirichletProblem, SpectralBasis, solve_basis

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def default_grid() -> int:
    raw = os.environ.get("SOL_GRID_DEFAULT")
    if raw is None:
        return DEFAULT_GRID
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"SOL_GRID_DEFAULT must be an integer, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", default="0", help="potential q(x), e.g. '10*cos(4*x)'")
    common.add_argument("--n", type=int, default=4, help="basis size")
    common.add_argument("--grid", type=int, default=None, help="uniform grid intervals")
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--m-low", type=int, default=1, dest="m_low",
                        help="lowest coefficient index allowed to be nonzero")
    common.add_argument("--zeros", default=None, help="prescribed zeros 'p:k,p:k,...'")
    common.add_argument("--out", default=None, help="report path (stdout if omitted)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--dump-curve", default=None, dest="dump_curve",
                        help="write (x, S(x)) samples as CSV")

    parser = _Parser(prog="sturmzeros", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("spectrum", parents=[common], help="eigenpairs and their node counts")
    sub.add_parser("verify", parents=[common], help="randomized zero-count bounds")
    sub.add_parser("reconstruct", parents=[common], help="combination from prescribed zeros")
    sub.add_parser("oscillator", parents=[common], help="exact harmonic oscillator checks")
    sub.add_parser("vandermonde", parents=[common], help="exact Vandermonde identities")
    return parser


def _config(args) -> dict:
    keys = ("command", "q", "n", "grid", "seed", "trials", "m_low", "zeros", "format")
    return {k: getattr(args, k) for k in keys}


def _validate(args):
    if args.grid is None:
        args.grid = default_grid()
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    if args.grid < 256 or args.grid % 2:
        raise UsageError("--grid must be an even integer >= 256")
    if args.trials < 0:
        raise UsageError("--trials must be >= 0")
    if not 1 <= args.m_low <= args.n:
        raise UsageError("--m-low must lie in [1, n]")


def _basis(args) -> SpectralBasis:
    return solve_basis(DirichletProblem.from_source(args.q), args.n, args.grid)


def _dump_curve(path: str, x: np.ndarray, columns: dict):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", *columns])
        for i, xi in enumerate(x):
            w.writerow([repr(float(xi)), *(repr(float(c[i])) for c in columns.values())])


def cmd_spectrum(args):
    basis = _basis(args)
    results = suites.spectrum_checks(basis)
    table = [{"j": j, "eigenvalue": float(lam), "nodes": nodes}
             for j, (lam, nodes) in enumerate(zip(basis.eigenvalues, results[1]["node_counts"]), 1)]
    if args.dump_curve:
        h = basis.node_derivatives(0)
        _dump_curve(args.dump_curve, basis.grid, {f"h{j + 1}": h[j] for j in range(basis.n)})
    return results, table


def cmd_verify(args):
    rows: List[dict] = []
    basis = None
    if args.trials:
        basis = _basis(args)
        rows = list(suites.bound_trials(basis, args.trials, SplitMix64(args.seed), args.m_low))
    results = suites.summarize_trials(rows)
    results.append(suites.result("trials", True, rows=rows))
    if args.dump_curve and basis is not None:
        b = suites.supported_unit_vector(SplitMix64(args.seed), args.n, args.m_low)
        _dump_curve(args.dump_curve, basis.grid, {"S": basis.combination_nodes(b, 0)})
    return results, rows


def cmd_reconstruct(args):
    if not args.zeros:
        raise UsageError("--zeros is required")
    try:
        spec = NodeSpec.parse(args.zeros)
    except ValueError as exc:
        raise UsageError(f"bad --zeros: {exc}")
    if spec.total != args.n - 1:
        raise UsageError(f"multiplicities sum to {spec.total}, need n - 1 = {args.n - 1}")
    basis = _basis(args)
    b, rep, results = suites.reconstruction_checks(basis, spec)
    results.insert(0, suites.result("coefficients", True, coefficients=[float(v) for v in b],
                                    zeros=rep.to_dict()))
    if args.dump_curve:
        _dump_curve(args.dump_curve, basis.grid, {"S": basis.combination_nodes(b, 0)})
    table = [{"x": r.location, "multiplicity": r.multiplicity, "kind": r.kind}
             for r in rep.records]
    return results, table


def cmd_oscillator(args):
    if args.n > 7:
        raise UsageError("oscillator checks support n <= 7")
    results = suites.oscillator_checks(args.n, SplitMix64(args.seed), trials=args.trials)
    return results, None


def cmd_vandermonde(args):
    if args.n > 8:
        raise UsageError("vandermonde checks support n <= 8")
    results = suites.vandermonde_checks(args.n, SplitMix64(args.seed))
    return results, None


COMMANDS = {
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "reconstruct": cmd_reconstruct,
    "oscillator": cmd_oscillator,
    "vandermonde": cmd_vandermonde,
}


def render(args, results, table) -> str:
    if args.format == "json":
        doc = {"config": _config(args), "results": results, "verdict": suites.verdict(results)}
        return json.dumps(doc, indent=2) + "\n"
    rows = table if table is not None else [
        {"id": r["id"], "passed": r["passed"]} for r in results]
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(args)
        results, table = COMMANDS[args.command](args)
    except (UsageError, PotentialSyntaxError, EvalDomainError, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NearSingular, UnresolvedZero) as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    text = render(args, results, table)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if suites.verdict(results) == "pass" else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
