"""Command-line driver.

Commands::

    sgve solve FILE (--lambda L | --n N) [--resolution R] [--tol T] [--eps E]
    sgve curve FILE (--lambda-grid L1,L2,... | --n-grid N1,N2,...) [--out CSV]
    sgve bench --suite {mckinsey,exshap,properties,pf,all}
    sgve growth MAPFILE [--n N] [--e E1,E2,...]

FILE is a JSON game document or a builtin pseudo-path like
``bench:exshap``.  Exit codes: 0 success, 2 usage or input error,
3 numerical failure.  Identical invocations produce byte-identical output;
the SGVE_THREADS environment variable caps worker parallelism (0 = auto;
the current implementation is single-threaded, which trivially honors any
cap).
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import values
from .bench import SUITES, run_suite
from .errors import (EvalDomainError, GameSpecError, IterationBudgetError,
                     MatrixGameError, PositivityError, SgveError)
from .game import discretize
from .gamefile import game_spec_from_document, load_game_document, load_monotone_map
from .pf import growth_rate
from .shapley import ShapleyOperator

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

_INPUT_ERRORS = (GameSpecError, EvalDomainError)
_NUMERICAL_ERRORS = (MatrixGameError, IterationBudgetError, PositivityError)


def _float_list(text: str) -> list[float]:
    try:
        items = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")
    if not items:
        raise argparse.ArgumentTypeError("empty list")
    return items


def _int_list(text: str) -> list[int]:
    try:
        items = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")
    if not items:
        raise argparse.ArgumentTypeError("empty list")
    return items


def _build_operator(path: str, resolution: int, tol: float) -> ShapleyOperator:
    spec, kind = game_spec_from_document(load_game_document(path))
    return ShapleyOperator(discretize(spec, resolution), form=kind, tol=tol)


def _cmd_solve(args) -> int:
    op = _build_operator(args.file, args.resolution, args.tol)
    if args.discount is not None:
        result = values.discounted_value_detailed(op, args.discount, args.eps)
        v = result.value
        # one extra application certifies the fixed point independently
        psi, gaps = op.apply_with_gaps(((1.0 - args.discount) / args.discount) * v
                                       if args.discount < 1.0 else np.zeros(op.dim))
        residual = float(np.abs(args.discount * psi - v).max())
        for k, vk in enumerate(v):
            print(f"state {k}: {float(vk)!r}")
        print(f"iterations: {result.iterations}")
        print(f"fixed-point residual: {residual!r}")
        print(f"max duality gap: {float(gaps.max())!r}")
    else:
        v = values.value_iteration(op, args.stages)
        for k, vk in enumerate(v):
            print(f"state {k}: {float(vk)!r}")
        print(f"iterations: {args.stages}")
        print(f"duality-gap tolerance: {args.tol!r}")
    return EXIT_OK


def _write_csv(rows: list[list[str]], out: str | None) -> None:
    text = "\n".join(",".join(row) for row in rows) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _cmd_curve(args) -> int:
    op = _build_operator(args.file, args.resolution, args.tol)
    d = op.dim
    header_v = [f"v{k}" for k in range(d)]
    if args.lambda_grid is not None:
        rows = [["lambda", *header_v, "iterations", "residual"]]
        for lam in args.lambda_grid:
            res = values.discounted_value_detailed(op, lam, args.eps)
            bound = res.last_step * (1.0 - lam) / lam if lam < 1.0 else 0.0
            rows.append([repr(lam), *[repr(float(x)) for x in res.value],
                         str(res.iterations), repr(bound)])
    else:
        rows = [["n", *header_v, "iterations"]]
        for n, vn in values.n_stage_series(op, args.n_grid):
            rows.append([repr(float(n)), *[repr(float(x)) for x in vn], str(n)])
    _write_csv(rows, args.out)
    return EXIT_OK


def _cmd_bench(args) -> int:
    results = run_suite(args.suite, solver_tol=args.tol)
    failed = 0
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        print(f"[{tag}] {r.index:2d} {r.name}: {r.summary}")
        for line in r.details:
            print(f"        {line}")
        failed += 0 if r.passed else 1
    if failed:
        print(f"{failed} criteria FAILED")
        return EXIT_NUMERICAL
    print(f"all {len(results)} criteria passed")
    return EXIT_OK


def _cmd_growth(args) -> int:
    T = load_monotone_map(args.mapfile)
    e = np.ones(T.d) if args.start is None else np.asarray(args.start, dtype=float)
    if e.shape != (T.d,):
        raise GameSpecError(f"--e must list {T.d} starting values")
    chi = growth_rate(T, e, args.n)
    print("growth rate:", " ".join(repr(float(x)) for x in chi))
    if args.n >= 2:
        chi_half = growth_rate(T, e, args.n // 2)
        diag = float(np.abs(chi - chi_half).max())
        print(f"cauchy difference vs n/2: {diag!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sgve",
        description="Finite-state zero-sum stochastic game values and "
                    "positive-cone growth rates.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="discounted or n-stage values of a game")
    solve.add_argument("file", help="game JSON path or bench:<name>")
    solve.add_argument("--resolution", type=int, default=201,
                       help="grid points per action dimension (default 201)")
    group = solve.add_mutually_exclusive_group(required=True)
    group.add_argument("--lambda", dest="discount", type=float,
                       help="discount factor in (0, 1]")
    group.add_argument("--n", dest="stages", type=int, help="horizon length")
    solve.add_argument("--tol", type=float, default=1e-6,
                       help="duality-gap tolerance per matrix game (default 1e-6)")
    solve.add_argument("--eps", type=float, default=1e-6,
                       help="fixed-point accuracy for discounted values (default 1e-6)")
    solve.set_defaults(run=_cmd_solve)

    curve = sub.add_parser("curve", help="value curves over a parameter grid as CSV")
    curve.add_argument("file")
    curve.add_argument("--resolution", type=int, default=201)
    group = curve.add_mutually_exclusive_group(required=True)
    group.add_argument("--lambda-grid", dest="lambda_grid", type=_float_list,
                       help="comma-separated discount factors")
    group.add_argument("--n-grid", dest="n_grid", type=_int_list,
                       help="comma-separated horizons")
    curve.add_argument("--tol", type=float, default=1e-6)
    curve.add_argument("--eps", type=float, default=1e-6)
    curve.add_argument("--out", default=None, help="CSV output path (default stdout)")
    curve.set_defaults(run=_cmd_curve)

    bench = sub.add_parser("bench", help="run the acceptance benchmark suites")
    bench.add_argument("--suite", required=True, choices=sorted(SUITES))
    bench.add_argument("--tol", type=float, default=1e-6,
                       help="duality-gap tolerance for the benchmark-grid "
                            "solves (criterion-pinned tolerances are fixed)")
    bench.set_defaults(run=_cmd_bench)

    growth = sub.add_parser("growth", help="geometric growth rate of a monotone map")
    growth.add_argument("mapfile", help="monotone-map JSON path")
    growth.add_argument("--n", type=int, default=10_000,
                        help="iteration horizon (default 10000)")
    growth.add_argument("--e", dest="start", type=_float_list, default=None,
                        help="starting vector (default all ones)")
    growth.set_defaults(run=_cmd_growth)
    return parser


def main(argv=None) -> int:
    threads = os.environ.get("SGVE_THREADS")
    if threads is not None:
        try:
            if int(threads) < 0:
                raise ValueError
        except ValueError:
            print(f"warning: ignoring invalid SGVE_THREADS={threads!r}",
                  file=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SgveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
