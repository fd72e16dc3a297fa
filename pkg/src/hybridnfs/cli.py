"""Command-line entry points: factor, smooth-check, qubo, solve-qubo.

Every flag can also come from a key=value config file (--config); values
given on the command line always win over the file.
"""

from __future__ import annotations

import argparse
import json
import sys

from .pipeline import GaveUp, RunConfig, factor, report_emit
from .quboenc import encode_split, read_qubo, write_qubo
from .qubosolve import RemoteError, SolverConfig, solve
from .smooth import detect_smooth

__all__ = ["main"]

MAX_RETRIES = 9

# (flag, type, default, help); type "flag" marks store_true options
_SOLVER_OPTS = [
    ("--backend", str, "exhaustive", "exhaustive | sa | remote"),
    ("--num-reads", int, 10000, "samples per solver call"),
    ("--sweeps", int, 1000, "annealing sweeps per read"),
    ("--seed", int, 0, "base RNG seed"),
    ("--endpoint", str, "", "remote solver URL"),
    ("--timeout", float, 10.0, "remote timeout in seconds"),
]

_FACTOR_OPTS = [
    ("--degree", int, 0, "polynomial degree, 0 = automatic"),
    ("--smooth-bound", int, 224, "factor base bound B"),
    ("--b-max", int, 2, "largest sieve b"),
    ("--a-initial", int, 8, "starting a-range"),
    ("--a-ceiling", int, 1 << 14, "a-range giving up point"),
    ("--width-limit", int, 0, "bit width cap W, 0 = automatic"),
    ("--char-cols", int, 1, "number of quadratic character columns"),
    ("--block-width", int, 2, "table block width"),
    ("--retries", int, 4, f"solver rounds per split, at most {MAX_RETRIES}"),
    ("--relations-out", str, "", "write accepted relations here"),
    ("--report", str, "", "write the JSON run report here"),
    ("--format", str, "json", "stdout report format: json | text"),
]


def _add_options(parser: argparse.ArgumentParser, table) -> None:
    for flag, typ, default, help_text in table:
        if typ == "flag":
            parser.add_argument(flag, action="store_true", help=help_text)
        else:
            parser.add_argument(flag, type=typ, default=default, help=help_text)


def _parse_config_file(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as src:
        for raw in src:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SystemExit(f"bad config line (need key=value): {line!r}")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(args: argparse.Namespace, tables, argv: list[str]) -> None:
    if not args.config:
        return
    file_values = _parse_config_file(args.config)
    explicit = set()
    for token in argv:
        if token.startswith("--"):
            explicit.add(token.split("=")[0][2:].replace("-", "_"))
    for table in tables:
        for flag, typ, _, _ in table:
            dest = flag[2:].replace("-", "_")
            if dest in explicit or dest not in file_values:
                continue
            raw = file_values[dest]
            if typ == "flag":
                setattr(args, dest, raw.lower() in ("1", "true", "yes", "on"))
            else:
                setattr(args, dest, typ(raw))


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(
        backend=args.backend,
        num_reads=args.num_reads,
        sweeps=args.sweeps,
        seed=args.seed,
        endpoint=args.endpoint,
        timeout=args.timeout,
    )


def _check_retries(parser: argparse.ArgumentParser, retries: int) -> None:
    if not 1 <= retries <= MAX_RETRIES:
        parser.error(f"--retries must be between 1 and {MAX_RETRIES}")


def _cmd_factor(args, parser, argv) -> int:
    _apply_config(args, [_SOLVER_OPTS, _FACTOR_OPTS, [("--n", int, 0, "")]], argv)
    if not args.n:
        parser.error("--n is required")
    _check_retries(parser, args.retries)
    config = RunConfig(
        n=args.n,
        degree=args.degree,
        smooth_bound=args.smooth_bound,
        b_max=args.b_max,
        a_initial=args.a_initial,
        a_ceiling=args.a_ceiling,
        width_limit=args.width_limit,
        num_characters=args.char_cols,
        block_width=args.block_width,
        solver=_solver_config(args),
        retries=args.retries,
        seed=args.seed,
        corrected_sqrt=not args.no_sqrt_correction,
        relations_out=args.relations_out or None,
        report_out=args.report or None,
    )
    try:
        report = factor(config)
    except GaveUp as exc:
        print(report_emit(exc.report, args.format))
        return 1
    print(report_emit(report, args.format))
    return 0


def _cmd_smooth_check(args, parser, argv) -> int:
    _apply_config(
        args,
        [_SOLVER_OPTS, [("--h", int, 0, ""), ("--bound", int, 224, ""),
                        ("--retries", int, 4, ""), ("--block-width", int, 2, "")]],
        argv,
    )
    if not args.h:
        parser.error("--h is required")
    _check_retries(parser, args.retries)
    report = detect_smooth(
        args.h, args.bound, None, _solver_config(args),
        retries=args.retries, block_width=args.block_width,
    )
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def _cmd_qubo(args, parser, argv) -> int:
    _apply_config(
        args,
        [[("--h", int, 0, ""), ("--tau-f", int, 0, ""), ("--tau-g", int, 0, ""),
          ("--block-width", int, 2, ""), ("--out", str, "-", "")]],
        argv,
    )
    if not (args.h and args.tau_f and args.tau_g):
        parser.error("--h, --tau-f, --tau-g are required")
    encoding = encode_split(args.h, args.tau_f, args.tau_g, args.block_width)
    if args.out == "-":
        write_qubo(encoding.qubo, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8") as out:
            write_qubo(encoding.qubo, out)
    return 0


def _cmd_solve_qubo(args, parser, argv) -> int:
    _apply_config(args, [_SOLVER_OPTS, [("--file", str, "", ""), ("--top", int, 10, "")]], argv)
    if not args.file:
        parser.error("--file is required")
    with open(args.file, encoding="utf-8") as src:
        problem = read_qubo(src)
    try:
        result = solve(problem, _solver_config(args))
    except RemoteError as exc:
        print(json.dumps({"error": str(exc)}))
        return 1
    doc = {
        "num_vars": problem.num_vars,
        "samples": [
            {"assignment": s.bitstring, "energy": s.energy, "occurrences": s.occurrences}
            for s in result.samples[: args.top]
        ],
        "metadata": result.metadata,
    }
    print(json.dumps(doc, indent=2))
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = argparse.ArgumentParser(prog="hybridnfs",
                                     description="integer factorization with QUBO-backed smoothness testing")
    sub = parser.add_subparsers(dest="command", required=True)

    p_factor = sub.add_parser("factor", help="factor an integer end to end")
    p_factor.add_argument("--n", type=int, default=0, help="integer to factor")
    _add_options(p_factor, _FACTOR_OPTS)
    _add_options(p_factor, _SOLVER_OPTS)
    p_factor.add_argument("--no-sqrt-correction", action="store_true",
                          help="skip the derivative-squared factor in the algebraic square")
    p_factor.add_argument("--config", default="", help="key=value file mirroring the flags")

    p_smooth = sub.add_parser("smooth-check", help="test one integer for smoothness")
    p_smooth.add_argument("--h", type=int, default=0, help="integer to test")
    p_smooth.add_argument("--bound", type=int, default=224, help="smoothness bound")
    p_smooth.add_argument("--retries", type=int, default=4)
    p_smooth.add_argument("--block-width", type=int, default=2)
    _add_options(p_smooth, _SOLVER_OPTS)
    p_smooth.add_argument("--config", default="")

    p_qubo = sub.add_parser("qubo", help="emit the splitting QUBO for h")
    p_qubo.add_argument("--h", type=int, default=0)
    p_qubo.add_argument("--tau-f", type=int, default=0)
    p_qubo.add_argument("--tau-g", type=int, default=0)
    p_qubo.add_argument("--block-width", type=int, default=2)
    p_qubo.add_argument("--out", default="-")
    p_qubo.add_argument("--config", default="")

    p_solve = sub.add_parser("solve-qubo", help="minimize a QUBO file")
    p_solve.add_argument("--file", default="")
    p_solve.add_argument("--top", type=int, default=10)
    _add_options(p_solve, _SOLVER_OPTS)
    p_solve.add_argument("--config", default="")

    args = parser.parse_args(argv)
    handlers = {
        "factor": (_cmd_factor, p_factor),
        "smooth-check": (_cmd_smooth_check, p_smooth),
        "qubo": (_cmd_qubo, p_qubo),
        "solve-qubo": (_cmd_solve_qubo, p_solve),
    }
    handler, subparser = handlers[args.command]
    return handler(args, subparser, argv)


if __name__ == "__main__":
    raise SystemExit(main())
