"""End-to-end factorization: polynomial selection, sieving with QUBO-backed
smoothness tests, GF(2) dependencies, square roots, gcd extraction.

The sieve region grows geometrically (a-range doubles) until some dependency
yields a nontrivial divisor or the configured ceiling is hit. Everything is
deterministic for a fixed config, including the annealing backend, so runs
are exactly reproducible.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace

from .factorbase import FactorBase, build
from .gf2 import build_matrix, dependency_order, nullspace
from .intkit import is_perfect_power, is_prime
from .polyselect import NfsPolynomial, NonMonicExpansion, select_polynomial, screen_reducible
from .qubosolve import SolverConfig
from .sieve import (
    AmbiguousIdeal,
    Candidate,
    CharacterDegenerate,
    Relation,
    assemble_relation,
    enumerate_pairs,
    side_values,
    width_filter,
    write_relations,
)
from .smooth import SmoothReport, detect_smooth
from .sqrtstage import NoSquareRoot, NotASquare, process_dependency

__all__ = ["RunConfig", "RunReport", "GaveUp", "factor", "report_emit"]


@dataclass(frozen=True)
class RunConfig:
    n: int
    degree: int = 0  # 0: pick from the bit length
    smooth_bound: int = 224
    b_max: int = 2
    a_initial: int = 8
    a_ceiling: int = 1 << 14
    width_limit: int = 0  # 0: sized from m and the bound
    num_characters: int = 1
    block_width: int = 2
    solver: SolverConfig = field(default_factory=SolverConfig)
    retries: int = 4
    seed: int = 0
    corrected_sqrt: bool = True
    relations_out: str | None = None
    report_out: str | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.retries < 1:
            raise ValueError("retries must be >= 1")
        if self.smooth_bound < 2:
            raise ValueError("smooth bound must be >= 2")
        if self.a_initial < 1 or self.b_max < 1:
            raise ValueError("sieve region must be nonempty")
        if self.width_limit and self.width_limit < self.smooth_bound.bit_length():
            raise ValueError("width limit must cover the smoothness bound")


@dataclass
class RunReport:
    n: int
    outcome: str = "unstarted"  # factored | prime | perfect_power | gave_up
    factors: tuple[int, ...] = ()
    degree: int = 0
    m: int = 0
    poly_coeffs: tuple[int, ...] = ()
    relations: int = 0
    matrix_rows: int = 0
    matrix_cols: int = 0
    dependencies_tried: int = 0
    variables_peak: dict = field(default_factory=lambda: {"integer": 0, "algebraic": 0})
    solver_calls: int = 0
    undecided_candidates: int = 0
    rounds: int = 0
    a_final: int = 0
    wall_times: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "outcome": self.outcome,
            "factors": list(self.factors),
            "degree": self.degree,
            "m": self.m,
            "poly_coeffs": list(self.poly_coeffs),
            "relations": self.relations,
            "matrix_rows": self.matrix_rows,
            "matrix_cols": self.matrix_cols,
            "dependencies_tried": self.dependencies_tried,
            "variables_peak": dict(self.variables_peak),
            "solver_calls": self.solver_calls,
            "undecided_candidates": self.undecided_candidates,
            "rounds": self.rounds,
            "a_final": self.a_final,
            "wall_times": {k: round(v, 6) for k, v in self.wall_times.items()},
        }


class GaveUp(Exception):
    """Sieve region ceiling reached without a factorization; carries the
    partial report."""

    def __init__(self, report: RunReport):
        super().__init__(f"gave up on {report.n} after a-range {report.a_final}")
        self.report = report


def report_emit(report: RunReport, format: str = "json") -> str:
    doc = report.as_dict()
    if format == "json":
        return json.dumps(doc, indent=2, sort_keys=True)
    if format == "text":
        lines = []
        for key, value in doc.items():
            if isinstance(value, dict):
                inner = ", ".join(f"{k}={v}" for k, v in value.items())
                lines.append(f"{key}: {inner}")
            elif isinstance(value, list):
                lines.append(f"{key}: {' '.join(str(v) for v in value)}")
            else:
                lines.append(f"{key}: {value}")
        return "\n".join(lines)
    raise ValueError(f"unknown format {format!r}")


class _Stopwatch:
    def __init__(self, times: dict):
        self.times = times

    def add(self, stage: str, t0: float) -> float:
        now = time.perf_counter()
        self.times[stage] = self.times.get(stage, 0.0) + (now - t0)
        return now


def _select_with_fallback(n: int, degree: int) -> NfsPolynomial:
    last: Exception | None = None
    for d in range(degree, 1, -1):
        try:
            return select_polynomial(n, d)
        except (NonMonicExpansion, ValueError) as exc:
            last = exc
    raise last if last else ValueError("no usable degree")


def _finish(report: RunReport, config: RunConfig, relations: list[Relation],
            poly: NfsPolynomial | None, fb: FactorBase | None,
            width: int = 0) -> RunReport:
    if config.relations_out and poly is not None and fb is not None:
        with open(config.relations_out, "w", encoding="utf-8") as out:
            write_relations(out, relations, poly, fb, width)
    if config.report_out:
        with open(config.report_out, "w", encoding="utf-8") as out:
            out.write(report_emit(report, "json") + "\n")
    return report


def _auto_width(config: RunConfig, poly: NfsPolynomial) -> int:
    return max(config.smooth_bound.bit_length() + 1, poly.m.bit_length() + 5)


def factor(config: RunConfig) -> RunReport:
    """Run the whole pipeline; returns the report on success and raises
    GaveUp (with the partial report attached) when the region is exhausted."""
    n = config.n
    report = RunReport(n=n)
    times = report.wall_times
    watch = _Stopwatch(times)
    t0 = time.perf_counter()

    if is_prime(n):
        report.outcome = "prime"
        report.factors = (n,)
        watch.add("guards", t0)
        return _finish(report, config, [], None, None)
    power = is_perfect_power(n)
    if power is not None:
        base, k = power
        report.outcome = "perfect_power"
        report.factors = (base,) * k
        watch.add("guards", t0)
        return _finish(report, config, [], None, None)
    if n % 2 == 0:
        report.outcome = "factored"
        report.factors = (2, n // 2)
        watch.add("guards", t0)
        return _finish(report, config, [], None, None)
    t0 = watch.add("guards", t0)

    # quadratic fields win at desk scale: norms grow like a^2 so the sieve
    # keeps supplying candidates as the region doubles; higher degrees only
    # pay off once n is far beyond this toolkit's reach
    degree = config.degree or (2 if n.bit_length() <= 40 else 3)
    poly = _select_with_fallback(n, degree)
    report.degree = poly.degree
    report.m = poly.m
    report.poly_coeffs = poly.coeffs
    shortcut = screen_reducible(poly)
    if shortcut is not None:
        report.outcome = "factored"
        report.factors = tuple(sorted((shortcut, n // shortcut)))
        watch.add("polyselect", t0)
        return _finish(report, config, [], None, None)
    t0 = watch.add("polyselect", t0)

    fb = build(poly, config.smooth_bound, config.num_characters)
    report.matrix_cols = fb.num_columns
    t0 = watch.add("factorbase", t0)

    width = config.width_limit or _auto_width(config, poly)
    solver = config.solver
    if solver.seed == 0 and config.seed:
        solver = replace(solver, seed=config.seed)

    relations: list[Relation] = []
    smooth_cache: dict[int, SmoothReport] = {}
    tested: set[tuple[int, int]] = set()
    surplus = fb.num_columns + 3
    # With an explicit width the filter stays fixed, per the documented loop.
    # In auto mode the width relaxes after unproductive rounds so the region
    # keeps supplying candidates once the initial band is exhausted.
    width_cap = n.bit_length() + 4

    def check_side(value: int, side: str) -> SmoothReport:
        cached = smooth_cache.get(value)
        if cached is None:
            cached = detect_smooth(
                value, config.smooth_bound, fb, solver,
                retries=config.retries, block_width=config.block_width,
            )
            smooth_cache[value] = cached
            report.solver_calls += cached.solver_calls
        report.variables_peak[side] = max(report.variables_peak[side], cached.variables_peak)
        return cached

    a_range = config.a_initial
    while a_range <= config.a_ceiling:
        report.rounds += 1
        report.a_final = a_range
        for a, b in enumerate_pairs(a_range, config.b_max):
            if (a, b) in tested:
                continue
            int_side, norm = side_values(a, b, poly)
            cand = Candidate(a=a, b=b, int_side=int_side, norm=norm)
            if int_side == 0 or norm == 0 or not width_filter(cand, width):
                continue
            tested.add((a, b))
            int_report = check_side(abs(int_side), "integer")
            if int_report.verdict == "undecided":
                report.undecided_candidates += 1
                continue
            if not int_report.is_smooth:
                continue
            norm_report = check_side(abs(norm), "algebraic")
            if norm_report.verdict == "undecided":
                report.undecided_candidates += 1
                continue
            if not norm_report.is_smooth:
                continue
            try:
                rel = assemble_relation(
                    a, b, int_side, norm,
                    int_report.factorization, norm_report.factorization, fb,
                )
            except (AmbiguousIdeal, CharacterDegenerate):
                continue
            relations.append(rel)
            if len(relations) >= surplus:
                break
        report.relations = len(relations)
        t0 = watch.add("sieve", t0)

        if relations:
            matrix = build_matrix(relations, fb)
            report.matrix_rows = matrix.num_rows
            basis = nullspace(matrix)
            t0 = watch.add("linalg", t0)
            for mask in dependency_order(basis):
                report.dependencies_tried += 1
                pairs = [
                    (rel.a, rel.b)
                    for i, rel in enumerate(relations)
                    if (mask >> i) & 1
                ]
                try:
                    result = process_dependency(pairs, poly, n, corrected=config.corrected_sqrt)
                except (NotASquare, NoSquareRoot):
                    continue
                if result.divisor is not None:
                    report.outcome = "factored"
                    report.factors = tuple(sorted((result.divisor, n // result.divisor)))
                    watch.add("sqrt", t0)
                    return _finish(report, config, relations, poly, fb, width)
            t0 = watch.add("sqrt", t0)

        a_range *= 2
        if config.width_limit == 0 and width < width_cap:
            width = min(width + 2, width_cap)

    report.outcome = "gave_up"
    _finish(report, config, relations, poly, fb, width)
    raise GaveUp(report)
