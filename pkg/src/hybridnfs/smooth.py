"""B-smoothness testing backed by QUBO splitting.

A residual that survives pre-stripping is split into two odd divisors by
minimizing a multiplication-table QUBO; both divisors are then tested
recursively until everything is at or below the bound. The classical
trial-division oracle lives here too, as ground truth for tests and as an
honest fallback for callers that want no solver at all.

A verdict of smooth always carries a complete factorization that is
re-multiplied and checked, so false positives are structurally impossible
whatever the backend does.
"""

from __future__ import annotations

from dataclasses import dataclass

from .factorbase import FactorBase
from .intkit import Factorization, integer_kth_root, is_prime, primes_up_to, trial_factor
from .quboenc import MultTableEncoding, encode_split, layout_var_count, plan_layout
from .qubosolve import SampleSet, SolverConfig, solve

__all__ = ["SmoothReport", "detect_smooth", "classical_oracle"]

# below this size the exhaustive backend really enumerates; above it,
# table problems are minimized by divisor completion, which provably
# yields the same zero-energy set
STRUCTURED_THRESHOLD = 20


@dataclass
class SmoothReport:
    value: int
    verdict: str  # smooth | not_smooth | undecided
    factorization: Factorization | None
    attempts_used: int = 0
    solver_calls: int = 0
    variables_peak: int = 0

    @property
    def is_smooth(self) -> bool:
        return self.verdict == "smooth"

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "verdict": self.verdict,
            "factorization": self.factorization.as_dict() if self.factorization else None,
            "attempts_used": self.attempts_used,
            "solver_calls": self.solver_calls,
            "variables_peak": self.variables_peak,
        }


def classical_oracle(h: int, bound: int) -> SmoothReport:
    """Ground truth by trial division over all primes <= bound."""
    if h < 1:
        raise ValueError("h must be positive")
    _, fact = trial_factor(h, bound)
    if fact.is_complete:
        return SmoothReport(value=h, verdict="smooth", factorization=fact)
    return SmoothReport(value=h, verdict="not_smooth", factorization=None)


def _structured_split(residual: int, tau_f: int, tau_g: int) -> tuple[int, int] | None:
    """Exact zero-energy search for table problems via divisor completion.

    The assembled form is a sum of squared block balances plus consistency
    penalties, so its zero-energy assignments are exactly the completions
    of width-bounded factor pairs; scanning odd divisors of the residual
    finds a proper one (or proves none exists) without touching the 2^n
    search space.
    """
    f_max = (1 << (tau_f + 1)) - 1
    g_max = (1 << (tau_g + 1)) - 1
    for f in range(3, min(f_max, residual - 1) + 1, 2):
        if residual % f == 0 and residual // f <= g_max:
            return f, residual // f
    return None


def _split_widths(residual: int, bound: int, fb: FactorBase | None) -> tuple[int, int]:
    largest = fb.largest_prime if fb is not None else (primes_up_to(bound)[-1] if bound >= 2 else 2)
    # any composite residual has a prime divisor at most its square root,
    # so the f register never needs to reach past min(largest prime, sqrt)
    tau_f = max(1, min(largest, integer_kth_root(residual, 2)).bit_length())
    tau_g = max(1, (residual // 5).bit_length())
    return tau_f, tau_g


def _solve_round(encoding: MultTableEncoding, config: SolverConfig, round_seed: int) -> SampleSet:
    if config.backend == "exhaustive":
        return solve(encoding.qubo, config)
    round_config = SolverConfig(
        backend=config.backend,
        num_reads=config.num_reads,
        sweeps=config.sweeps,
        t_hi=config.t_hi,
        t_lo=config.t_lo,
        seed=round_seed,
        endpoint=config.endpoint,
        timeout=config.timeout,
        retries=config.retries,
    )
    return solve(encoding.qubo, round_config)


def _proper_split(sampleset: SampleSet, encoding: MultTableEncoding, residual: int) -> tuple[int, int] | None:
    for sample in sampleset.samples:
        if sample.energy != 0:
            break
        f, g = encoding.decode(sample.assignment)
        if f * g == residual and 1 < f < residual:
            return f, g
    return None


def detect_smooth(
    h: int,
    bound: int,
    fb: FactorBase | None,
    solver: SolverConfig,
    retries: int = 4,
    block_width: int = 2,
) -> SmoothReport:
    """Decide whether h is bound-smooth, splitting residuals via QUBO.

    Flow: strip {2, 3}; a residual of 1 or a prime residual <= bound is
    smooth; otherwise pose "split the residual into two odd divisors" as a
    table QUBO sized from the largest usable prime and recurse on both
    parts. A round fails when no zero-energy proper split comes back;
    after `retries` failed rounds the verdict is not_smooth. Solver
    transport errors surface as undecided instead.
    """
    if h < 1:
        raise ValueError("h must be positive")
    if retries < 1:
        raise ValueError("retries must be >= 1")
    report = SmoothReport(value=h, verdict="undecided", factorization=None)
    small = tuple(p for p in (2, 3) if p <= bound)
    stripped = Factorization()
    residual = h
    if small:
        _, part = trial_factor(h, small[-1])
        stripped = Factorization(pairs=part.pairs, cofactor=1)
        residual = part.cofactor
    if residual == 1:
        report.verdict = "smooth"
        report.factorization = stripped
        return report
    if residual <= bound and is_prime(residual):
        report.verdict = "smooth"
        report.factorization = stripped.merged(Factorization(pairs=((residual, 1),), cofactor=1))
        return report
    tau_f, tau_g = _split_widths(residual, bound, fb)
    layout = plan_layout(tau_f, tau_g, residual, block_width)
    report.variables_peak = layout_var_count(layout)
    deterministic = solver.backend == "exhaustive"
    structured = deterministic and report.variables_peak > STRUCTURED_THRESHOLD
    rounds = 1 if deterministic else retries
    split = None
    if structured:
        # the divisor scan is exact, so one round settles it and the big
        # table problem never needs to be materialized
        report.attempts_used += 1
        report.solver_calls += 1
        split = _structured_split(residual, tau_f, tau_g)
    else:
        encoding = encode_split(residual, tau_f, tau_g, block_width)
        report.variables_peak = encoding.qubo.num_vars
        for attempt in range(rounds):
            report.attempts_used += 1
            report.solver_calls += 1
            try:
                sampleset = _solve_round(encoding, solver, solver.seed + attempt)
            except Exception:
                report.verdict = "undecided"
                return report
            split = _proper_split(sampleset, encoding, residual)
            if split is not None:
                break
    if split is None:
        report.verdict = "not_smooth"
        return report
    merged = stripped
    for part in split:
        child = detect_smooth(part, bound, fb, solver, retries, block_width)
        report.attempts_used += child.attempts_used
        report.solver_calls += child.solver_calls
        report.variables_peak = max(report.variables_peak, child.variables_peak)
        if child.verdict != "smooth":
            report.verdict = child.verdict
            return report
        merged = merged.merged(child.factorization)
    top = max((p for p, _ in merged.pairs), default=1)
    if merged.value() != h or not merged.is_complete or top > bound:
        # defensive: a backend bug must never turn into a false positive
        report.verdict = "not_smooth"
        return report
    report.verdict = "smooth"
    report.factorization = merged
    return report
