"""Batch-factor seeded random semiprimes and tabulate the outcomes.

Generates products of two distinct odd primes at the requested bit sizes
and runs the full pipeline on each. The defaults reproduce the desk-scale
sweep used to pick the automatic degree policy: with the exhaustive
backend every 20-30 bit instance should factor in a few seconds.
"""

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hybridnfs.intkit import is_prime
from hybridnfs.pipeline import GaveUp, RunConfig, factor
from hybridnfs.qubosolve import SolverConfig


def random_semiprime(rng: random.Random, bits: int) -> int:
    while True:
        p = rng.randrange(3, 1 << (bits // 2 + 1), 2)
        q = rng.randrange(3, 1 << (bits - bits // 2 + 1), 2)
        n = p * q
        if p != q and is_prime(p) and is_prime(q) and n.bit_length() == bits:
            return n


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=10)
    parser.add_argument("--min-bits", type=int, default=20)
    parser.add_argument("--max-bits", type=int, default=30)
    parser.add_argument("--smooth-bound", type=int, default=224)
    parser.add_argument("--b-max", type=int, default=4)
    parser.add_argument("--a-ceiling", type=int, default=1 << 14)
    parser.add_argument("--backend", default="exhaustive")
    parser.add_argument("--num-reads", type=int, default=10)
    parser.add_argument("--sweeps", type=int, default=120)
    parser.add_argument("--retries", type=int, default=2)
    parser.add_argument("--seed", type=int, default=29)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    successes = 0
    for trial in range(args.trials):
        bits = rng.randrange(args.min_bits, args.max_bits + 1)
        n = random_semiprime(rng, bits)
        solver = SolverConfig(
            backend=args.backend,
            num_reads=args.num_reads,
            sweeps=args.sweeps,
            seed=trial + 1,
        )
        config = RunConfig(
            n=n,
            smooth_bound=args.smooth_bound,
            b_max=args.b_max,
            a_ceiling=args.a_ceiling,
            retries=args.retries,
            solver=solver,
        )
        t0 = time.perf_counter()
        try:
            report = factor(config)
        except GaveUp as exc:
            report = exc.report
        elapsed = time.perf_counter() - t0
        ok = report.outcome == "factored"
        successes += ok
        factors = " x ".join(str(f) for f in report.factors) if ok else "-"
        print(
            f"[{trial + 1:2d}/{args.trials}] n={n} ({bits}b) {report.outcome:<9}"
            f" {factors:<17} rels={report.relations:<3d}"
            f" rounds={report.rounds} a={report.a_final:<4d} {elapsed:6.2f}s"
        )
    print(f"\n{successes}/{args.trials} factored")
    return 0 if successes == args.trials else 1


if __name__ == "__main__":
    raise SystemExit(main())
