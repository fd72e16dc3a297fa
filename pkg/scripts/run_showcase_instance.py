"""Factor the 29-bit showcase semiprime 448383577 end to end.

Runs the full pipeline with the exhaustive splitting backend and the
documented desk-scale parameters, then prints the run report. Use
--relations-out to keep the accepted relation dump.
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hybridnfs.pipeline import RunConfig, factor, report_emit
from hybridnfs.qubosolve import SolverConfig


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=448383577)
    parser.add_argument("--degree", type=int, default=4)
    parser.add_argument("--smooth-bound", type=int, default=224)
    parser.add_argument("--b-max", type=int, default=2)
    parser.add_argument("--width-limit", type=int, default=13)
    parser.add_argument("--char-cols", type=int, default=1)
    parser.add_argument("--backend", default="exhaustive")
    parser.add_argument("--num-reads", type=int, default=10000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--format", choices=("json", "text"), default="text")
    parser.add_argument("--relations-out", default="")
    args = parser.parse_args()

    config = RunConfig(
        n=args.n,
        degree=args.degree,
        smooth_bound=args.smooth_bound,
        b_max=args.b_max,
        width_limit=args.width_limit,
        num_characters=args.char_cols,
        solver=SolverConfig(
            backend=args.backend, num_reads=args.num_reads, seed=args.seed
        ),
        seed=args.seed,
        relations_out=args.relations_out or None,
    )
    t0 = time.perf_counter()
    report = factor(config)
    elapsed = time.perf_counter() - t0
    print(report_emit(report, args.format))
    print(f"\nwall time: {elapsed:.2f}s")
    return 0 if report.outcome == "factored" else 1


if __name__ == "__main__":
    raise SystemExit(main())
