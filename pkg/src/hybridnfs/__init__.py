"""Hybrid integer factorization: a number field sieve whose smoothness
tests are posed as QUBO minimization over interchangeable solver backends."""

from .intkit import Factorization
from .pipeline import GaveUp, RunConfig, RunReport, factor, report_emit
from .polyselect import NfsPolynomial, select_polynomial
from .quboenc import MultTableEncoding, QuboProblem, direct_qubo, encode_split
from .qubosolve import SampleSet, SolverConfig, solve
from .smooth import SmoothReport, classical_oracle, detect_smooth

__version__ = "0.1.0"

__all__ = [
    "Factorization",
    "GaveUp",
    "MultTableEncoding",
    "NfsPolynomial",
    "QuboProblem",
    "RunConfig",
    "RunReport",
    "SampleSet",
    "SmoothReport",
    "SolverConfig",
    "classical_oracle",
    "detect_smooth",
    "direct_qubo",
    "encode_split",
    "factor",
    "report_emit",
    "select_polynomial",
    "solve",
    "__version__",
]
