"""QUBO minimization backends with a uniform sampling contract.

Three interchangeable solvers: exact enumeration (gray-code sweep, all
global minima), simulated annealing (seeded, bit-identical regardless of
thread count), and a remote HTTP sampler speaking a small JSON protocol.
All reported energies are re-derived with exact integer arithmetic before
a SampleSet is returned, so downstream acceptance logic never trusts
floating point or a remote peer.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .quboenc import QuboProblem

__all__ = [
    "TooManyVariables",
    "RemoteError",
    "ProtocolError",
    "SolverConfig",
    "Sample",
    "SampleSet",
    "evaluate",
    "solve_exhaustive",
    "solve_sa",
    "solve_remote",
    "solve",
]

EXHAUSTIVE_VAR_LIMIT = 28
TOKEN_ENV_VAR = "QUBO_REMOTE_TOKEN"


class TooManyVariables(Exception):
    """Problem too large for exact enumeration."""


class RemoteError(Exception):
    """Transport, auth, or timeout failure after the configured retries."""


class ProtocolError(Exception):
    """Remote response does not match the JSON contract."""


@dataclass(frozen=True)
class SolverConfig:
    backend: str = "exhaustive"  # exhaustive | simulated_annealing | remote
    num_reads: int = 10000
    sweeps: int = 1000
    t_hi: float | None = None  # None: 10 * max |coefficient|
    t_lo: float = 0.1
    seed: int = 0
    endpoint: str = ""
    timeout: float = 10.0
    retries: int = 2  # extra transport attempts for the remote backend

    def __post_init__(self) -> None:
        if self.num_reads < 1:
            raise ValueError("num_reads must be >= 1")
        if self.sweeps < 0:
            raise ValueError("sweeps must be >= 0")
        if self.t_hi is not None and self.t_hi <= self.t_lo:
            raise ValueError("need t_hi > t_lo")
        if self.t_lo <= 0:
            raise ValueError("need t_lo > 0")


@dataclass(frozen=True)
class Sample:
    assignment: tuple[int, ...]
    energy: int
    occurrences: int = 1

    @property
    def bitstring(self) -> str:
        return "".join(str(b) for b in self.assignment)


@dataclass
class SampleSet:
    samples: list[Sample]
    metadata: dict = field(default_factory=dict)

    def best(self) -> Sample:
        return self.samples[0]

    @property
    def min_energy(self) -> int:
        return self.samples[0].energy

    def zero_energy(self) -> list[Sample]:
        return [s for s in self.samples if s.energy == 0]


def evaluate(problem: QuboProblem, assignment) -> int:
    """Exact energy offset + sum(beta_i u_i) + sum(delta_ij u_i u_j)."""
    if len(assignment) != problem.num_vars:
        raise ValueError(
            f"assignment has {len(assignment)} bits, problem has {problem.num_vars}"
        )
    e = problem.offset
    for i, c in problem.linear.items():
        if assignment[i]:
            e += c
    for (i, j), c in problem.quadratic.items():
        if assignment[i] and assignment[j]:
            e += c
    return e


def _dense_matrix(problem: QuboProblem) -> np.ndarray:
    n = problem.num_vars
    qmat = np.zeros((n, n), dtype=np.float64)
    for i, c in problem.linear.items():
        qmat[i, i] = c
    for (i, j), c in problem.quadratic.items():
        qmat[i, j] = c
        qmat[j, i] = c
    return qmat


def _float_exact(problem: QuboProblem) -> bool:
    # float64 sums of integers stay exact below 2**53
    total = abs(problem.offset) + sum(abs(c) for c in problem.linear.values())
    total += sum(abs(c) for c in problem.quadratic.values())
    return total < (1 << 53)


def _sorted_samples(counter: dict[tuple[int, ...], int], problem: QuboProblem) -> list[Sample]:
    samples = [
        Sample(assignment=bits, energy=evaluate(problem, bits), occurrences=occ)
        for bits, occ in counter.items()
    ]
    samples.sort(key=lambda s: (s.energy, s.assignment))
    return samples


# numba kernels are compiled on first use and cached on disk


def _kernels():
    from numba import njit, prange

    @njit(cache=True)
    def enum_kernel(qmat, offset, n, cap):
        x = np.zeros(n, dtype=np.uint8)
        fld = np.empty(n, dtype=np.float64)
        for k in range(n):
            fld[k] = qmat[k, k]
        e = offset
        best = e
        out = np.empty(cap, dtype=np.uint32)
        out[0] = 0
        count = 1
        code = 0
        total = 1 << n
        for t in range(1, total):
            k = 0
            tt = t
            while tt & 1 == 0:
                tt >>= 1
                k += 1
            s = 1.0 - 2.0 * x[k]
            e += s * fld[k]
            x[k] = 1 - x[k]
            code ^= 1 << k
            for j in range(n):
                if j != k:
                    fld[j] += s * qmat[k, j]
            if e < best:
                best = e
                out[0] = code
                count = 1
            elif e == best:
                if count < cap:
                    out[count] = code
                count += 1
        return best, count, out

    @njit(cache=True, parallel=True)
    def sa_kernel(qmat, n, num_reads, temps, seed, out_bits):
        mult1 = np.uint64(0xBF58476D1CE4E5B9)
        mult2 = np.uint64(0x94D049BB133111EB)
        gamma = np.uint64(0x9E3779B97F4A7C15)
        for r in prange(num_reads):
            state = np.uint64(seed) ^ np.uint64(r)
            x = np.zeros(n, dtype=np.uint8)
            for k in range(n):
                state = state + gamma
                z = state
                z = (z ^ (z >> np.uint64(30))) * mult1
                z = (z ^ (z >> np.uint64(27))) * mult2
                z = z ^ (z >> np.uint64(31))
                x[k] = np.uint8(z & np.uint64(1))
            fld = np.empty(n, dtype=np.float64)
            for k in range(n):
                acc = qmat[k, k]
                for j in range(n):
                    if j != k and x[j]:
                        acc += qmat[k, j]
                fld[k] = acc
            for si in range(temps.shape[0]):
                t_cur = temps[si]
                for k in range(n):
                    s = 1.0 - 2.0 * x[k]
                    de = s * fld[k]
                    accept = de <= 0.0
                    if not accept:
                        state = state + gamma
                        z = state
                        z = (z ^ (z >> np.uint64(30))) * mult1
                        z = (z ^ (z >> np.uint64(27))) * mult2
                        z = z ^ (z >> np.uint64(31))
                        u = (z >> np.uint64(11)) * (1.0 / 9007199254740992.0)
                        accept = u < np.exp(-de / t_cur)
                    if accept:
                        x[k] = 1 - x[k]
                        for j in range(n):
                            if j != k:
                                fld[j] += s * qmat[k, j]
            for k in range(n):
                out_bits[r, k] = x[k]

    return enum_kernel, sa_kernel


_ENUM_KERNEL = None
_SA_KERNEL = None


def _get_kernels():
    global _ENUM_KERNEL, _SA_KERNEL
    if _ENUM_KERNEL is None:
        _ENUM_KERNEL, _SA_KERNEL = _kernels()
    return _ENUM_KERNEL, _SA_KERNEL


def solve_exhaustive(problem: QuboProblem, max_minima: int = 1 << 16) -> SampleSet:
    """All global minima by full enumeration. Exact; capped at 28 variables."""
    n = problem.num_vars
    if n > EXHAUSTIVE_VAR_LIMIT:
        raise TooManyVariables(f"{n} variables exceeds the {EXHAUSTIVE_VAR_LIMIT}-var cap")
    if n == 0:
        return SampleSet(
            samples=[Sample(assignment=(), energy=problem.offset)],
            metadata={"backend": "exhaustive", "num_minima": 1},
        )
    if not _float_exact(problem):
        if n > 20:
            raise ValueError("coefficients too large for exact float enumeration")
        best: list[tuple[int, ...]] = []
        best_e = None
        for code in range(1 << n):
            bits = tuple((code >> k) & 1 for k in range(n))
            e = evaluate(problem, bits)
            if best_e is None or e < best_e:
                best_e, best = e, [bits]
            elif e == best_e:
                best.append(bits)
        best.sort()
        return SampleSet(
            samples=[Sample(assignment=b, energy=best_e) for b in best],
            metadata={"backend": "exhaustive", "num_minima": len(best)},
        )
    enum_kernel, _ = _get_kernels()
    qmat = _dense_matrix(problem)
    _, count, out = enum_kernel(qmat, float(problem.offset), n, max_minima)
    stored = min(count, max_minima)
    assignments = sorted(
        tuple((int(out[i]) >> k) & 1 for k in range(n)) for i in range(stored)
    )
    samples = [Sample(assignment=b, energy=evaluate(problem, b)) for b in assignments]
    return SampleSet(
        samples=samples,
        metadata={
            "backend": "exhaustive",
            "num_minima": count,
            "truncated": count > max_minima,
        },
    )


def solve_sa(problem: QuboProblem, config: SolverConfig) -> SampleSet:
    """Seeded simulated annealing: independent restarts, single-bit-flip
    Metropolis sweeps under a geometric schedule. Bit-identical for a given
    (problem, config) even when reads run on parallel threads, because each
    read derives its own RNG stream from seed XOR read index."""
    n = problem.num_vars
    if n == 0:
        return SampleSet(
            samples=[Sample(assignment=(), energy=problem.offset, occurrences=config.num_reads)],
            metadata={"backend": "simulated_annealing"},
        )
    t_hi = config.t_hi
    if t_hi is None:
        t_hi = 10.0 * max(problem.max_abs_coeff(), 1)
    if config.sweeps == 0:
        temps = np.empty(0, dtype=np.float64)
    elif config.sweeps == 1:
        temps = np.array([t_hi], dtype=np.float64)
    else:
        ratio = (config.t_lo / t_hi) ** (1.0 / (config.sweeps - 1))
        temps = t_hi * ratio ** np.arange(config.sweeps, dtype=np.float64)
    _, sa_kernel = _get_kernels()
    qmat = _dense_matrix(problem)
    out_bits = np.zeros((config.num_reads, n), dtype=np.uint8)
    sa_kernel(qmat, n, config.num_reads, temps, np.uint64(config.seed & (2**64 - 1)), out_bits)
    counter: dict[tuple[int, ...], int] = {}
    for r in range(config.num_reads):
        bits = tuple(int(b) for b in out_bits[r])
        counter[bits] = counter.get(bits, 0) + 1
    return SampleSet(
        samples=_sorted_samples(counter, problem),
        metadata={"backend": "simulated_annealing", "num_reads": config.num_reads},
    )


def _payload(problem: QuboProblem, num_reads: int) -> dict:
    return {
        "linear": {str(i): c for i, c in sorted(problem.linear.items())},
        "quadratic": [[i, j, c] for (i, j), c in sorted(problem.quadratic.items())],
        "offset": problem.offset,
        "num_vars": problem.num_vars,
        "num_reads": num_reads,
    }


def solve_remote(problem: QuboProblem, config: SolverConfig) -> SampleSet:
    """POST the problem to an annealer service and re-verify every energy."""
    import requests

    if not config.endpoint:
        raise RemoteError("no endpoint configured")
    headers = {"Content-Type": "application/json"}
    token = os.environ.get(TOKEN_ENV_VAR)
    if token:
        headers["Authorization"] = f"Bearer {token}"
    body = json.dumps(_payload(problem, config.num_reads))
    last_exc: Exception | None = None
    response = None
    for _ in range(config.retries + 1):
        try:
            response = requests.post(
                config.endpoint, data=body, headers=headers, timeout=config.timeout
            )
            break
        except requests.RequestException as exc:
            last_exc = exc
    if response is None:
        raise RemoteError(f"endpoint unreachable after {config.retries + 1} attempts: {last_exc}")
    if response.status_code != 200:
        raise RemoteError(f"HTTP {response.status_code}: {response.text[:200]}")
    try:
        doc = response.json()
    except ValueError as exc:
        raise ProtocolError(f"response is not JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("samples"), list):
        raise ProtocolError("response lacks a samples list")
    counter: dict[tuple[int, ...], int] = {}
    corrections = 0
    for entry in doc["samples"]:
        if not isinstance(entry, dict):
            raise ProtocolError("sample entry is not an object")
        bits_str = entry.get("assignment")
        if (
            not isinstance(bits_str, str)
            or len(bits_str) != problem.num_vars
            or set(bits_str) - {"0", "1"}
        ):
            raise ProtocolError(f"bad assignment field: {bits_str!r}")
        if not isinstance(entry.get("energy"), (int, float)):
            raise ProtocolError("bad energy field")
        occurrences = entry.get("occurrences", 1)
        if not isinstance(occurrences, int) or occurrences < 1:
            raise ProtocolError("bad occurrences field")
        bits = tuple(int(ch) for ch in bits_str)
        if evaluate(problem, bits) != entry["energy"]:
            corrections += 1
        counter[bits] = counter.get(bits, 0) + occurrences
    if not counter:
        raise ProtocolError("empty samples list")
    return SampleSet(
        samples=_sorted_samples(counter, problem),
        metadata={
            "backend": "remote",
            "endpoint": config.endpoint,
            "energy_corrections": corrections,
            "energies_verified": True,
        },
    )


_BACKENDS = {
    "exhaustive": "exhaustive",
    "sa": "simulated_annealing",
    "simulated_annealing": "simulated_annealing",
    "remote": "remote",
}


def solve(problem: QuboProblem, config: SolverConfig) -> SampleSet:
    """Dispatch to the backend named in config."""
    backend = _BACKENDS.get(config.backend)
    if backend is None:
        raise ValueError(f"unknown backend {config.backend!r}")
    if backend == "exhaustive":
        return solve_exhaustive(problem)
    if backend == "simulated_annealing":
        return solve_sa(problem, config)
    return solve_remote(problem, config)
