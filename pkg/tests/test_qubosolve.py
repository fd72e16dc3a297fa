import contextlib
from itertools import product

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from hybridnfs.mockserver import start_mock_server
from hybridnfs.quboenc import QuboProblem, encode_split
from hybridnfs.qubosolve import (
    EXHAUSTIVE_VAR_LIMIT,
    TOKEN_ENV_VAR,
    ProtocolError,
    RemoteError,
    SolverConfig,
    TooManyVariables,
    evaluate,
    solve,
    solve_exhaustive,
    solve_remote,
    solve_sa,
)


def _problem(num_vars, linear, quadratic, offset=0):
    return QuboProblem(
        num_vars=num_vars, linear=dict(linear), quadratic=dict(quadratic), offset=offset
    )


TOY = _problem(3, {0: -2, 1: 1}, {(0, 2): -3, (1, 2): 2}, offset=4)


@contextlib.contextmanager
def mock_annealer(**kwargs):
    server, thread = start_mock_server(**kwargs)
    try:
        yield server
    finally:
        server.shutdown()
        thread.join(timeout=5)


@st.composite
def small_problems(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    linear = {
        i: draw(st.integers(min_value=-20, max_value=20)) for i in range(n)
    }
    quadratic = {}
    for i in range(n):
        for j in range(i + 1, n):
            if draw(st.booleans()):
                quadratic[(i, j)] = draw(st.integers(min_value=-20, max_value=20))
    offset = draw(st.integers(min_value=-50, max_value=50))
    return _problem(n, linear, quadratic, offset)


@given(small_problems())
@settings(max_examples=50)
def test_evaluate_matches_direct_sum(problem):
    for bits in product((0, 1), repeat=problem.num_vars):
        expect = problem.offset
        expect += sum(c for i, c in problem.linear.items() if bits[i])
        expect += sum(
            c for (i, j), c in problem.quadratic.items() if bits[i] and bits[j]
        )
        assert evaluate(problem, bits) == expect


def test_evaluate_rejects_wrong_length():
    with pytest.raises(ValueError):
        evaluate(TOY, (0, 1))


@given(small_problems())
@settings(max_examples=30, deadline=None)  # first call pays the jit warm-up
def test_exhaustive_finds_every_global_minimum(problem):
    result = solve_exhaustive(problem)
    energies = {
        bits: evaluate(problem, bits)
        for bits in product((0, 1), repeat=problem.num_vars)
    }
    floor = min(energies.values())
    assert result.min_energy == floor
    assert {s.assignment for s in result.samples} == {
        b for b, e in energies.items() if e == floor
    }


def test_exhaustive_zero_vars_and_cap():
    empty = solve_exhaustive(_problem(0, {}, {}, offset=7))
    assert empty.min_energy == 7 and empty.best().assignment == ()
    too_big = _problem(EXHAUSTIVE_VAR_LIMIT + 1, {0: 1}, {})
    with pytest.raises(TooManyVariables):
        solve_exhaustive(too_big)


def test_exhaustive_handles_huge_coefficients():
    # beyond float53 the solver falls back to exact integer scoring
    big = 1 << 60
    problem = _problem(2, {0: big, 1: -big}, {(0, 1): 1})
    result = solve_exhaustive(problem)
    assert result.min_energy == -big
    assert result.best().assignment == (0, 1)


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(num_reads=0)
    with pytest.raises(ValueError):
        SolverConfig(sweeps=-1)
    with pytest.raises(ValueError):
        SolverConfig(t_hi=0.05, t_lo=0.1)
    with pytest.raises(ValueError):
        SolverConfig(t_lo=0.0)


def test_sa_is_deterministic_per_seed():
    enc = encode_split(15, 1, 2)
    config = SolverConfig(backend="simulated_annealing", num_reads=50, sweeps=60, seed=3)
    first = solve_sa(enc.qubo, config)
    second = solve_sa(enc.qubo, config)
    assert [(s.assignment, s.energy, s.occurrences) for s in first.samples] == [
        (s.assignment, s.energy, s.occurrences) for s in second.samples
    ]


def test_sa_energies_are_genuine():
    enc = encode_split(77, 2, 3)
    config = SolverConfig(backend="simulated_annealing", num_reads=30, sweeps=40, seed=1)
    result = solve_sa(enc.qubo, config)
    for sample in result.samples:
        assert evaluate(enc.qubo, sample.assignment) == sample.energy
    assert sum(s.occurrences for s in result.samples) == 30


def test_sa_reaches_exhaustive_floor_on_small_instances():
    for seed, h in ((1, 15), (2, 21), (3, 27)):
        enc = encode_split(h, 1, 2)
        config = SolverConfig(
            backend="simulated_annealing", num_reads=200, sweeps=100, seed=seed
        )
        assert solve_sa(enc.qubo, config).min_energy == solve_exhaustive(enc.qubo).min_energy


def test_sa_zero_sweeps_returns_random_reads():
    enc = encode_split(15, 1, 2)
    config = SolverConfig(backend="simulated_annealing", num_reads=5, sweeps=0, seed=9)
    result = solve_sa(enc.qubo, config)
    assert sum(s.occurrences for s in result.samples) == 5
    for sample in result.samples:
        assert evaluate(enc.qubo, sample.assignment) == sample.energy


def test_solve_dispatcher():
    assert solve(TOY, SolverConfig(backend="exhaustive")).min_energy == solve_exhaustive(TOY).min_energy
    sa_alias = solve(TOY, SolverConfig(backend="sa", num_reads=20, sweeps=30))
    assert sa_alias.metadata["backend"] == "simulated_annealing"
    with pytest.raises(ValueError):
        solve(TOY, SolverConfig(backend="quantum"))


def test_remote_round_trip(monkeypatch):
    monkeypatch.delenv(TOKEN_ENV_VAR, raising=False)
    enc = encode_split(15, 1, 2)
    with mock_annealer() as server:
        config = SolverConfig(backend="remote", endpoint=server.url, num_reads=8)
        result = solve_remote(enc.qubo, config)
    assert result.min_energy == solve_exhaustive(enc.qubo).min_energy == 0
    assert result.metadata["energies_verified"]
    assert result.metadata["energy_corrections"] == 0
    for sample in result.samples:
        assert evaluate(enc.qubo, sample.assignment) == sample.energy


def test_remote_corrects_lying_energies(monkeypatch):
    monkeypatch.delenv(TOKEN_ENV_VAR, raising=False)
    enc = encode_split(15, 1, 2)
    with mock_annealer(corrupt_energies=True) as server:
        config = SolverConfig(backend="remote", endpoint=server.url, num_reads=8)
        result = solve_remote(enc.qubo, config)
    assert result.metadata["energy_corrections"] > 0
    # reported energies are replaced by locally recomputed ones
    assert result.min_energy == 0
    for sample in result.samples:
        assert evaluate(enc.qubo, sample.assignment) == sample.energy


def test_remote_auth(monkeypatch):
    enc = encode_split(15, 1, 2)
    with mock_annealer(token="sekrit") as server:
        config = SolverConfig(backend="remote", endpoint=server.url, num_reads=4)
        monkeypatch.delenv(TOKEN_ENV_VAR, raising=False)
        with pytest.raises(RemoteError):
            solve_remote(enc.qubo, config)
        monkeypatch.setenv(TOKEN_ENV_VAR, "sekrit")
        assert solve_remote(enc.qubo, config).min_energy == 0
        monkeypatch.setenv(TOKEN_ENV_VAR, "wrong")
        with pytest.raises(RemoteError):
            solve_remote(enc.qubo, config)


def test_remote_malformed_response(monkeypatch):
    monkeypatch.delenv(TOKEN_ENV_VAR, raising=False)
    enc = encode_split(15, 1, 2)
    with mock_annealer(malformed=True) as server:
        config = SolverConfig(backend="remote", endpoint=server.url, num_reads=4)
        with pytest.raises(ProtocolError):
            solve_remote(enc.qubo, config)


def test_remote_unreachable_and_unconfigured(monkeypatch):
    monkeypatch.delenv(TOKEN_ENV_VAR, raising=False)
    enc = encode_split(15, 1, 2)
    dead = SolverConfig(
        backend="remote", endpoint="http://127.0.0.1:9/solve", timeout=0.5, retries=0
    )
    with pytest.raises(RemoteError):
        solve_remote(enc.qubo, dead)
    with pytest.raises(RemoteError):
        solve_remote(enc.qubo, SolverConfig(backend="remote"))


def test_sample_helpers():
    result = solve_exhaustive(encode_split(15, 1, 2).qubo)
    zero = result.zero_energy()
    assert zero and all(s.energy == 0 for s in zero)
    assert set(result.best().bitstring) <= {"0", "1"}
