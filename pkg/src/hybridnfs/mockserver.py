"""Tiny in-process annealer service for tests and demos.

Speaks the same JSON contract as solve_remote: POST a problem, get back a
sample list. Solutions are exact for small problems and greedy descent
otherwise, entirely deterministic. A corrupt-energies switch misreports
every energy by one so clients can prove they re-verify locally, and an
optional bearer token exercises the auth path.
"""

from __future__ import annotations

import argparse
import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from itertools import product

from .quboenc import QuboProblem
from .qubosolve import evaluate

__all__ = ["MockAnnealer", "start_mock_server", "main"]

EXACT_LIMIT = 16
MAX_SAMPLES = 32


def _problem_from_payload(doc: dict) -> QuboProblem:
    linear = {int(i): int(c) for i, c in doc.get("linear", {}).items()}
    quadratic = {}
    for item in doc.get("quadratic", []):
        i, j, c = item
        quadratic[(min(int(i), int(j)), max(int(i), int(j)))] = int(c)
    num_vars = int(doc.get("num_vars", 0))
    if num_vars == 0:
        ids = list(linear) + [k for pair in quadratic for k in pair]
        num_vars = max(ids) + 1 if ids else 0
    return QuboProblem(
        num_vars=num_vars,
        linear=linear,
        quadratic=quadratic,
        offset=int(doc.get("offset", 0)),
    )


def _greedy_descent(problem: QuboProblem, start: int) -> tuple[tuple[int, ...], int]:
    bits = [(start >> k) & 1 for k in range(problem.num_vars)]
    energy = evaluate(problem, bits)
    improved = True
    while improved:
        improved = False
        for k in range(problem.num_vars):
            bits[k] ^= 1
            e = evaluate(problem, bits)
            if e < energy:
                energy = e
                improved = True
            else:
                bits[k] ^= 1
    return tuple(bits), energy


def _mock_solve(problem: QuboProblem, num_reads: int) -> list[dict]:
    n = problem.num_vars
    found: dict[tuple[int, ...], int] = {}
    if n <= EXACT_LIMIT:
        for bits in product((0, 1), repeat=n):
            found[bits] = evaluate(problem, bits)
    else:
        # deterministic pseudo-random starts, then local descent
        state = 0x9E3779B97F4A7C15
        for _ in range(min(num_reads, 64)):
            state = (state * 6364136223846793005 + 1442695040888963407) % (1 << 64)
            bits, energy = _greedy_descent(problem, state)
            found[bits] = energy
    ranked = sorted(found.items(), key=lambda kv: (kv[1], kv[0]))[:MAX_SAMPLES]
    return [
        {
            "assignment": "".join(str(b) for b in bits),
            "energy": energy,
            "occurrences": 1,
        }
        for bits, energy in ranked
    ]


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self) -> None:  # noqa: N802 (http.server API)
        server: MockAnnealer = self.server  # type: ignore[assignment]
        if server.token:
            supplied = self.headers.get("Authorization", "")
            if supplied != f"Bearer {server.token}":
                self._reply(401, {"error": "bad token"})
                return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            doc = json.loads(self.rfile.read(length))
            problem = _problem_from_payload(doc)
            num_reads = int(doc.get("num_reads", 1))
        except (ValueError, KeyError, TypeError) as exc:
            self._reply(400, {"error": f"bad request: {exc}"})
            return
        samples = _mock_solve(problem, num_reads)
        if server.corrupt_energies:
            for sample in samples:
                sample["energy"] += 1
        if server.malformed:
            self._reply(200, {"nonsense": True})
            return
        self._reply(200, {"samples": samples})

    def _reply(self, status: int, doc: dict) -> None:
        body = json.dumps(doc).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args) -> None:  # quiet by default
        pass


class MockAnnealer(HTTPServer):
    def __init__(self, address=("127.0.0.1", 0), corrupt_energies: bool = False,
                 token: str | None = None, malformed: bool = False):
        super().__init__(address, _Handler)
        self.corrupt_energies = corrupt_energies
        self.token = token
        self.malformed = malformed

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}/solve"


def start_mock_server(
    corrupt_energies: bool = False,
    token: str | None = None,
    malformed: bool = False,
) -> tuple[MockAnnealer, threading.Thread]:
    server = MockAnnealer(
        corrupt_energies=corrupt_energies, token=token, malformed=malformed
    )
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="mock QUBO annealer service")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--corrupt-energies", action="store_true")
    parser.add_argument("--token", default=None)
    args = parser.parse_args(argv)
    server = MockAnnealer(
        address=("127.0.0.1", args.port),
        corrupt_energies=args.corrupt_energies,
        token=args.token,
    )
    print(f"serving on {server.url}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
