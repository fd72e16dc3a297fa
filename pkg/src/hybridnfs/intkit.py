"""Exact integer primitives shared by every stage of the factoring pipeline."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

__all__ = [
    "Factorization",
    "gcd",
    "integer_kth_root",
    "is_perfect_power",
    "is_prime",
    "legendre_symbol",
    "mod_pow",
    "next_prime",
    "primes_up_to",
    "trial_factor",
]


@dataclass(frozen=True)
class Factorization:
    """A (partial) factorization: sorted (prime, exponent) pairs plus a cofactor.

    The cofactor carries whatever part of the number was not split into the
    listed primes; it is 1 exactly when the factorization is complete.
    """

    pairs: tuple[tuple[int, int], ...] = ()
    cofactor: int = 1

    def value(self) -> int:
        out = self.cofactor
        for p, e in self.pairs:
            out *= p**e
        return out

    @property
    def is_complete(self) -> bool:
        return self.cofactor == 1

    def exponent(self, p: int) -> int:
        for q, e in self.pairs:
            if q == p:
                return e
        return 0

    def as_dict(self) -> dict[int, int]:
        return {p: e for p, e in self.pairs}

    @staticmethod
    def from_dict(d: dict[int, int], cofactor: int = 1) -> "Factorization":
        pairs = tuple(sorted((p, e) for p, e in d.items() if e > 0))
        return Factorization(pairs, cofactor)

    def merged(self, other: "Factorization") -> "Factorization":
        d = self.as_dict()
        for p, e in other.pairs:
            d[p] = d.get(p, 0) + e
        return Factorization.from_dict(d, self.cofactor * other.cofactor)


def integer_kth_root(n: int, k: int) -> int:
    """Largest r with r**k <= n, by binary search on exact integers."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if k < 1:
        raise ValueError("k must be positive")
    if n < 2 or k == 1:
        return n
    lo, hi = 1, 1 << (n.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**k <= n:
            lo = mid
        else:
            hi = mid - 1
    return lo


@lru_cache(maxsize=64)
def primes_up_to(bound: int) -> tuple[int, ...]:
    """All primes <= bound by sieve of Eratosthenes; empty below 2."""
    if bound < 2:
        return ()
    flags = bytearray([1]) * (bound + 1)
    flags[0] = flags[1] = 0
    for i in range(2, integer_kth_root(bound, 2) + 1):
        if flags[i]:
            flags[i * i :: i] = bytes(len(range(i * i, bound + 1, i)))
    return tuple(i for i, f in enumerate(flags) if f)


_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    c = max(n + 1, 2)
    if c > 2 and c % 2 == 0:
        c += 1
    while not is_prime(c):
        c += 1 if c == 2 else 2
    return c


def trial_factor(n: int, bound: int) -> tuple[int, Factorization]:
    """Split n into a sign and a factorization over primes <= bound.

    Full multiplicity is extracted for every base prime; anything left over
    lands in the cofactor.
    """
    if n == 0:
        raise ValueError("n must be nonzero")
    sign = -1 if n < 0 else 1
    m = abs(n)
    d: dict[int, int] = {}
    for p in primes_up_to(bound):
        if p * p > m:
            break
        while m % p == 0:
            d[p] = d.get(p, 0) + 1
            m //= p
    if m > 1 and m <= bound:
        d[m] = d.get(m, 0) + 1
        m = 1
    return sign, Factorization.from_dict(d, m)


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    return pow(base, exponent, modulus)


def legendre_symbol(a: int, q: int) -> int:
    """Legendre symbol (a/q) for odd prime q: 1, -1, or 0 when q divides a."""
    if q < 3 or q % 2 == 0:
        raise ValueError("q must be an odd prime")
    a %= q
    if a == 0:
        return 0
    t = pow(a, (q - 1) // 2, q)
    return -1 if t == q - 1 else 1


def is_perfect_power(n: int) -> tuple[int, int] | None:
    """Return (base, k) with base**k == n and k >= 2, or None."""
    if n < 4:
        return None
    for k in range(2, n.bit_length() + 1):
        r = integer_kth_root(n, k)
        if r**k == n and r > 1:
            return r, k
    return None
