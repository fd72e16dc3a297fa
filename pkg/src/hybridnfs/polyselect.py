"""Polynomial selection by base-m expansion, plus a cheap reducibility screen."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .intkit import integer_kth_root

__all__ = [
    "NfsPolynomial",
    "NonMonicExpansion",
    "select_polynomial",
    "screen_reducible",
    "eval_homogeneous",
]


class NonMonicExpansion(Exception):
    """Base-m expansion has a leading digit other than 1; retry with d +- 1."""


@dataclass(frozen=True)
class NfsPolynomial:
    """Monic integer polynomial F paired with its root m modulo N.

    coeffs is ascending: coeffs[i] multiplies x**i, coeffs[d] == 1.
    """

    coeffs: tuple[int, ...]
    m: int
    n: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: int) -> int:
        out = 0
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def derivative(self) -> tuple[int, ...]:
        return tuple(i * c for i, c in enumerate(self.coeffs) if i > 0)


def select_polynomial(n: int, d: int) -> NfsPolynomial:
    """Build the degree-d polynomial whose base-m digits reconstruct n.

    m is the integer d-th root of n and the digits y_i satisfy
    n = sum y_i m^i with 0 <= y_i < m, so F(m) == 0 (mod n) by construction.
    """
    if d < 2:
        raise ValueError("degree must be >= 2")
    if n < 2**d:
        raise ValueError("n must be at least 2**d")
    m = integer_kth_root(n, d)
    digits = []
    rest = n
    for _ in range(d + 1):
        digits.append(rest % m)
        rest //= m
    if rest != 0 or digits[d] != 1:
        raise NonMonicExpansion(f"leading digit {digits[d] + rest * m} for n={n}, d={d}")
    return NfsPolynomial(tuple(digits), m, n)


def eval_homogeneous(poly: NfsPolynomial, a: int, b: int) -> int:
    """Norm form: sum_i y_i a^i b^(d-i), the value of b^d F(a/b)."""
    d = poly.degree
    return sum(c * a**i * b ** (d - i) for i, c in enumerate(poly.coeffs))


def _divisors_signed(n: int) -> list[int]:
    n = abs(n)
    out = []
    for c in range(1, n + 1):
        if c * c > n:
            break
        if n % c == 0:
            out.extend([c, n // c])
    ds = sorted(set(out))
    return [s * v for v in ds for s in (1, -1)]


def _linear_factor_root(poly: NfsPolynomial) -> int | None:
    # rational root test: integer roots of monic F divide the constant term
    y0 = poly.coeffs[0]
    if y0 == 0:
        return 0
    for r in _divisors_signed(y0):
        if poly(r) == 0:
            return r
    return None


def _quadratic_split(poly: NfsPolynomial) -> tuple[int, int] | None:
    # monic quartic F = (x^2 + a x + b)(x^2 + c x + e); b*e = y0 bounds the search
    if poly.degree != 4:
        return None
    y0, y1, y2, y3, _ = poly.coeffs
    if y0 == 0:
        return None
    for b in _divisors_signed(y0):
        if y0 % b:
            continue
        e = y0 // b
        if e != b:
            num = y1 - b * y3
            den = e - b
            if num % den:
                continue
            a = num // den
            c = y3 - a
            if b + e + a * c == y2:
                return a, b
        else:
            if y1 != b * y3:
                continue
            # a + c = y3 and a*c = y2 - 2b: integer roots of t^2 - y3 t + (y2 - 2b)
            disc = y3 * y3 - 4 * (y2 - 2 * b)
            if disc < 0:
                continue
            s = integer_kth_root(disc, 2)
            if s * s != disc or (y3 + s) % 2:
                continue
            return (y3 + s) // 2, b
    return None


def screen_reducible(poly: NfsPolynomial) -> int | None:
    """Look for an integer factor G of F; if found, return gcd(G(m), n).

    A reducible F hands out a divisor of n directly, short-circuiting the
    sieve. Returns a nontrivial divisor of n, or None when the screen finds
    no factor (heuristic, degree <= 5).
    """
    if poly.degree > 5:
        raise ValueError("screen supports degree <= 5 only")
    r = _linear_factor_root(poly)
    if r is not None:
        g = gcd(poly.m - r, poly.n)
        if 1 < g < poly.n:
            return g
        return None
    qs = _quadratic_split(poly)
    if qs is not None:
        a, b = qs
        g = gcd((poly.m * poly.m + a * poly.m + b) % poly.n, poly.n)
        if 1 < g < poly.n:
            return g
    return None
