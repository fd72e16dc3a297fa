"""Square roots on both sides of a dependency and the gcd extraction.

The rational side is an exact integer square root. The algebraic side
computes the root of a ring element modulo one large prime where the
defining polynomial stays irreducible, lifts coefficients back to balanced
integers, and verifies the square exactly; small denominators are scanned
because the true root can live just outside Z[rho] when the derivative
correction is switched off.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt, prod

import numpy as np

from .intkit import is_prime, next_prime
from .polyselect import NfsPolynomial

__all__ = [
    "NotASquare",
    "NoSquareRoot",
    "NumberRingElement",
    "ring_mul",
    "element_from_pair",
    "rational_sqrt",
    "algebraic_square",
    "algebraic_sqrt",
    "phi_map",
    "try_extract",
    "DependencyResult",
    "process_dependency",
]


class NotASquare(Exception):
    """Rational-side product is negative or not a perfect square."""


class NoSquareRoot(Exception):
    """No verified algebraic root across the attempted primes."""


def _normalized(coeffs: tuple[int, ...], denom: int) -> tuple[tuple[int, ...], int]:
    if denom == 0:
        raise ValueError("zero denominator")
    if denom < 0:
        coeffs = tuple(-c for c in coeffs)
        denom = -denom
    g = denom
    for c in coeffs:
        g = gcd(g, c)
        if g == 1:
            break
    if g > 1:
        coeffs = tuple(c // g for c in coeffs)
        denom //= g
    return coeffs, denom


@dataclass(frozen=True)
class NumberRingElement:
    """Sum z_i rho^i scaled by 1/denom; denom is 1 for honest ring members."""

    coeffs: tuple[int, ...]
    denom: int = 1

    def __post_init__(self) -> None:
        coeffs, denom = _normalized(tuple(self.coeffs), self.denom)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "denom", denom)

    @property
    def degree_bound(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def neg(self) -> "NumberRingElement":
        return NumberRingElement(tuple(-c for c in self.coeffs), self.denom)


def _reduce_mod_f(coeffs: list[int], f_coeffs: tuple[int, ...]) -> list[int]:
    d = len(f_coeffs) - 1
    for k in range(len(coeffs) - 1, d - 1, -1):
        c = coeffs[k]
        if c:
            coeffs[k] = 0
            for i in range(d):
                coeffs[k - d + i] -= c * f_coeffs[i]
    return coeffs[:d] + [0] * max(0, d - len(coeffs))


def ring_mul(u: NumberRingElement, v: NumberRingElement, poly: NfsPolynomial) -> NumberRingElement:
    """Exact product in Z[x]/(F), with scale denominators multiplying."""
    d = poly.degree
    raw = [0] * (len(u.coeffs) + len(v.coeffs) - 1)
    for i, a in enumerate(u.coeffs):
        if a == 0:
            continue
        for j, b in enumerate(v.coeffs):
            if b:
                raw[i + j] += a * b
    reduced = _reduce_mod_f(raw, poly.coeffs)
    return NumberRingElement(tuple(reduced[:d]), u.denom * v.denom)


def element_from_pair(a: int, b: int, degree: int) -> NumberRingElement:
    coeffs = [0] * degree
    coeffs[0] = a
    if degree > 1:
        coeffs[1] = -b
    return NumberRingElement(tuple(coeffs))


def ring_one(degree: int) -> NumberRingElement:
    return NumberRingElement((1,) + (0,) * (degree - 1))


def rational_sqrt(pairs, m: int, n: int) -> int:
    """X with X^2 = product of (a - b m) over the dependency, reduced mod n."""
    value = prod(a - b * m for a, b in pairs) if pairs else 1
    if value < 0:
        raise NotASquare(f"negative rational product {value}")
    root = isqrt(value)
    if root * root != value:
        raise NotASquare(f"rational product {value} is not a perfect square")
    return root % n


def derivative_element(poly: NfsPolynomial) -> NumberRingElement:
    d = poly.degree
    der = poly.derivative()
    coeffs = list(der) + [0] * (d - len(der))
    return NumberRingElement(tuple(coeffs[:d]))


def algebraic_square(pairs, poly: NfsPolynomial, corrected: bool = True) -> NumberRingElement:
    """Product of (a - b rho) over the dependency, optionally times F'(rho)^2."""
    acc = ring_one(poly.degree)
    for a, b in pairs:
        acc = ring_mul(acc, element_from_pair(a, b, poly.degree), poly)
    if corrected:
        der = derivative_element(poly)
        acc = ring_mul(acc, ring_mul(der, der, poly), poly)
    if acc.denom != 1:
        raise ValueError("square product left the integer ring")
    return acc


def _coefficient_bound(sq: NumberRingElement, poly: NfsPolynomial) -> int:
    """Numeric ceiling on the root's coefficients via complex embeddings."""
    coeffs_desc = list(poly.coeffs[::-1])
    try:
        roots = np.roots(coeffs_desc)
        vander = np.vander(roots, N=poly.degree, increasing=True)
        inv = np.linalg.inv(vander)
        embed = np.array(
            [sum(c * (alpha**i) for i, c in enumerate(sq.coeffs)) for alpha in roots]
        )
        gamma_mag = float(np.sqrt(np.abs(embed)).max())
        row_norm = float(np.abs(inv).sum(axis=1).max())
        bound = int(np.ceil(row_norm * gamma_mag)) + 1
    except (np.linalg.LinAlgError, ValueError, OverflowError):
        bound = 1 + isqrt(sum(abs(c) for c in sq.coeffs)) * (2**poly.degree)
    return max(bound, 64)


def _fp_reduce(coeffs: list[int], fmod: tuple[int, ...], p: int) -> tuple[int, ...]:
    d = len(fmod) - 1
    for k in range(len(coeffs) - 1, d - 1, -1):
        c = coeffs[k]
        if c:
            coeffs[k] = 0
            for i in range(d):
                coeffs[k - d + i] = (coeffs[k - d + i] - c * fmod[i]) % p
    out = coeffs[:d] + [0] * max(0, d - len(coeffs))
    return tuple(c % p for c in out)


def _fp_mul(a, b, fmod: tuple[int, ...], p: int):
    raw = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    raw[i + j] = (raw[i + j] + x * y) % p
    return _fp_reduce(raw, fmod, p)


def _fp_pow(a, e: int, fmod: tuple[int, ...], p: int):
    d = len(fmod) - 1
    result = tuple([1] + [0] * (d - 1))
    base = a
    while e:
        if e & 1:
            result = _fp_mul(result, base, fmod, p)
        base = _fp_mul(base, base, fmod, p)
        e >>= 1
    return result


def _fp_gcd_poly(a: list[int], b: list[int], p: int) -> list[int]:
    a = [c % p for c in a]
    b = [c % p for c in b]

    def deg(u):
        for i in range(len(u) - 1, -1, -1):
            if u[i]:
                return i
        return -1

    while deg(b) >= 0:
        da, db = deg(a), deg(b)
        if da < db:
            a, b = b, a
            continue
        inv = pow(b[deg(b)], p - 2, p)
        while deg(a) >= deg(b):
            shift = deg(a) - deg(b)
            factor = a[deg(a)] * inv % p
            for i in range(deg(b) + 1):
                a[i + shift] = (a[i + shift] - factor * b[i]) % p
        a, b = b, a
    return a


def _irreducible_mod_p(poly: NfsPolynomial, p: int) -> bool:
    d = poly.degree
    if d == 1:
        return True
    fmod = tuple(c % p for c in poly.coeffs)
    if fmod[-1] % p == 0:
        return False
    x = tuple([0, 1] + [0] * (d - 2))
    frob = _fp_pow(x, p**d, fmod, p)
    if frob != x:
        return False
    for ell in {q for q in range(2, d + 1) if d % q == 0 and is_prime(q)}:
        h = list(_fp_pow(x, p ** (d // ell), fmod, p))
        h[1] = (h[1] - 1) % p
        g = _fp_gcd_poly(h, list(fmod), p)
        if any(g[1:]) or not any(g):
            return False
    return True


def _field_sqrt(s, fmod: tuple[int, ...], p: int):
    """Square root in GF(p^d) via Tonelli-Shanks; None when s is a nonresidue."""
    d = len(fmod) - 1
    zero = tuple([0] * d)
    one = tuple([1] + [0] * (d - 1))
    minus_one = tuple([p - 1] + [0] * (d - 1))
    if s == zero:
        return zero
    q = p**d
    if _fp_pow(s, (q - 1) // 2, fmod, p) != one:
        return None
    if q % 4 == 3:
        return _fp_pow(s, (q + 1) // 4, fmod, p)
    qq, ss = q - 1, 0
    while qq % 2 == 0:
        qq //= 2
        ss += 1
    # constants are always squares when d is even, so scan rho + c instead
    z = None
    for c in range(min(p, 1 << 16)):
        if d >= 2:
            cand = tuple([c, 1] + [0] * (d - 2))
        else:
            cand = ((c + 2) % p,)
        if _fp_pow(cand, (q - 1) // 2, fmod, p) == minus_one:
            z = cand
            break
    if z is None:
        return None
    m = ss
    c_val = _fp_pow(z, qq, fmod, p)
    t = _fp_pow(s, qq, fmod, p)
    r = _fp_pow(s, (qq + 1) // 2, fmod, p)
    while t != one:
        i = 0
        t2 = t
        while t2 != one:
            t2 = _fp_mul(t2, t2, fmod, p)
            i += 1
            if i == m:
                return None
        b = _fp_pow(c_val, 1 << (m - i - 1), fmod, p)
        m = i
        c_val = _fp_mul(b, b, fmod, p)
        t = _fp_mul(t, c_val, fmod, p)
        r = _fp_mul(r, b, fmod, p)
    return r


def _balanced(coeffs, p: int) -> tuple[int, ...]:
    return tuple(c - p if c > p // 2 else c for c in coeffs)


def _canonical_sign(e: NumberRingElement) -> NumberRingElement:
    for c in reversed(e.coeffs):
        if c:
            return e.neg() if c < 0 else e
    return e


def algebraic_sqrt(
    sq: NumberRingElement,
    poly: NfsPolynomial,
    max_denom: int = 4,
    num_primes: int = 5,
) -> NumberRingElement:
    """Exact ring square root of sq, allowing a small denominator.

    Works modulo a prime p chosen so the lifted coefficients cannot wrap:
    take the finite-field root, lift k copies balanced for k = 1..max_denom,
    and keep the first candidate whose exact square reproduces k^2 * sq.
    """
    if sq.denom != 1:
        raise ValueError("input must be an integer ring element")
    d = poly.degree
    if sq.is_zero():
        return NumberRingElement((0,) * d)
    bound = _coefficient_bound(sq, poly)
    p = next_prime(max(2 * max_denom * bound * 4, 1009))
    for _ in range(num_primes):
        while not _irreducible_mod_p(poly, p):
            p = next_prime(p)
        fmod = tuple(c % p for c in poly.coeffs)
        image = tuple(c % p for c in sq.coeffs)
        root = _field_sqrt(image, fmod, p)
        if root is not None:
            for k in range(1, max_denom + 1):
                scaled = tuple(c * k % p for c in root)
                for sign_coeffs in (scaled, tuple(-c % p for c in scaled)):
                    lift = _balanced(sign_coeffs, p)
                    cand = NumberRingElement(lift, 1)
                    square = ring_mul(cand, cand, poly)
                    target = NumberRingElement(tuple(c * k * k for c in sq.coeffs), 1)
                    if square == target:
                        return _canonical_sign(NumberRingElement(lift, k))
        p = next_prime(p)
    raise NoSquareRoot(f"no verified root after {num_primes} primes")


def phi_map(e: NumberRingElement, m: int, n: int) -> int:
    """Homomorphic image: substitute m for rho, divide out the denominator mod n."""
    acc = 0
    for c in reversed(e.coeffs):
        acc = (acc * m + c) % n
    if e.denom != 1:
        g = gcd(e.denom, n)
        if g != 1:
            raise ValueError(f"denominator {e.denom} shares factor {g} with modulus")
        acc = acc * pow(e.denom, -1, n) % n
    return acc


def try_extract(x: int, y: int, n: int, fprime_m: int = 1) -> int | None:
    """gcd probe on x +- y; the derivative factor keeps both sides aligned
    when the corrected square was used."""
    x = x * fprime_m % n
    for c in (x - y, x + y):
        g = gcd(c % n, n)
        if 1 < g < n:
            return g
    return None


@dataclass(frozen=True)
class DependencyResult:
    x: int
    y: int
    gamma: NumberRingElement
    divisor: int | None


def process_dependency(
    pairs,
    poly: NfsPolynomial,
    n: int,
    corrected: bool = True,
) -> DependencyResult:
    """Full square-root stage for one dependency; raises NotASquare or
    NoSquareRoot when the dependency cannot produce a congruence."""
    x = rational_sqrt(pairs, poly.m, n)
    sq = algebraic_square(pairs, poly, corrected=corrected)
    gamma = algebraic_sqrt(sq, poly)
    y = phi_map(gamma, poly.m, n)
    fprime_m = phi_map(derivative_element(poly), poly.m, n) if corrected else 1
    divisor = try_extract(x, y, n, fprime_m=fprime_m)
    return DependencyResult(x=x, y=y, gamma=gamma, divisor=divisor)
