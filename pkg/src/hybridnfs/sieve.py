"""Candidate pair enumeration, width filtering, and relation assembly."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterator, TextIO

from .factorbase import FactorBase
from .intkit import Factorization, legendre_symbol
from .polyselect import NfsPolynomial, eval_homogeneous

__all__ = [
    "AmbiguousIdeal",
    "CharacterDegenerate",
    "Candidate",
    "Relation",
    "enumerate_pairs",
    "side_values",
    "width_filter",
    "pre_strip",
    "assemble_relation",
    "write_relations",
    "read_relations",
]


class AmbiguousIdeal(Exception):
    """Prime divides b, so a*b^-1 mod p does not pin down an ideal."""


class CharacterDegenerate(Exception):
    """Character prime divides a - b*r_q; the relation must be discarded."""


@dataclass(frozen=True)
class Candidate:
    a: int
    b: int
    int_side: int
    norm: int


@dataclass(frozen=True)
class Relation:
    """A coprime pair whose two side values are fully smooth.

    int_sign is -1 when a - b*m < 0. char_bits has one entry per character
    column: 1 where the Legendre symbol of a - b*r_q is -1.
    """

    a: int
    b: int
    int_side: int
    norm: int
    int_sign: int
    int_factors: Factorization
    ideal_factors: tuple[tuple[int, int, int], ...]  # (prime, root, exponent)
    char_bits: tuple[int, ...]


def enumerate_pairs(a_limit: int, b_limit: int, a_floor: int = 0) -> Iterator[tuple[int, int]]:
    """Coprime pairs ordered by (b, a): 0 < b <= b_limit, a_floor < |a| <= a_limit."""
    for b in range(1, b_limit + 1):
        for a in range(-a_limit, a_limit + 1):
            if a == 0 or abs(a) <= a_floor:
                continue
            if gcd(a, b) != 1:
                continue
            yield a, b


def side_values(a: int, b: int, poly: NfsPolynomial) -> tuple[int, int]:
    """Integer side a - b*m and the norm form of a - b*rho."""
    return a - b * poly.m, eval_homogeneous(poly, a, b)


def width_filter(candidate: Candidate, width: int) -> bool:
    """Keep candidates whose side magnitudes both fit in `width` bits."""
    return (
        abs(candidate.int_side).bit_length() <= width
        and abs(candidate.norm).bit_length() <= width
    )


def pre_strip(h: int, small_primes: tuple[int, ...] = (2, 3)) -> tuple[Factorization, int]:
    """Divide out the listed small primes completely; return (stripped, residual)."""
    if h < 1:
        raise ValueError("h must be positive")
    d: dict[int, int] = {}
    for p in small_primes:
        while h % p == 0:
            d[p] = d.get(p, 0) + 1
            h //= p
    return Factorization.from_dict(d), h


def assemble_relation(
    a: int,
    b: int,
    int_side: int,
    norm: int,
    int_factors: Factorization,
    norm_factors: Factorization,
    fb: FactorBase,
) -> Relation:
    """Attach ideal and character columns to a pair with known smooth sides.

    Each prime s dividing the norm maps to the ideal (s, a*b^-1 mod s).
    Character bit k is 1 when (a - b*r_q | q) = -1 for the k-th character
    pair (q, r_q).
    """
    if not int_factors.is_complete or not norm_factors.is_complete:
        raise ValueError("both sides must be fully factored over the base")
    ideal_factors = []
    for s, e in norm_factors.pairs:
        if b % s == 0:
            raise AmbiguousIdeal(f"{s} divides b for pair ({a}, {b})")
        r = a * pow(b, -1, s) % s
        if (s, r) not in fb.column_index:
            raise ValueError(f"ideal ({s}, {r}) missing from base")
        ideal_factors.append((s, r, e))
    char_bits = []
    for q, rq in fb.characters:
        v = a - b * rq
        sym = legendre_symbol(v, q)
        if sym == 0:
            raise CharacterDegenerate(f"{q} divides a - b*r_q for pair ({a}, {b})")
        char_bits.append(1 if sym == -1 else 0)
    return Relation(
        a=a,
        b=b,
        int_side=int_side,
        norm=norm,
        int_sign=-1 if int_side < 0 else 1,
        int_factors=int_factors,
        ideal_factors=tuple(ideal_factors),
        char_bits=tuple(char_bits),
    )


def _format_factors(sign: int, fac: Factorization) -> str:
    parts = [str(sign)]
    parts.extend(f"{p}:{e}" for p, e in fac.pairs)
    return ",".join(parts)


def _format_ideals(ideals: tuple[tuple[int, int, int], ...]) -> str:
    if not ideals:
        return "-"
    return ",".join(f"{s}:{r}:{e}" for s, r, e in ideals)


def write_relations(
    out: TextIO,
    relations: list[Relation],
    poly: NfsPolynomial,
    fb: FactorBase,
    width: int,
) -> None:
    """Dump relations as tab-separated lines with # headers carrying the run setup."""
    out.write(f"# N {poly.n}\n")
    out.write(f"# d {poly.degree}\n")
    out.write(f"# F {' '.join(str(c) for c in poly.coeffs)}\n")
    out.write(f"# m {poly.m}\n")
    out.write(f"# B {fb.bound}\n")
    out.write(f"# M {len(fb.characters)}\n")
    out.write(f"# W {width}\n")
    for rel in relations:
        fields = [
            str(rel.a),
            str(rel.b),
            str(rel.int_side),
            str(rel.norm),
            _format_factors(rel.int_sign, rel.int_factors),
            _format_ideals(rel.ideal_factors),
            "".join(str(bit) for bit in rel.char_bits) or "-",
        ]
        out.write("\t".join(fields) + "\n")


def read_relations(src: TextIO) -> tuple[dict, list[dict]]:
    """Parse a relation dump back into a header dict and raw relation rows."""
    header: dict = {}
    rows = []
    for line in src:
        line = line.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            _, key, *vals = line.split()
            header[key] = [int(v) for v in vals] if key == "F" else int(vals[0])
            continue
        a, b, int_side, norm, ints, ideals, chars = line.split("\t")
        int_parts = ints.split(",")
        rows.append(
            {
                "a": int(a),
                "b": int(b),
                "int_side": int(int_side),
                "norm": int(norm),
                "int_sign": int(int_parts[0]),
                "int_factors": {
                    int(p): int(e)
                    for p, e in (item.split(":") for item in int_parts[1:])
                },
                "ideal_factors": []
                if ideals == "-"
                else [tuple(int(x) for x in item.split(":")) for item in ideals.split(",")],
                "char_bits": [] if chars == "-" else [int(c) for c in chars],
            }
        )
    return header, rows
