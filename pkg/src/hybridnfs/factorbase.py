"""Rational and algebraic factor bases, plus quadratic character columns."""

from __future__ import annotations

from dataclasses import dataclass, field

from .intkit import primes_up_to
from .polyselect import NfsPolynomial

__all__ = [
    "CharacterExhausted",
    "FactorBase",
    "build",
    "roots_mod_p",
]

CHAR_SEARCH_FACTOR = 10  # character primes are searched in (B, 10*B]


class CharacterExhausted(Exception):
    """Could not find enough character primes below the search ceiling."""


def roots_mod_p(poly: NfsPolynomial, p: int) -> tuple[int, ...]:
    """All r in [0, p) with F(r) == 0 (mod p), by direct scan."""
    return tuple(r for r in range(p) if poly(r) % p == 0)


@dataclass(frozen=True)
class FactorBase:
    """Column universe for the parity matrix.

    rational: primes p <= B, one column each.
    algebraic: first-degree prime ideals as (p, r) pairs with F(r) == 0 mod p.
    characters: (q, r_q) pairs with q > B, used as quadratic characters.
    Column order is: sign, rational, algebraic, characters.
    """

    bound: int
    rational: tuple[int, ...]
    algebraic: tuple[tuple[int, int], ...]
    characters: tuple[tuple[int, int], ...]
    column_index: dict = field(repr=False, default_factory=dict)

    @property
    def num_columns(self) -> int:
        return 1 + len(self.rational) + len(self.algebraic) + len(self.characters)

    @property
    def largest_prime(self) -> int:
        return self.rational[-1]


def build(poly: NfsPolynomial, bound: int, num_characters: int, rng_seed: int | None = None) -> FactorBase:
    """Assemble the factor base for (poly, bound) with num_characters columns.

    Character primes are the first primes q > bound at which F has a root,
    taking the smallest root each time. rng_seed is accepted for interface
    stability; construction is fully deterministic.
    """
    del rng_seed
    if bound < 2:
        raise ValueError("bound must be >= 2")
    rational = primes_up_to(bound)
    if not rational:
        raise ValueError("empty rational base")
    algebraic = []
    for p in rational:
        for r in roots_mod_p(poly, p):
            algebraic.append((p, r))
    characters = []
    ceiling = CHAR_SEARCH_FACTOR * bound
    for q in primes_up_to(ceiling):
        if len(characters) == num_characters:
            break
        if q <= bound:
            continue
        rs = roots_mod_p(poly, q)
        if rs:
            characters.append((q, rs[0]))
    if len(characters) < num_characters:
        raise CharacterExhausted(
            f"found {len(characters)} of {num_characters} character primes below {ceiling}"
        )
    index: dict = {"sign": 0}
    col = 1
    for p in rational:
        index[p] = col
        col += 1
    for pair in algebraic:
        index[pair] = col
        col += 1
    for k in range(len(characters)):
        index[("chi", k)] = col
        col += 1
    return FactorBase(bound, tuple(rational), tuple(algebraic), tuple(characters), index)
