"""Parity matrix over GF(2) and left-nullspace dependencies.

Rows are Python ints used as bitsets (bit j = column j), which keeps the
elimination dense, branch-free, and fast at the few-hundred-column scale
this pipeline operates at.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

from .factorbase import FactorBase
from .sieve import Relation

__all__ = ["BinaryMatrix", "build_matrix", "nullspace", "dependency_order", "parity_row"]


@dataclass(frozen=True)
class BinaryMatrix:
    rows: tuple[int, ...]
    num_cols: int

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def row_bits(self, i: int) -> tuple[int, ...]:
        return tuple((self.rows[i] >> j) & 1 for j in range(self.num_cols))


def parity_row(relation: Relation, fb: FactorBase) -> int:
    """Exponent parities in canonical column order: sign, rational primes,
    prime ideals, then character bits."""
    row = 0
    if relation.int_sign < 0:
        row |= 1 << fb.column_index["sign"]
    for p, e in relation.int_factors.pairs:
        if e % 2 == 0:
            continue
        if p not in fb.column_index:
            raise ValueError(f"rational prime {p} has no column")
        row |= 1 << fb.column_index[p]
    for s, r, e in relation.ideal_factors:
        if e % 2 == 0:
            continue
        if (s, r) not in fb.column_index:
            raise ValueError(f"prime ideal ({s},{r}) has no column")
        row |= 1 << fb.column_index[(s, r)]
    for k, bit in enumerate(relation.char_bits):
        if bit:
            row |= 1 << fb.column_index[("chi", k)]
    return row


def build_matrix(relations: Iterable[Relation], fb: FactorBase) -> BinaryMatrix:
    rows = tuple(parity_row(rel, fb) for rel in relations)
    return BinaryMatrix(rows=rows, num_cols=fb.num_columns)


def nullspace(matrix: BinaryMatrix) -> list[int]:
    """Basis of row combinations that cancel, as bitmasks over row indices.

    Gaussian elimination with combination tracking; pivots are chosen as
    the first remaining row with the current leftmost column set, so the
    basis is deterministic for a given row order.
    """
    rows = list(matrix.rows)
    track = [1 << i for i in range(len(rows))]
    pivot_rows: set[int] = set()
    for col in range(matrix.num_cols):
        mask = 1 << col
        pivot = None
        for i in range(len(rows)):
            if i not in pivot_rows and rows[i] & mask:
                pivot = i
                break
        if pivot is None:
            continue
        pivot_rows.add(pivot)
        for i in range(len(rows)):
            if i != pivot and rows[i] & mask:
                rows[i] ^= rows[pivot]
                track[i] ^= track[pivot]
    return [track[i] for i in range(len(rows)) if rows[i] == 0]


def dependency_order(basis: list[int]) -> Iterator[int]:
    """Dependencies worth trying: basis elements first, then pairwise sums
    ordered by how few relations they select."""
    seen = set()
    for mask in basis:
        if mask and mask not in seen:
            seen.add(mask)
            yield mask
    pairs = []
    for (i, a), (j, b) in combinations(enumerate(basis), 2):
        mask = a ^ b
        if mask and mask not in seen:
            seen.add(mask)
            pairs.append((bin(mask).count("1"), i, j, mask))
    for _, _, _, mask in sorted(pairs):
        yield mask
