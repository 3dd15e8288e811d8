"""Finite labeled partitions of [0, 1): joins, pullback spans, refinement, and the index-sensitive metric.

Cells are ordered and the order is part of a partition's identity: the
metric d(a, b) = (1/2) sum_j mu(A_j symdiff B_j) changes if cells are
re-indexed, so no silent canonicalization of cell order ever happens.
Empty cells are legal and preserved; name alphabets stay stable across
construction steps even when a cell's measure reaches zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import PreconditionError
from .exact_sets import IntervalSet
from .odometer import OdometerSystem

__all__ = [
    "Partition",
    "join",
    "span",
    "refines",
    "partition_metric",
    "transfer_refinement",
]


@dataclass(frozen=True)
class Partition:
    """An ordered tuple of pairwise disjoint IntervalSets covering [0, 1) exactly."""

    cells: tuple

    def __init__(self, cells):
        cells = tuple(cells)
        if not cells:
            raise PreconditionError("partition needs at least one cell")
        total = IntervalSet.empty()
        m = Fraction(0)
        for c in cells:
            total = total.union(c)
            m += c.measure()
        if total != IntervalSet.full() or m != 1:
            raise PreconditionError("cells must be disjoint and cover [0, 1) exactly")
        object.__setattr__(self, "cells", cells)

    def __len__(self):
        return len(self.cells)

    def cell_index(self, x) -> int:
        """1-based index of the cell containing the point x."""
        for i, c in enumerate(self.cells, 1):
            if x in c:
                return i
        raise PreconditionError(f"{x} not covered")

    @classmethod
    def halves(cls) -> "Partition":
        return cls([IntervalSet.interval(0, Fraction(1, 2)), IntervalSet.interval(Fraction(1, 2), 1)])

    @classmethod
    def trivial(cls) -> "Partition":
        return cls([IntervalSet.full()])

    def to_json(self):
        return {"cells": [c.to_json() for c in self.cells]}

    @classmethod
    def from_json(cls, data) -> "Partition":
        return cls([IntervalSet.from_json(c) for c in data["cells"]])


def join(a: Partition, b: Partition) -> Partition:
    """The common refinement {A_i ∩ B_j}, indexed lexicographically by (i, j).

    Empty intersections are kept as empty cells so the index scheme stays total.
    """
    return Partition(tuple(ca.intersect(cb) for ca, cb in product(a.cells, b.cells)))


def span(sys: OdometerSystem, a: Partition, m: int, n: int) -> Partition:
    """Iterated join of the pullbacks T^-i a for m <= i <= n.

    The cell indexed by the word (w_m, ..., w_n) is the exact intersection
    of the pulled-back cells T^-i A_{w_i}; there are k^(n-m+1) cells in
    lexicographic word order, empty ones included.
    """
    if m > n:
        raise PreconditionError("span needs m <= n")
    pulled = [[sys.image(c, -i) for c in a.cells] for i in range(m, n + 1)]
    cells = []
    for word in product(range(len(a.cells)), repeat=n - m + 1):
        cur = pulled[0][word[0]]
        for i in range(1, len(word)):
            if not cur:
                break
            cur = cur.intersect(pulled[i][word[i]])
        cells.append(cur)
    return Partition(tuple(cells))


def refines(a: Partition, b: Partition) -> bool:
    """True iff every cell of a is contained (exactly) in some cell of b."""
    return all(not cell or any(cell.issubset(cb) for cb in b.cells) for cell in a.cells)


def partition_metric(a: Partition, b: Partition) -> Fraction:
    """d(a, b) = (1/2) sum_j mu(A_j symdiff B_j); cell counts must agree."""
    if len(a.cells) != len(b.cells):
        raise PreconditionError("partition metric needs equal cell counts")
    tot = sum((ca.sym_diff(cb).measure() for ca, cb in zip(a.cells, b.cells)), Fraction(0))
    return tot / 2


def _refinement_map(a: Partition, b: Partition) -> list[int]:
    """For each cell of a, the index of the b-cell containing it.

    An empty a-cell lies in every b-cell; it keeps its own index when
    possible so that transfer with b == a is the identity.
    """
    out = []
    for i, cell in enumerate(a.cells):
        if not cell:
            out.append(min(i, len(b.cells) - 1))
            continue
        for j, cb in enumerate(b.cells):
            if cell.issubset(cb):
                out.append(j)
                break
        else:
            raise PreconditionError(f"cell {i} of the finer partition is split by the coarser one")
    return out


def transfer_refinement(a: Partition, a_prime: Partition, b: Partition) -> Partition:
    """Carry the refinement a > b over to a_prime: B'_s is the union of the A'_t with A_t inside B_s.

    Requires refines(a, b) and equal cell counts for a and a_prime;
    guarantees refines(a_prime, result) and
    d(b, result) <= d(a, a_prime), both exactly.
    """
    if len(a.cells) != len(a_prime.cells):
        raise PreconditionError("a and a_prime must have equal cell counts")
    if not refines(a, b):
        raise PreconditionError("a must refine b")
    owner = _refinement_map(a, b)
    cells = [IntervalSet.empty() for _ in b.cells]
    for t, s in enumerate(owner):
        cells[s] = cells[s].union(a_prime.cells[t])
    return Partition(tuple(cells))
