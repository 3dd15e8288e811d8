"""Exact interval-set algebra on the half-open unit circle [0, 1).

An :class:`IntervalSet` is a finite union of half-open rational
subintervals ``[lo, hi)`` of ``[0, 1)``, kept in a unique canonical form
(sorted, pairwise disjoint, touching intervals merged).  Two sets that
differ in finitely many points therefore compare equal, which is the
right notion for mod-null reasoning: structural equality is set equality.

Rationals are plain :class:`fractions.Fraction` values (arbitrary
precision, always in lowest terms with positive denominator).  They
cross file-format boundaries as ``"p/q"`` strings.
"""

from __future__ import annotations

import bisect
from fractions import Fraction

from .errors import PreconditionError

__all__ = [
    "Rational",
    "IntervalSet",
    "parse_rational",
    "format_rational",
    "boolean_ops",
]

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_rational(s: str) -> Fraction:
    """Parse a rational from a ``"p/q"`` (or plain integer) string."""
    return Fraction(s.strip())


def format_rational(q: Fraction) -> str:
    """Format a rational as ``"p/q"`` (``"p"`` when the denominator is 1)."""
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def _canonical(pairs):
    """Sort, validate, and merge touching intervals; returns a tuple of pairs."""
    ivs = [(Fraction(lo), Fraction(hi)) for lo, hi in pairs if lo != hi]
    for lo, hi in ivs:
        if not (ZERO <= lo < hi <= ONE):
            raise ValueError(f"interval [{lo}, {hi}) not inside [0, 1)")
    ivs.sort()
    out = []
    for lo, hi in ivs:
        if out and lo < out[-1][1]:
            raise ValueError(f"overlapping intervals near {lo}")
        if out and lo == out[-1][1]:
            out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return tuple(out)


class IntervalSet:
    """Canonical finite union of half-open rational intervals in [0, 1).

    Immutable; all operations are pure and return new sets.  Equality and
    hashing go through the canonical form, so ``a == b`` means equality as
    subsets of the circle (mod finitely many points).
    """

    __slots__ = ("intervals",)

    def __init__(self, intervals=()):
        object.__setattr__(self, "intervals", _canonical(intervals))

    def __setattr__(self, name, value):
        raise AttributeError("IntervalSet is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def full(cls) -> "IntervalSet":
        return cls([(ZERO, ONE)])

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls()

    @classmethod
    def interval(cls, lo, hi) -> "IntervalSet":
        return cls([(Fraction(lo), Fraction(hi))])

    @classmethod
    def _from_canonical(cls, pairs: tuple) -> "IntervalSet":
        """Trusted constructor: ``pairs`` must already be canonical."""
        self = object.__new__(cls)
        object.__setattr__(self, "intervals", pairs)
        return self

    # -- basic protocol ------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __repr__(self):
        body = " ∪ ".join(f"[{format_rational(a)},{format_rational(b)})" for a, b in self.intervals)
        return f"IntervalSet({body or '∅'})"

    def __contains__(self, x) -> bool:
        x = Fraction(x)
        i = bisect.bisect_right(self.intervals, (x, Fraction(2))) - 1
        return i >= 0 and self.intervals[i][0] <= x < self.intervals[i][1]

    # -- measure -------------------------------------------------------

    def measure(self) -> Fraction:
        """Exact Lebesgue measure: the sum of interval lengths."""
        return sum((hi - lo for lo, hi in self.intervals), ZERO)

    # -- set algebra ----------------------------------------------------
    # All four operations are linear two-pointer sweeps over the sorted
    # interval lists; outputs are assembled already in canonical order.

    def union(self, other: "IntervalSet") -> "IntervalSet":
        if not self.intervals:
            return other
        if not other.intervals:
            return self
        merged = sorted(self.intervals + other.intervals)
        out = [merged[0]]
        for lo, hi in merged[1:]:
            if lo <= out[-1][1]:
                if hi > out[-1][1]:
                    out[-1] = (out[-1][0], hi)
            else:
                out.append((lo, hi))
        return IntervalSet._from_canonical(tuple(out))

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        A, B = self.intervals, other.intervals
        if not A or not B:
            return IntervalSet.empty()
        out, i, j = [], 0, 0
        while i < len(A) and j < len(B):
            lo = max(A[i][0], B[j][0])
            hi = min(A[i][1], B[j][1])
            if lo < hi:
                out.append((lo, hi))
            if A[i][1] < B[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet._from_canonical(tuple(out))

    def subtract(self, other: "IntervalSet") -> "IntervalSet":
        A, B = self.intervals, other.intervals
        if not A or not B:
            return self
        out, j = [], 0
        for lo, hi in A:
            cur = lo
            while j < len(B) and B[j][1] <= cur:
                j += 1
            k = j
            while k < len(B) and B[k][0] < hi:
                if B[k][0] > cur:
                    out.append((cur, B[k][0]))
                cur = max(cur, B[k][1])
                if cur >= hi:
                    break
                k += 1
            if cur < hi:
                out.append((cur, hi))
        return IntervalSet._from_canonical(tuple(out))

    def sym_diff(self, other: "IntervalSet") -> "IntervalSet":
        return self.subtract(other).union(other.subtract(self))

    def complement(self) -> "IntervalSet":
        return IntervalSet.full().subtract(self)

    __or__ = union
    __and__ = intersect
    __sub__ = subtract
    __xor__ = sym_diff

    def isdisjoint(self, other: "IntervalSet") -> bool:
        return not self.intersect(other)

    def issubset(self, other: "IntervalSet") -> bool:
        return not self.subtract(other)

    # -- deterministic sub-selection -------------------------------------

    def leftmost_subset(self, m) -> "IntervalSet":
        """The unique subset of measure exactly ``m`` obtained by a left-to-right sweep.

        Deterministic realization of every "choose a measurable subset of
        measure m" step; raises :class:`ValueError` unless 0 <= m <= measure.
        """
        m = Fraction(m)
        if m < 0 or m > self.measure():
            raise ValueError(f"requested measure {m} outside [0, {self.measure()}]")
        out = []
        left = m
        for lo, hi in self.intervals:
            if left == 0:
                break
            step = min(left, hi - lo)
            out.append((lo, lo + step))
            left -= step
        return IntervalSet._from_canonical(tuple(out))

    def translate(self, t) -> "IntervalSet":
        """Shift by ``t``; every translated interval must stay inside [0, 1)."""
        t = Fraction(t)
        return IntervalSet([(lo + t, hi + t) for lo, hi in self.intervals])

    # -- serialization ----------------------------------------------------

    def to_json(self):
        return [[format_rational(lo), format_rational(hi)] for lo, hi in self.intervals]

    @classmethod
    def from_json(cls, data) -> "IntervalSet":
        return cls([(parse_rational(lo), parse_rational(hi)) for lo, hi in data])


def boolean_ops(a: IntervalSet, b: IntervalSet, which: str) -> IntervalSet:
    """Dispatch for the four exact set operations: union/intersect/subtract/sym_diff."""
    if which not in ("union", "intersect", "subtract", "sym_diff"):
        raise PreconditionError(f"unknown set operation {which!r}")
    return getattr(a, which)(b)
