"""p-adic odometers (adding machines) realized as exact piecewise translations of [0, 1).

A point x in [0, 1) is identified with its base-p digit sequence
(d_0, d_1, ...) where x = sum d_i p^{-(i+1)}; the map T adds 1 with carry
to d_0.  On interval sets with rational endpoints, T^s is computed exactly
by splitting the operand along digit cylinders only as finely as its
endpoints require; all results are canonical :class:`IntervalSet` values
and measure is preserved exactly.

A depth-m cylinder is indexed by the integer t = sum d_i p^i (the "orbit
index"): T acts on depth-m cylinders as t -> t+1 mod p^m, which is what
makes tower surgery on odometers a matter of integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import _intgrid
from .errors import PreconditionError
from .exact_sets import IntervalSet

__all__ = [
    "OdometerSystem",
    "cylinder_set",
    "cylinder_period_check",
    "point_name",
    "index_position",
    "rev_index",
    "to_index_list",
    "from_index_list",
    "membership_table",
]

_FULL = (Fraction(0), Fraction(1))


def _split_digits(ivs, p):
    """Split a canonical interval list along the p digit cells; returns p lists."""
    branches = [[] for _ in range(p)]
    for lo, hi in ivs:
        d = int(lo * p)  # first digit of lo
        while lo < hi:
            cut = Fraction(d + 1, p)
            top = min(hi, cut)
            branches[d].append((lo * p - d, top * p - d))
            lo, d = top, d + 1
    return branches


def _shift(ivs, steps, p):
    """Digit-carry recursion behind T^steps; ivs is a canonical tuple of pairs."""
    if not ivs or steps == 0:
        return list(ivs)
    if ivs[0] == _FULL:
        return list(ivs)  # T^s is a mod-null bijection; the full branch is fixed
    out = []
    if steps > 0:
        s0, s1 = steps % p, steps // p
        for d, branch in enumerate(_split_digits(ivs, p)):
            if not branch:
                continue
            e, carry = (d + s0) % p, (d + s0) // p
            img = _shift(tuple(branch), s1 + carry, p)
            out.extend(((lo + e) / p, (hi + e) / p) for lo, hi in img)
    else:
        s = -steps
        s0, s1 = s % p, s // p
        for e, branch in enumerate(_split_digits(ivs, p)):
            if not branch:
                continue
            d = (e - s0) % p
            carry = 1 if e < s0 else 0
            img = _shift(tuple(branch), -(s1 + carry), p)
            out.extend(((lo + d) / p, (hi + d) / p) for lo, hi in img)
    return out


@dataclass(frozen=True)
class OdometerSystem:
    """The base-p adding machine on [0, 1); immutable and safe to share."""

    base_p: int

    def __post_init__(self):
        if self.base_p < 2:
            raise PreconditionError("odometer base must be >= 2")

    @property
    def p(self) -> int:
        return self.base_p

    def image(self, a: IntervalSet, steps: int) -> IntervalSet:
        """T^steps(a), exact; negative steps apply the inverse map."""
        p = self.base_p
        d = _intgrid.padic_depth_of(a.intervals, p)
        if d is not None:  # endpoints on a p-power grid: integer arithmetic
            out = _intgrid.shift_grid(_intgrid.to_grid(a.intervals, p, d), steps, p, d)
            return IntervalSet._from_canonical(_intgrid.from_grid(out, p, d))
        return IntervalSet(_shift(a.intervals, steps, self.base_p))

    def to_json(self):
        return {"system": {"odometer": self.base_p}}

    @classmethod
    def from_json(cls, data) -> "OdometerSystem":
        return cls(int(data["system"]["odometer"]))


def _check_digits(sys: OdometerSystem, digits):
    digs = [int(c) for c in digits]
    if any(d < 0 or d >= sys.base_p for d in digs):
        raise PreconditionError(f"digit out of range for base {sys.base_p}: {digits!r}")
    return digs


def cylinder_set(sys: OdometerSystem, digits) -> IntervalSet:
    """The interval [v, v + p^-n) of points whose first n digits equal ``digits``."""
    digs = _check_digits(sys, digits)
    p = sys.base_p
    v = sum(Fraction(d, p ** (i + 1)) for i, d in enumerate(digs))
    return IntervalSet.interval(v, v + Fraction(1, p ** len(digs)))


def cylinder_period_check(sys: OdometerSystem, digits) -> bool:
    """Exact check that T^(p^|digits|) maps the cylinder onto itself."""
    c = cylinder_set(sys, digits)
    return sys.image(c, sys.base_p ** len(_check_digits(sys, digits))) == c


def index_position(t: int, depth: int, p: int) -> Fraction:
    """Left endpoint of the depth-``depth`` cylinder with orbit index t."""
    v, scale = Fraction(0), Fraction(1, p)
    for _ in range(depth):
        v += (t % p) * scale
        t //= p
        scale /= p
    return v


def rev_index(u: int, depth: int, p: int) -> int:
    """Reverse the ``depth`` base-p digits of u (position grid <-> orbit index)."""
    t = 0
    for _ in range(depth):
        t = t * p + u % p
        u //= p
    return t


def to_index_list(a: IntervalSet, depth: int, p: int) -> list[int]:
    """Orbit indices of the depth-``depth`` cylinders whose union is ``a``.

    Requires every endpoint of ``a`` to be a multiple of p^-depth.
    """
    scale = p**depth
    out = []
    for lo, hi in a.intervals:
        ulo, uhi = lo * scale, hi * scale
        if ulo.denominator != 1 or uhi.denominator != 1:
            raise PreconditionError(f"set not aligned to the depth-{depth} cylinder grid")
        out.extend(rev_index(u, depth, p) for u in range(int(ulo), int(uhi)))
    out.sort()
    return out


def from_index_list(indices, depth: int, p: int) -> IntervalSet:
    """Union of depth-``depth`` cylinders with the given orbit indices."""
    scale = p**depth
    grid = sorted(rev_index(t, depth, p) for t in indices)
    ivs = []
    run_lo = None
    prev = None
    for u in grid:
        if run_lo is None:
            run_lo = prev = u
        elif u == prev + 1:
            prev = u
        else:
            ivs.append((Fraction(run_lo, scale), Fraction(prev + 1, scale)))
            run_lo = prev = u
    if run_lo is not None:
        ivs.append((Fraction(run_lo, scale), Fraction(prev + 1, scale)))
    return IntervalSet(ivs)


def membership_table(a: IntervalSet, depth: int, p: int) -> list[bool]:
    """bools[t] == (depth-cylinder t is inside a); endpoints must align to the grid."""
    scale = p**depth
    table = [False] * scale
    for lo, hi in a.intervals:
        ulo, uhi = lo * scale, hi * scale
        if ulo.denominator != 1 or uhi.denominator != 1:
            raise PreconditionError(f"set not aligned to the depth-{depth} cylinder grid")
        for u in range(int(ulo), int(uhi)):
            table[rev_index(u, depth, p)] = True
    return table


def _point_orbit_value(sys: OdometerSystem, x: Fraction, n: int) -> Fraction:
    """T^n(x) for x with denominator a power of p, via digit-integer addition."""
    p = sys.base_p
    den = x.denominator
    j = 0
    while den > 1:
        if den % p:
            raise PreconditionError(f"point denominator {x.denominator} is not a power of {p}")
        den //= p
        j += 1
    u = int(x * p**j)
    m = rev_index(u, j, p) + n
    if m < 0:
        raise PreconditionError("negative orbit time before 0 digits run out")
    width = j
    while p**width <= m:
        width += 1
    return index_position(m, width, p)


def point_name(sys: OdometerSystem, x, part, length: int) -> tuple[int, ...]:
    """The (partition, length)-name of x: symbol i at slot n iff T^n(x) lies in cell i.

    Cells are numbered from 1.  x must lie in [0, 1) with denominator a
    power of p (an eventually-zero digit sequence).
    """
    x = Fraction(x)
    if not 0 <= x < 1:
        raise PreconditionError(f"point {x} outside [0, 1)")
    name = []
    for n in range(length):
        v = _point_orbit_value(sys, x, n)
        for i, cell in enumerate(part.cells, 1):
            if v in cell:
                name.append(i)
                break
        else:  # cells cover [0, 1), so this cannot happen on valid partitions
            raise PreconditionError(f"point {v} not covered by partition")
    return tuple(name)
