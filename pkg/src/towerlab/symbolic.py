"""Words, universal words, name copying onto towers, and finite-window symbolic measures.

A word is a tuple of 1-based symbols over the alphabet {1, ..., k}.
Copying a word onto a column paints level j into cell word[j], which is
how every partition in the tower constructions is produced.  The
:class:`SymbolicApprox` holds exact cylinder measures rho(w) for all
positive-measure words up to a window length; it is the computable
finite-window stand-in for the symbolic representation of a process.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import PreconditionError, SizeCapExceeded
from .exact_sets import IntervalSet, format_rational, parse_rational
from .odometer import OdometerSystem, point_name
from .partitions import Partition
from .towers import Column, Tower

__all__ = [
    "Word",
    "word_from_str",
    "word_to_str",
    "NamedTower",
    "SymbolicApprox",
    "universal_word",
    "copy_name_on_column",
    "copy_names_on_tower",
    "symbolic_measure",
    "visit_set",
    "hit_set",
]

Word = tuple  # of 1-based ints


def word_from_str(s: str) -> Word:
    """Parse "1221" (digits) or "1,2,2,1" (comma separated, for alphabets > 9)."""
    s = s.strip()
    if "," in s:
        return tuple(int(tok) for tok in s.split(","))
    return tuple(int(ch) for ch in s)


def word_to_str(w: Word) -> str:
    if any(a > 9 for a in w):
        return ",".join(str(a) for a in w)
    return "".join(str(a) for a in w)


@dataclass(frozen=True)
class NamedTower:
    """A tower with one word per column, of length equal to the column height."""

    tower: Tower
    names: tuple

    def __post_init__(self):
        if len(self.tower.columns) != len(self.names):
            raise PreconditionError("one name per column")
        for col, name in zip(self.tower.columns, self.names):
            if len(name) != col.height:
                raise PreconditionError("name length must match the column height")

    def to_json(self):
        return {
            "columns": [
                {"base": c.base.to_json(), "height": c.height, "name": word_to_str(n)}
                for c, n in zip(self.tower.columns, self.names)
            ]
        }


def universal_word(k: int, m: int, size_cap: int = 2_000_000) -> Word:
    """Concatenation of all m-words over {1..k} in lexicographic order.

    Every m-word appears as an aligned length-m block, exactly once; the
    total length is m * k^m.
    """
    if k < 2 or m < 1:
        raise PreconditionError("need alphabet k >= 2 and block length m >= 1")
    if m * k**m > size_cap:
        raise SizeCapExceeded(f"universal word length {m * k**m} exceeds cap {size_cap}")
    out = []
    for block in product(range(1, k + 1), repeat=m):
        out.extend(block)
    return tuple(out)


def copy_name_on_column(part, sys: OdometerSystem, col: Column, name: Word) -> Partition:
    """Paint ``name`` onto the first len(name) levels of ``col``.

    ``part`` is the partition being adjusted, or an int k for a fresh
    k-cell partition whose cell 1 is everything.  Level j of the column
    moves to cell name[j]; the rest of the space is left as it was.
    """
    if isinstance(part, int):
        k = part
        cells = [IntervalSet.full()] + [IntervalSet.empty()] * (k - 1)
    else:
        cells = list(part.cells)
        k = len(cells)
    if len(name) > col.height:
        raise PreconditionError("name longer than the column")
    if any(a < 1 or a > k for a in name):
        raise PreconditionError("name symbol outside the alphabet")
    painted = [IntervalSet.empty()] * k
    touched = IntervalSet.empty()
    level = col.base
    for a in name:
        painted[a - 1] = painted[a - 1].union(level)
        touched = touched.union(level)
        level = sys.image(level, 1)
    cells = [c.subtract(touched).union(painted[i]) for i, c in enumerate(cells)]
    return Partition(cells)


def copy_names_on_tower(part, sys: OdometerSystem, named: NamedTower) -> Partition:
    for col, name in zip(named.tower.columns, named.names):
        part = copy_name_on_column(part, sys, col, name)
    return part


@dataclass
class SymbolicApprox:
    """Exact cylinder measures rho(w) for positive-measure words of length <= window."""

    alphabet_size: int
    window: int
    rho: dict = field(default_factory=dict)  # Word -> Fraction, positive entries only

    def measure(self, w: Word) -> Fraction:
        return self.rho.get(tuple(w), Fraction(0))

    def support(self, length: int) -> list[Word]:
        return sorted(w for w in self.rho if len(w) == length)

    def check_consistency(self) -> bool:
        """rho(w) == sum_s rho(ws) for every entry shorter than the window."""
        for w, mass in self.rho.items():
            if len(w) < self.window:
                ext = sum(
                    (self.rho.get(w + (s,), Fraction(0)) for s in range(1, self.alphabet_size + 1)),
                    Fraction(0),
                )
                if ext != mass:
                    return False
        return True

    def to_json(self):
        return {
            "k": self.alphabet_size,
            "L": self.window,
            "rho": {word_to_str(w): format_rational(q) for w, q in sorted(self.rho.items())},
        }

    @classmethod
    def from_json(cls, data) -> "SymbolicApprox":
        return cls(
            alphabet_size=int(data["k"]),
            window=int(data["L"]),
            rho={word_from_str(w): parse_rational(q) for w, q in data["rho"].items()},
        )


def symbolic_measure(sys: OdometerSystem, a: Partition, L: int, size_cap: int = 200_000) -> SymbolicApprox:
    """rho(w) = mu(intersection of T^-i A_{w_i}) for all positive words with |w| <= L."""
    if L < 1:
        raise PreconditionError("window must be >= 1")
    k = len(a.cells)
    rho = {}
    frontier = {(): IntervalSet.full()}
    for depth in range(L):
        pulled = [sys.image(c, -depth) for c in a.cells]
        nxt = {}
        for w, cur in frontier.items():
            for i in range(1, k + 1):
                piece = cur.intersect(pulled[i - 1])
                if piece:
                    nxt[w + (i,)] = piece
        if len(nxt) > size_cap:
            raise SizeCapExceeded(f"support at length {depth + 1} exceeds cap {size_cap}")
        for w, piece in nxt.items():
            rho[w] = piece.measure()
        frontier = nxt
    return SymbolicApprox(alphabet_size=k, window=L, rho=rho)


def visit_set(sys: OdometerSystem, x, a: Partition, target_word: Word, L: int) -> set[int]:
    """{n in [0, L) : the |w|-name of T^n x equals the target word}."""
    w = tuple(target_word)
    name = point_name(sys, x, a, L + len(w) - 1)
    return {n for n in range(L) if name[n : n + len(w)] == w}


def hit_set(approx: SymbolicApprox, u: Word, v: Word, L: int) -> set[int]:
    """Window-exact {n in [0, L) : some support word carries u at 0 and v at n}.

    Cylinder-overlap semantics on the finite window: the only computable
    surrogate for open-set hitting times.
    """
    u, v = tuple(u), tuple(v)
    if len(u) + L + len(v) - 1 > approx.window:
        raise PreconditionError("window too small for the requested hit range")
    by_len = {}
    for w in approx.rho:
        by_len.setdefault(len(w), []).append(w)
    out = set()
    for n in range(L):
        need = max(len(u), n + len(v))
        for w in by_len.get(need, ()):
            if w[: len(u)] == u and w[n : n + len(v)] == v:
                out.add(n)
                break
    return out
