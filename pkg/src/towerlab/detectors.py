"""Window-exact classifiers for syndetic / thick / piecewise-syndetic / thickly-syndetic structure.

All detectors work on a finite window [0, L) and report witnesses at
explicit parameters; nothing here decides the infinite notions (no finite
window can).  Gap computations include the boundary gaps to 0 and L, so a
witness stays a witness when the window is extended.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError

__all__ = [
    "WindowSet",
    "max_gap",
    "longest_run",
    "piecewise_syndetic_witness",
    "thickly_syndetic_witness",
    "window_minimal_words",
]


@dataclass(frozen=True)
class WindowSet:
    """A subset of the window [0, L)."""

    window: int
    members: tuple

    def __init__(self, window, members):
        members = tuple(sorted(set(int(x) for x in members)))
        if members and not (0 <= members[0] and members[-1] < window):
            raise PreconditionError("members must lie in [0, window)")
        object.__setattr__(self, "window", int(window))
        object.__setattr__(self, "members", members)

    def to_json(self):
        return {"L": self.window, "members": list(self.members)}

    @classmethod
    def from_json(cls, data) -> "WindowSet":
        return cls(data["L"], data["members"])


def max_gap(s: WindowSet) -> int:
    """Largest gap between consecutive members, boundary gaps to 0 and L included."""
    if not s.members:
        raise PreconditionError("max_gap of an empty window set")
    gaps = [s.members[0] - 0, s.window - s.members[-1]]
    gaps.extend(b - a for a, b in zip(s.members, s.members[1:]))
    return max(gaps)


def longest_run(s: WindowSet) -> int:
    """Length of the longest block of consecutive integers in the set (0 if empty)."""
    best = cur = 0
    prev = None
    for x in s.members:
        cur = cur + 1 if prev is not None and x == prev + 1 else 1
        best = max(best, cur)
        prev = x
    return best


def _interval_ok(s: WindowSet, a: int, b: int, g: int) -> bool:
    """Does s have gaps <= g throughout [a, b] (edges included)?"""
    inside = [x for x in s.members if a <= x <= b]
    if not inside:
        return False
    gaps = [inside[0] - a, b - inside[-1]]
    gaps.extend(y - x for x, y in zip(inside, inside[1:]))
    return max(gaps) <= g


def piecewise_syndetic_witness(s: WindowSet, g: int, r: int):
    """An interval of length >= r on which s has gaps <= g, or None.

    The returned witness is the member span of a maximal g-chain, extended
    by at most g at each end when the bare span is too short.
    """
    if g < 1 or r < 1:
        raise PreconditionError("need g >= 1 and r >= 1")
    if not s.members:
        return None
    chains = []
    start = prev = s.members[0]
    for x in s.members[1:]:
        if x - prev <= g:
            prev = x
        else:
            chains.append((start, prev))
            start = prev = x
    chains.append((start, prev))
    for a, b in chains:
        if b - a + 1 >= r:
            return (a, b)
    for a, b in chains:  # edge extension, clipped to the window
        lo = max(0, a - g)
        hi = min(s.window - 1, b + g)
        if hi - lo + 1 >= r:
            return (lo, hi)
    return None


def thickly_syndetic_witness(s: WindowSet, r: int, g: int):
    """Start positions of all length->=r runs, provided their max gap is <= g; else None.

    A "run start" is any i with [i, i+r) inside the set (sliding, so a long
    run contributes many starts).
    """
    if r < 1 or g < 1:
        raise PreconditionError("need r >= 1 and g >= 1")
    mem = set(s.members)
    starts = [i for i in range(s.window - r + 1) if all(i + j in mem for j in range(r))]
    if not starts:
        return None
    cert = WindowSet(s.window, starts)
    return cert if max_gap(cert) <= g else None


def _occurrences(w, big):
    n, m = len(big), len(w)
    return [i for i in range(n - m + 1) if big[i : i + m] == w]


def window_minimal_words(approx, r: int):
    """Heuristic window surrogate for words of the minimal-points closure.

    A word w qualifies when every length-r support word containing w
    contains an occurrence of w inside every length floor(r/2) sub-window
    of the admissible start range; the result is closed under subwords by
    keeping only words all of whose subwords also qualify.
    """
    if r > approx.window:
        raise PreconditionError("r exceeds the approximation window")
    half = r // 2
    big_words = approx.support(r)
    candidates = {w for length in range(1, half + 1) for w in approx.support(length)}

    def recurrent(w):
        for big in big_words:
            occ = _occurrences(w, big)
            if not occ:
                continue
            last_start = r - len(w)
            lo = 0
            while lo + half - 1 <= last_start:
                if not any(lo <= i <= lo + half - 1 for i in occ):
                    return False
                lo += 1
        return True

    passed = {w for w in candidates if recurrent(w)}

    def all_subwords_pass(w):
        for i in range(len(w)):
            for j in range(i + 1, len(w) + 1):
                if w[i:j] not in passed:
                    return False
        return True

    return {w for w in passed if all_subwords_pass(w)}
