"""Integer fast paths for sets aligned to a p-power grid.

An interval list at depth d is a canonical list of integer pairs (lo, hi)
meaning [lo/p^d, hi/p^d).  The odometer map, restricted to such sets,
never leaves the grid (the digit recursion bottoms out at depth d), so
images and the return-time sweeps can run on machine integers.  Results
are exactly the ones the Fraction paths produce.
"""

from __future__ import annotations

from fractions import Fraction


def padic_depth_of(intervals, p: int, cap: int = 96):
    """Common p-power depth of all endpoints, or None if unaligned/too deep."""
    d = 0
    for lo, hi in intervals:
        for x in (lo, hi):
            den, j = x.denominator, 0
            while den > 1:
                if den % p:
                    return None
                den //= p
                j += 1
                if j > cap:
                    return None
            d = max(d, j)
    return d


def to_grid(intervals, p: int, d: int):
    scale = p**d
    return [(int(lo * scale), int(hi * scale)) for lo, hi in intervals]


def from_grid(pairs, p: int, d: int):
    """Back to canonical Fraction pairs; input must be sorted and disjoint."""
    scale = p**d
    out = []
    for lo, hi in pairs:
        if out and lo == out[-1][1]:
            out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return tuple((Fraction(lo, scale), Fraction(hi, scale)) for lo, hi in out)


def _split_digits(ivs, p, S):
    branches = [[] for _ in range(p)]
    for lo, hi in ivs:
        d = lo * p // S
        while lo < hi:
            cut = (d + 1) * S // p
            top = hi if hi < cut else cut
            branches[d].append((lo * p - d * S, top * p - d * S))
            lo, d = top, d + 1
    return branches


def _shift(ivs, steps, p, S):
    if not ivs or steps == 0:
        return list(ivs)
    if ivs[0][0] == 0 and ivs[0][1] == S:
        return list(ivs)
    out = []
    if steps > 0:
        s0, s1 = steps % p, steps // p
        for d, branch in enumerate(_split_digits(ivs, p, S)):
            if not branch:
                continue
            e = (d + s0) % p
            img = _shift(branch, s1 + (d + s0) // p, p, S)
            out.extend(((lo + e * S) // p, (hi + e * S) // p) for lo, hi in img)
    else:
        s = -steps
        s0, s1 = s % p, s // p
        for e, branch in enumerate(_split_digits(ivs, p, S)):
            if not branch:
                continue
            d = (e - s0) % p
            img = _shift(branch, -(s1 + (1 if e < s0 else 0)), p, S)
            out.extend(((lo + d * S) // p, (hi + d * S) // p) for lo, hi in img)
    return out


def shift_grid(pairs, steps: int, p: int, d: int):
    """T^steps on a canonical depth-d integer interval list; output canonical."""
    out = _shift(pairs, steps, p, p**d)
    out.sort()
    merged = []
    for lo, hi in out:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return merged


def intersect_grid(A, B):
    out, i, j = [], 0, 0
    la, lb = len(A), len(B)
    while i < la and j < lb:
        a0, a1 = A[i]
        b0, b1 = B[j]
        lo = a0 if a0 > b0 else b0
        hi = a1 if a1 < b1 else b1
        if lo < hi:
            out.append((lo, hi))
        if a1 < b1:
            i += 1
        else:
            j += 1
    return out


def subtract_grid(A, B):
    out, j = [], 0
    lb = len(B)
    for lo, hi in A:
        cur = lo
        while j < lb and B[j][1] <= cur:
            j += 1
        k = j
        while k < lb and B[k][0] < hi:
            if B[k][0] > cur:
                out.append((cur, B[k][0]))
            if B[k][1] > cur:
                cur = B[k][1]
            if cur >= hi:
                break
            k += 1
        if cur < hi:
            out.append((cur, hi))
    return out
