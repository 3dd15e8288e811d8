"""Rokhlin, Kakutani, and Kakutani-Rokhlin towers over odometers, and tower surgery.

The centerpiece is :func:`kr_prime`: given a K-R tower with relatively
prime column heights and a target n, it produces a taller K-R tower whose
return times all lie in [n, n+6N] and whose heights are again relatively
prime, together with a full audit trace of every intermediate set the
surgery touches.

Internally the surgery runs on the orbit-index grid (depth-m cylinders,
where T acts as t -> t+1 mod p^m); every emitted set is an exact
:class:`IntervalSet` and every claimed property is asserted before
returning.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction

from . import _intgrid
from .errors import HeightBudgetExceeded, MasterTowerError, PreconditionError
from .exact_sets import IntervalSet
from .odometer import OdometerSystem, from_index_list, index_position, rev_index

__all__ = [
    "Column",
    "Tower",
    "KrPrimeTrace",
    "carrier",
    "heights",
    "gcd_heights",
    "rokhlin_tower",
    "kakutani_tower",
    "refine_tower",
    "refine_tower_with_names",
    "column_name",
    "tower_n1n2",
    "kr_prime",
    "infinite_heights_iterate",
]


@dataclass(frozen=True)
class Column:
    """A Rokhlin column: base together with a height; levels are T^j(base), 0 <= j < height."""

    base: IntervalSet
    height: int

    def carrier(self, sys: OdometerSystem) -> IntervalSet:
        out = IntervalSet.empty()
        level = self.base
        for _ in range(self.height):
            out = out.union(level)
            level = sys.image(level, 1)
        return out

    def levels_disjoint(self, sys: OdometerSystem) -> bool:
        """Exact check that the height many images of the base are pairwise disjoint."""
        total = IntervalSet.empty()
        level = self.base
        for _ in range(self.height):
            if not total.isdisjoint(level):
                return False
            total = total.union(level)
            level = sys.image(level, 1)
        return True

    def to_json(self):
        return {"base": self.base.to_json(), "height": self.height}

    @classmethod
    def from_json(cls, data) -> "Column":
        return cls(IntervalSet.from_json(data["base"]), int(data["height"]))


@dataclass(frozen=True)
class Tower:
    """A finite collection of disjoint columns."""

    columns: tuple

    def __init__(self, columns):
        object.__setattr__(self, "columns", tuple(columns))

    def base(self) -> IntervalSet:
        out = IntervalSet.empty()
        for c in self.columns:
            out = out.union(c.base)
        return out

    def to_json(self):
        return {"columns": [c.to_json() for c in self.columns]}

    @classmethod
    def from_json(cls, data) -> "Tower":
        return cls([Column.from_json(c) for c in data["columns"]])


def carrier(sys: OdometerSystem, t: Tower) -> IntervalSet:
    out = IntervalSet.empty()
    for c in t.columns:
        out = out.union(c.carrier(sys))
    return out


def heights(t: Tower) -> list[int]:
    return sorted(c.height for c in t.columns)


def gcd_heights(t: Tower) -> int:
    return math.gcd(*heights(t)) if t.columns else 0


def rokhlin_tower(sys: OdometerSystem, N: int) -> Column:
    """A height-N column over the dyadic-style base [0, p^-m) with p^m >= N.

    The carrier has measure N * p^-m >= 1 - 1/N, and equals 1 whenever N
    is a power of p.
    """
    if N < 1:
        raise PreconditionError("height must be >= 1")
    p, m = sys.base_p, 0
    while p**m < N:
        m += 1
    return Column(IntervalSet.interval(0, Fraction(1, p**m)), N)


def kakutani_tower(sys: OdometerSystem, B: IntervalSet, max_h: int) -> Tower:
    """Group B by first-return time: one column of height k per value k of r_B.

    Runs an exact forward sweep; raises :class:`HeightBudgetExceeded` if any
    mass of B has return time beyond ``max_h``.  Bases on a p-power grid
    sweep in integer arithmetic.
    """
    if not B:
        raise PreconditionError("base must have positive measure")
    p = sys.base_p
    d = _intgrid.padic_depth_of(B.intervals, p)
    if d is not None:
        cols = []
        unresolved = pulled = _intgrid.to_grid(B.intervals, p, d)
        for j in range(1, max_h + 1):
            pulled = _intgrid.shift_grid(pulled, -1, p, d)
            hit = _intgrid.intersect_grid(unresolved, pulled)
            if hit:
                cols.append(Column(IntervalSet._from_canonical(_intgrid.from_grid(hit, p, d)), j))
                unresolved = _intgrid.subtract_grid(unresolved, pulled)
                if not unresolved:
                    break
        leftover = Fraction(sum(hi - lo for lo, hi in unresolved), p**d) if unresolved else Fraction(0)
    else:
        cols = []
        unresolved = B  # mass of B with no return observed yet
        pulled = B  # T^{-j} B
        for j in range(1, max_h + 1):
            pulled = sys.image(pulled, -1)
            hit = unresolved.intersect(pulled)
            if hit:
                cols.append(Column(hit, j))
                unresolved = unresolved.subtract(pulled)
                if not unresolved:
                    break
        leftover = unresolved.measure() if unresolved else Fraction(0)
    if leftover:
        raise HeightBudgetExceeded(
            f"height budget exceeded: measure {leftover} of the base has return time beyond {max_h}"
        )
    return Tower(cols)


def refine_tower_with_names(sys: OdometerSystem, t: Tower, part) -> list[tuple[Column, tuple[int, ...]]]:
    """Split every column into sub-columns of constant (partition, height)-name.

    Returns (sub-column, name) pairs; sub-bases of a column union back to its
    base exactly.  Names are 1-based cell indices.
    """
    out = []
    max_h = max((c.height for c in t.columns), default=0)
    pulled = list(part.cells)  # T^{-j} A_i, updated level by level
    pieces = [[((), c.base)] for c in t.columns]
    for j in range(max_h):
        if j > 0:
            pulled = [sys.image(c, -1) for c in pulled]
        for ci, col in enumerate(t.columns):
            if j >= col.height:
                continue
            nxt = []
            for name, sub in pieces[ci]:
                for i, cell in enumerate(pulled, 1):
                    part_piece = sub.intersect(cell)
                    if part_piece:
                        nxt.append((name + (i,), part_piece))
            pieces[ci] = nxt
    for ci, col in enumerate(t.columns):
        for name, sub in sorted(pieces[ci], key=lambda kv: kv[0]):
            out.append((Column(sub, col.height), name))
    return out


def refine_tower(sys: OdometerSystem, t: Tower, part) -> Tower:
    return Tower([col for col, _ in refine_tower_with_names(sys, t, part)])


def column_name(sys: OdometerSystem, col: Column, part, length: int | None = None) -> tuple[int, ...]:
    """The constant (partition, height)-name of a column; raises if some level is split."""
    n = col.height if length is None else min(length, col.height)
    name = []
    level = col.base
    for _ in range(n):
        for i, cell in enumerate(part.cells, 1):
            if level.issubset(cell):
                name.append(i)
                break
        else:
            raise PreconditionError("column level is split by the partition; refine first")
        level = sys.image(level, 1)
    return tuple(name)


def tower_n1n2(sys: OdometerSystem, N1: int, N2: int) -> Tower:
    """A K-R tower whose return times all lie in {N1, N2}, both attained.

    Standard construction: take the full-cycle column over [0, p^-m) and cut
    its height p^m into blocks of sizes N1 and N2 (possible with both block
    kinds present once p^m is large enough, by coprimality); block starts
    form the new base.
    """
    if N1 >= N2 or N1 < 1:
        raise PreconditionError("need 1 <= N1 < N2")
    if math.gcd(N1, N2) != 1:
        raise PreconditionError("N1 and N2 must be relatively prime")
    p = sys.base_p
    m = 0
    while p**m < (N1 - 1) * (N2 - 1) + N2:
        m += 1
    for attempt in range(9):
        M = p ** (m + attempt)
        ab = next(
            ((int((M - b * N2) // N1), b) for b in range(1, M // N2 + 1) if (M - b * N2) % N1 == 0 and M - b * N2 >= N1),
            None,
        )
        if ab is not None:
            a, b = ab
            m += attempt
            break
    else:
        raise MasterTowerError("increase master height: no chopping with both block sizes")
    starts_n1 = [i * N1 for i in range(a)]
    starts_n2 = [a * N1 + i * N2 for i in range(b)]
    return Tower(
        [
            Column(from_index_list(starts_n1, m, p), N1),
            Column(from_index_list(starts_n2, m, p), N2),
        ]
    )


def infinite_heights_iterate(
    sys: OdometerSystem, B0: IntervalSet, iterations: int, *, max_h_cap: int = 1 << 15
) -> tuple[IntervalSet, Tower]:
    """Grow the set of distinct column heights by shaving the tallest column's return set.

    Each round removes from the base a thin piece E of the tallest column's
    top image, with mu(E) = min_i mu(C^i) / 2^(k+1); mass that used to return
    into E now returns later, which creates a height strictly above the old
    maximum.  Returns the final base and its Kakutani tower.
    """
    if iterations < 1:
        raise PreconditionError("iterations must be >= 1")
    C = B0
    budget = 64
    for k in range(1, iterations + 1):
        t = _kakutani_grow(sys, C, budget, max_h_cap)
        tallest = max(t.columns, key=lambda c: c.height)
        bound = min(c.base.measure() for c in t.columns) / 2 ** (k + 1)
        top = sys.image(tallest.base, tallest.height)
        E = top.leftmost_subset(bound)
        C = C.subtract(E)
        budget = max(budget, 2 * tallest.height + 2)
    return C, _kakutani_grow(sys, C, budget, max_h_cap)


def _kakutani_grow(sys, B, budget, cap):
    while True:
        try:
            return kakutani_tower(sys, B, budget)
        except HeightBudgetExceeded:
            if budget >= cap:
                raise
            budget = min(cap, budget * 2)


# ---------------------------------------------------------------------------
# Coprime-heights K-R surgery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KrPrimeTrace:
    """Audit record of every intermediate set of the coprime-heights surgery."""

    input_tower: Tower
    n: int
    b_sets: tuple  # the k window-spaced cylinders forming the sparse base
    n_positions: tuple[int, ...]
    d_hat: IntervalSet
    e_sets: tuple
    f_sets: tuple
    eps0: Fraction
    h_hats: tuple[int, ...]
    output_base: IntervalSet
    block_window: int  # minimum return time enforced for the sparse base
    master_depth: int  # depth m of the index grid the surgery ran on

    def to_json(self):
        from .exact_sets import format_rational

        return {
            "kind": "kr_prime_trace",
            "input_tower": self.input_tower.to_json(),
            "n": self.n,
            "b_sets": [s.to_json() for s in self.b_sets],
            "n_positions": list(self.n_positions),
            "d_hat": self.d_hat.to_json(),
            "e_sets": [s.to_json() for s in self.e_sets],
            "f_sets": [s.to_json() for s in self.f_sets],
            "eps0": format_rational(self.eps0),
            "h_hats": list(self.h_hats),
            "output_base": self.output_base.to_json(),
            "block_window": self.block_window,
            "master_depth": self.master_depth,
        }

    @classmethod
    def from_json(cls, data) -> "KrPrimeTrace":
        from .exact_sets import parse_rational

        return cls(
            input_tower=Tower.from_json(data["input_tower"]),
            n=int(data["n"]),
            b_sets=tuple(IntervalSet.from_json(s) for s in data["b_sets"]),
            n_positions=tuple(int(x) for x in data["n_positions"]),
            d_hat=IntervalSet.from_json(data["d_hat"]),
            e_sets=tuple(IntervalSet.from_json(s) for s in data["e_sets"]),
            f_sets=tuple(IntervalSet.from_json(s) for s in data["f_sets"]),
            eps0=parse_rational(data["eps0"]),
            h_hats=tuple(int(x) for x in data["h_hats"]),
            output_base=IntervalSet.from_json(data["output_base"]),
            block_window=int(data["block_window"]),
            master_depth=int(data["master_depth"]),
        )


def _padic_depth(x: Fraction, p: int) -> int:
    """Smallest d with x * p^d integral; raises if the denominator has other factors."""
    den, d = x.denominator, 0
    while den > 1:
        if den % p:
            raise PreconditionError("tower bases must be aligned to the p-adic grid")
        den //= p
        d += 1
    return d


def _index_gaps(indices: list[int], modulus: int) -> list[int]:
    """Cyclic successor gaps of a sorted index list."""
    k = len(indices)
    return [(indices[(i + 1) % k] - indices[i]) % modulus or modulus for i in range(k)]


def _residue_distances(valid: list[bool]) -> tuple[list[int], list[int]]:
    """Cyclic distance from each residue to the nearest valid one, downward and upward."""
    m = len(valid)
    if not any(valid):
        raise PreconditionError("no valid residues")
    down = [0] * m
    up = [0] * m
    for _ in range(2):  # second sweep settles the cyclic wrap
        for i in range(m):
            down[i] = 0 if valid[i] else down[i - 1] + 1
        for i in range(m - 1, -1, -1):
            up[i] = 0 if valid[i] else up[(i + 1) % m] + 1
    return down, up


def kr_prime(
    sys: OdometerSystem,
    t: Tower,
    n: int,
    *,
    block_window: int | None = None,
    grid_aligned_f: bool = False,
) -> tuple[Tower, KrPrimeTrace]:
    """Surgery producing a K-R tower with return times in [n, n+6N] and coprime heights.

    ``t`` must be the Kakutani-Rokhlin tower of its own base, with
    relatively prime column heights.  ``block_window`` overrides the default
    minimum return time 10(n+3N)^2 enforced for the sparse intermediate base
    (the default follows the guaranteed-sufficient bound; any value above
    the two-block Frobenius threshold works and is accepted for reduced-size
    runs).  With ``grid_aligned_f`` the thinning sets F_i are unions of whole
    grid cylinders (counts doubling) instead of leftmost half-bound pieces,
    which keeps the output base on the index grid.
    """
    p = sys.base_p
    if not t.columns:
        raise PreconditionError("empty tower")
    hs = [c.height for c in t.columns]
    if math.gcd(*hs) != 1:
        raise PreconditionError("input column heights must be relatively prime")
    N = max(hs)
    k = len(t.columns)
    C = t.base()
    m0 = max(_padic_depth(x, p) for iv in C.intervals for x in iv)
    pm0 = p**m0

    # recompute the return structure of C and check the tower is genuine
    col_of = [-1] * pm0
    base_measures = []
    for ci, col in enumerate(t.columns):
        for lo, hi in col.base.intervals:
            for u in range(int(lo * pm0), int(hi * pm0)):
                col_of[rev_index(u, m0, p)] = ci
        base_measures.append(col.base.measure())
    c_indices = [i for i, c in enumerate(col_of) if c >= 0]
    for idx, gap in zip(c_indices, _index_gaps(c_indices, pm0)):
        if gap != t.columns[col_of[idx]].height:
            raise PreconditionError("input tower is not the Kakutani tower of its base")

    blk = n + 3 * N
    wlen = block_window if block_window is not None else 10 * blk * blk
    if wlen <= blk * (blk + 1) - blk - (blk + 1):
        raise PreconditionError("block_window below the two-block tiling threshold")

    min_mu = min(base_measures)
    m1 = m0
    while p**m1 <= max(2 * wlen, k * (wlen + 1) / min_mu):
        m1 += 1

    last_err = None
    for _attempt in range(8):
        try:
            return _kr_prime_at_depth(sys, t, n, N, k, wlen, m1, m0, col_of, grid_aligned_f)
        except MasterTowerError as err:
            last_err = err
            m1 += 1
    raise MasterTowerError(f"retry with larger master tower: {last_err}")


def _kr_prime_at_depth(sys, t, n, N, k, wlen, m1, m0, col_of, grid_aligned_f):
    p = sys.base_p
    pm1 = p**m1
    pm0 = p**m0
    blk = n + 3 * N
    C = t.base()
    hs_in = [c.height for c in t.columns]

    # master base: the leftmost depth-m1 cylinder inside C
    t_b = rev_index(int(C.intervals[0][0] * pm1), m1, p)

    # window-spaced visits to distinct columns of C
    n_positions, d_cols = [], []
    windows = [(0, wlen)]
    used = set()
    j = wlen
    while len(n_positions) < k:
        if j + wlen > pm1:
            raise MasterTowerError("window search exhausted the master tower")
        wi = bisect.bisect_right(windows, (j, pm1 + wlen)) - 1
        if wi >= 0 and windows[wi][0] <= j <= windows[wi][1]:
            j = windows[wi][1] + 1
            continue
        c = col_of[(t_b + j) % pm0]
        if c >= 0 and c not in used:
            n_positions.append(j)
            d_cols.append(c)
            used.add(c)
            windows.append((j, j + wlen))
            windows.sort()
            j += wlen
        else:
            j += 1
    if pm1 - n_positions[-1] < wlen:
        raise MasterTowerError("wrap-around gap too small")

    b_indices = sorted((t_b + q) % pm1 for q in n_positions)
    col_at = {(t_b + q) % pm1: c for q, c in zip(n_positions, d_cols)}
    gaps = _index_gaps(b_indices, pm1)
    if min(gaps) < wlen:
        raise MasterTowerError("sparse base gaps below the block window")

    # chop each sparse column into blocks of sizes blk/blk+1 and snap block
    # bases to the nearest level inside C (ties toward the base).  Level
    # j sits in C iff (index + j) mod p^m0 is a C residue, so nearest-visit
    # distances are a function of the residue alone.
    down_d, up_d = _residue_distances([c >= 0 for c in col_of])
    d_hat_indices = []
    for idx, g in zip(b_indices, gaps):
        beta = g % blk
        alpha = (g - beta * (blk + 1)) // blk
        if alpha < 0:
            raise MasterTowerError("column height not tileable by the two block sizes")
        starts = [i * blk for i in range(alpha)] + [alpha * blk + i * (blk + 1) for i in range(beta)]
        d_hat_indices.append(idx)
        for q in starts[1:]:
            rho = (idx + q) % pm0
            q_snapped = q - down_d[rho] if down_d[rho] <= up_d[rho] else q + up_d[rho]
            d_hat_indices.append((idx + q_snapped) % pm1)
    d_hat_indices.sort()
    d_gaps = _index_gaps(d_hat_indices, pm1)
    lo_ok, hi_ok = n + N, n + 5 * N
    if not all(lo_ok <= g <= hi_ok for g in d_gaps):
        raise MasterTowerError("snapped block gaps escaped [n+N, n+5N]")
    d_hat = from_index_list(d_hat_indices, m1, p)

    gap_at = dict(zip(d_hat_indices, d_gaps))
    succ_at = {u: d_hat_indices[(i + 1) % len(d_hat_indices)] for i, u in enumerate(d_hat_indices)}

    # thinning sets: E_i one column's worth of d_hat inside C_i, F_i a small
    # piece of E_i minus its own h_hat-image, doubling in measure with i
    def cyl(idx):
        pos = index_position(idx, m1, p)
        return IntervalSet.interval(pos, pos + Fraction(1, pm1))

    by_col = [[] for _ in range(k)]
    for u in d_hat_indices:
        by_col[col_of[u % pm0]].append(u)
    e_sets, e_indices, h_hats = [], [], []
    for ci in range(k):
        cands = by_col[ci]
        if not cands:
            raise MasterTowerError(f"no d_hat mass inside input column {ci}")
        if grid_aligned_f:
            # all candidates sharing the most common gap, as one multi-cylinder E_i
            counts = {}
            for u in cands:
                counts[gap_at[u]] = counts.get(gap_at[u], 0) + 1
            best_gap = min(g for g, c in counts.items() if c == max(counts.values()))
            chosen = [u for u in cands if gap_at[u] == best_gap]
            e_sets.append(from_index_list(chosen, m1, p))
            e_indices.append(chosen)
            h_hats.append(best_gap)
        else:
            u = min(cands, key=lambda v: rev_index(v, m1, p))  # leftmost base position
            e_sets.append(cyl(u))
            e_indices.append([u])
            h_hats.append(gap_at[u])

    eps0 = min(
        e.subtract(sys.image(e, hh)).measure() for e, hh in zip(e_sets, h_hats)
    )
    if eps0 <= 0:
        raise MasterTowerError("degenerate thinning sets")

    f_sets = []
    taken_images = IntervalSet.empty()
    for i in range(k):
        cand = e_sets[i].subtract(sys.image(e_sets[i], h_hats[i])).subtract(taken_images)
        if grid_aligned_f:
            want = 2**i  # cylinder counts double; measures then satisfy the chain exactly
            cells = []
            for lo, hi in cand.intervals:
                u0, u1 = int(lo * pm1), int(hi * pm1)
                cells.extend(range(u0, min(u1, u0 + want - len(cells))))
                if len(cells) >= want:
                    break
            if len(cells) < want or want * Fraction(1, pm1) >= eps0 / 2 ** (k - i + 1):
                raise MasterTowerError("grid-aligned thinning infeasible at this depth")
            f = IntervalSet(
                [(Fraction(u, pm1), Fraction(u + 1, pm1)) for u in cells]
            )
        else:
            target = eps0 / 2 ** (k - i + 2)  # half of the proof's strict bound
            if cand.measure() <= target:
                raise MasterTowerError("thinning candidate too small")
            f = cand.leftmost_subset(target)
        f_sets.append(f)
        taken_images = taken_images.union(sys.image(f, h_hats[i]))
    for i in range(k - 1):
        assert 2 * f_sets[i].measure() <= f_sets[i + 1].measure()

    removed = IntervalSet.empty()
    added = IntervalSet.empty()
    g_sets = []
    for i in range(k):
        removed = removed.union(f_sets[i])
        g = sys.image(f_sets[i], hs_in[i])
        g_sets.append(g)
        added = added.union(g)
    D = d_hat.subtract(removed).union(added)
    if not D.issubset(C):
        raise MasterTowerError("output base escaped the input base")

    tower = _build_output_tower(
        sys, D, d_hat_indices, gap_at, succ_at, e_indices, f_sets, g_sets, h_hats, hs_in, m1, p
    )
    out_heights = heights(tower)
    if math.gcd(*out_heights) != 1:
        raise MasterTowerError("output heights not relatively prime")
    if not all(n <= h <= n + 6 * N for h in out_heights):
        raise MasterTowerError("output return times escaped [n, n+6N]")
    for i in range(k):
        if h_hats[i] not in out_heights or h_hats[i] - hs_in[i] not in out_heights:
            raise MasterTowerError("expected heights missing from the output tower")

    b_sets = tuple(cyl((t_b + q) % pm1) for q in n_positions)
    trace = KrPrimeTrace(
        input_tower=t,
        n=n,
        b_sets=b_sets,
        n_positions=tuple(n_positions),
        d_hat=d_hat,
        e_sets=tuple(e_sets),
        f_sets=tuple(f_sets),
        eps0=eps0,
        h_hats=tuple(h_hats),
        output_base=D,
        block_window=wlen,
        master_depth=m1,
    )
    return tower, trace


def _build_output_tower(sys, D, d_idx, gap_at, succ_at, e_indices, f_sets, g_sets, h_hats, hs_in, m1, p):
    """Exact return-time decomposition of the thinned base, without a global sweep.

    Return times change only along orbits that enter a removed piece F_i or
    start on an added piece T^(h_i) F_i; everything else keeps its gap.
    """
    pm1 = p**m1
    e_index_of = {}
    for i, idxs in enumerate(e_indices):
        for u in idxs:
            e_index_of[u] = i

    def cyl(idx):
        pos = index_position(idx, m1, p)
        return IntervalSet.interval(pos, pos + Fraction(1, pm1))

    plain = {}  # return time -> list of whole-cylinder indices
    pieces = []  # (IntervalSet, return time) for the handful of split orbits

    for u in d_idx:
        g = gap_at[u]
        stay = cyl(u)
        i = e_index_of.get(u)
        if i is not None:
            stay = stay.subtract(f_sets[i])
        v = succ_at[u]
        j = e_index_of.get(v)
        routed = False
        if j is not None and f_sets[j].intersect(cyl(v)):
            landing = sys.image(stay, g)
            hit = landing.intersect(f_sets[j])
            if hit:
                pieces.append((sys.image(hit, -g), g + hs_in[j]))
                clean = stay.subtract(sys.image(hit, -g))
                if clean:
                    pieces.append((clean, g))
                routed = True
        if not routed:
            if i is None:
                plain.setdefault(g, []).append(u)
            elif stay:
                pieces.append((stay, g))

    for i, gset in enumerate(g_sets):
        r0 = h_hats[i] - hs_in[i]
        # each E_i cylinder has its own successor; route per cylinder
        for u in e_indices[i]:
            part = gset.intersect(cyl((u + hs_in[i]) % pm1))
            if not part:
                continue
            vv = succ_at[u]
            j = e_index_of.get(vv)
            if j is not None:
                landing = sys.image(part, r0)
                hit = landing.intersect(f_sets[j])
                if hit:
                    pieces.append((sys.image(hit, -r0), r0 + hs_in[j]))
                    part = part.subtract(sys.image(hit, -r0))
            if part:
                pieces.append((part, r0))

    grouped = {}
    for r, idxs in plain.items():
        grouped[r] = from_index_list(idxs, m1, p)
    for s, r in pieces:
        grouped[r] = grouped.get(r, IntervalSet.empty()).union(s)

    total = sum((r * s.measure() for r, s in grouped.items()), Fraction(0))
    if total != 1:
        raise MasterTowerError("return-time decomposition does not sweep the space")
    return Tower([Column(grouped[r], r) for r in sorted(grouped)])
