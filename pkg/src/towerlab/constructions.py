"""Finite-depth partition-adjustment pipelines and their exact certificates.

Two painting pipelines produce the toolkit's headline objects:

* :func:`wm_dense_min_adjust` paints universal words onto small tall
  columns so that every pair of positive cylinders mixes (positive
  product-measure witnesses) while visits to every cylinder recur along
  in-column arithmetic families (piecewise-syndetic evidence), keeping
  the partition within eps of the input.

* :func:`wm_proximal_prep_adjust` (engine in :mod:`towerlab._proximal`)
  runs the stamp construction: paired cylinder occurrences at one exact
  common distance for mixing, plus periodic symbol-2 stamps making
  symbol-2 visits thickly syndetic along every column name.

Both return traces whose every claim is an exact rational recomputed from
the finished partitions, never read back from intermediate bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .detectors import WindowSet, piecewise_syndetic_witness
from .errors import HeightBudgetExceeded, PreconditionError, ScheduleError
from .exact_sets import IntervalSet, format_rational
from .odometer import OdometerSystem
from .partitions import Partition, join, partition_metric, refines, span, transfer_refinement
from .symbolic import SymbolicApprox, Word, copy_name_on_column, universal_word, word_to_str
from .towers import Tower, kakutani_tower

__all__ = [
    "DenseMinStep",
    "DenseMinTrace",
    "wm_dense_min_adjust",
    "dense_min_witnesses_positive",
    "ModelSequenceTrace",
    "build_model_sequence",
    "gap_fill_word",
    "quotient_min_closure",
    "wm_proximal_prep_adjust",
    "ProximalSchedule",
    "ProximalTrace",
]


# ---------------------------------------------------------------------------
# gap filling by whole column names
# ---------------------------------------------------------------------------


def gap_fill_word(tower_names, hts, gap: int) -> Word:
    """A concatenation of full column names of total length exactly ``gap``.

    Heights must be relatively prime; reconstruction picks the tallest
    usable column first at every step, so the output is deterministic.
    Raises :class:`PreconditionError` when the gap is not representable.
    """
    hts = list(hts)
    if len(tower_names) != len(hts) or any(len(nm) != h for nm, h in zip(tower_names, hts)):
        raise PreconditionError("one name per height, with matching lengths")
    if math.gcd(*hts) != 1:
        raise PreconditionError("heights must be relatively prime")
    if gap < 0:
        raise PreconditionError("gap must be nonnegative")
    reach = [False] * (gap + 1)
    reach[0] = True
    for x in range(1, gap + 1):
        reach[x] = any(x >= h and reach[x - h] for h in hts)
    if not reach[gap]:
        raise PreconditionError(f"gap {gap} not representable by heights {sorted(set(hts))}")
    order = sorted(range(len(hts)), key=lambda i: -hts[i])
    out, left = [], gap
    while left:
        i = next(i for i in order if left >= hts[i] and reach[left - hts[i]])
        out.extend(tower_names[i])
        left -= hts[i]
    return tuple(out)


# ---------------------------------------------------------------------------
# column acquisition from a growing multi-height tower
# ---------------------------------------------------------------------------


def _grow_tower(sys, C, budget, cap=1 << 15):
    while True:
        try:
            return kakutani_tower(sys, C, budget)
        except HeightBudgetExceeded:
            if budget >= cap:
                raise
            budget = min(cap, budget * 2)


def _try_plan(tower: Tower, groups):
    """Greedy pick per group: smallest carriers first, distinct heights overall.

    ``groups`` is a list of (count, min_height, carrier_bound); returns the
    per-group column lists (heights ascending) or None.
    """
    cols = sorted(
        tower.columns,
        key=lambda c: (c.height * c.base.measure(), c.base.intervals[0][0], c.height),
    )
    used = set()
    plan = []
    for count, min_h, bound in groups:
        picks, total = [], Fraction(0)
        for c in cols:
            if c.height in used or any(c.height == q.height for q in picks) or c.height <= min_h:
                continue
            picks.append(c)
            total += c.height * c.base.measure()
            if len(picks) == count:
                break
        if len(picks) < count or total >= bound:
            return None
        used.update(c.height for c in picks)
        plan.append(sorted(picks, key=lambda c: c.height))
    return plan


def _acquire_columns(sys, base, groups, max_rounds=240):
    """Shave the tower until the plan of ``groups`` is satisfiable; returns the plan.

    Each shave removes from the base a thin leftmost piece of the tallest
    column's top image, which strictly grows the set of heights.
    """
    C = base
    budget = 64
    for rounds in range(1, max_rounds + 1):
        tower = _grow_tower(sys, C, budget)
        plan = _try_plan(tower, groups)
        if plan is not None:
            return plan
        tallest = max(tower.columns, key=lambda c: c.height)
        bound = min(c.base.measure() for c in tower.columns) / 2 ** (rounds + 1)
        C = C.subtract(sys.image(tallest.base, tallest.height).leftmost_subset(bound))
        budget = max(budget, 2 * tallest.height + 2)
    raise ScheduleError("increase iterate budget: tower never grew enough tall light columns")


# ---------------------------------------------------------------------------
# weak mixing with dense minimal structure (universal-word painting)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DenseMinStep:
    """One painting round: chosen columns, painted names, and step certificates."""

    m: int
    columns: tuple  # m+1 columns, heights ascending
    names: tuple  # painted words, one per column
    drift: Fraction
    drift_bound: Fraction
    visit_positions: dict  # word -> in-column centered positions on the recurrence column
    psw_witnesses: dict  # word -> (a, b) detector interval
    pad_runs: tuple  # trailing all-1 run lengths: the non-syndetic growth evidence


@dataclass
class DenseMinTrace:
    base_p: int
    eps: Fraction
    depth: int
    alphabet: int
    partitions: list  # alpha_hat, alpha_1, ..., alpha_depth
    steps: list
    total_drift: Fraction = Fraction(0)
    witnesses: dict = field(default_factory=dict)  # m -> {(w1, w2): mu(cyl(w1 w2))}

    def to_json(self):
        return {
            "kind": "wm_dense_min_trace",
            "system": {"odometer": self.base_p},
            "eps": format_rational(self.eps),
            "depth": self.depth,
            "alphabet": self.alphabet,
            "partitions": [p.to_json() for p in self.partitions],
            "steps": [
                {
                    "m": s.m,
                    "columns": [c.to_json() for c in s.columns],
                    "names": [word_to_str(nm) for nm in s.names],
                    "drift": format_rational(s.drift),
                    "drift_bound": format_rational(s.drift_bound),
                    "visit_positions": {word_to_str(w): list(v) for w, v in sorted(s.visit_positions.items())},
                    "psw_witnesses": {word_to_str(w): list(v) for w, v in sorted(s.psw_witnesses.items())},
                    "pad_runs": list(s.pad_runs),
                }
                for s in self.steps
            ],
            "total_drift": format_rational(self.total_drift),
            "witnesses": {
                str(m): {
                    f"{word_to_str(w1)}|{word_to_str(w2)}": format_rational(q)
                    for (w1, w2), q in sorted(tbl.items())
                }
                for m, tbl in self.witnesses.items()
            },
        }


def _paint_universal_names(sys, part, picks, specs, word_cap):
    """Paint one step's names; specs[i] = (word_order, copies) for column i."""
    names = []
    for col, (order, copies) in zip(picks, specs):
        k = len(part.cells)
        w = universal_word(k, order, word_cap) * copies if copies else ()
        if len(w) > col.height:
            raise ScheduleError(f"column of height {col.height} cannot hold a length-{len(w)} name")
        name = w + (1,) * (col.height - len(w))
        part = copy_name_on_column(part, sys, col, name)
        names.append(name)
    return part, names


def wm_dense_min_adjust(
    sys: OdometerSystem,
    a_hat: Partition,
    eps,
    depth: int,
    *,
    base: IntervalSet | None = None,
    max_rounds: int = 240,
    word_cap: int = 2_000_000,
) -> DenseMinTrace:
    """Adjust ``a_hat`` within ``eps`` so the symbolic picture mixes with dense recurrence.

    Step m picks m+1 unused columns with distinct heights above 2 m^2 k^(2m)
    and total carrier below eps/2^m; the first m get m aligned copies of the
    universal words of odd orders 1, 3, ..., 2m-1 and the tallest gets the
    order-2m universal word.  Every certificate is exact: per-step drift,
    the centered visit families with their piecewise-syndetic witnesses,
    the growing all-1 padding runs, and (recomputed from the final
    partition) the cylinder-pair measures whose positivity is the mixing
    witness.  Depth 0 is the identity trace.
    """
    eps = Fraction(eps)
    k = len(a_hat.cells)
    if k < 2:
        raise PreconditionError("need at least 2 cells")
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    trace = DenseMinTrace(base_p=sys.base_p, eps=eps, depth=depth, alphabet=k, partitions=[a_hat], steps=[])
    if depth == 0:
        return trace

    if base is None:
        base = IntervalSet.interval(0, Fraction(1, sys.base_p))
    groups = [(m + 1, 2 * m * m * k ** (2 * m), eps / 2**m) for m in range(1, depth + 1)]
    plan = _acquire_columns(sys, base, groups, max_rounds)

    part = a_hat
    for m, picks in enumerate(plan, 1):
        prev = part
        specs = [(2 * i - 1, m) for i in range(1, m + 1)] + [(2 * m, 1)]
        part, names = _paint_universal_names(sys, part, picks, specs, word_cap)
        drift = partition_metric(prev, part)
        bound = eps / 2**m
        if drift >= bound:
            raise ScheduleError(f"step {m} drift {drift} not below eps/2^{m} = {bound}")

        # recurrence data on the column carrying m copies of the order-(2m-1) word
        block = 2 * m - 1
        L = block * k**block
        rec_name = names[m - 1]
        half = (block - 1) // 2
        visits, psw = {}, {}
        for r, w in enumerate(product(range(1, k + 1), repeat=block)):
            family = [c * L + r * block + half for c in range(m)]
            scan = tuple(
                pos
                for pos in range(half, len(rec_name) - half)
                if rec_name[pos - half : pos + half + 1] == w
            )
            if not set(family) <= set(scan):
                raise ScheduleError("painted visit family missing from the column name")
            visits[w] = scan
            wit = piecewise_syndetic_witness(WindowSet(len(rec_name), scan), g=L, r=(m - 1) * L + 1)
            if wit is None:
                raise ScheduleError("piecewise syndetic witness missing")
            psw[w] = wit
        pad_runs = tuple(col.height - len(_strip_pad(nm)) for col, nm in zip(picks, names))
        trace.steps.append(
            DenseMinStep(
                m=m,
                columns=tuple(picks),
                names=tuple(names),
                drift=drift,
                drift_bound=bound,
                visit_positions=visits,
                psw_witnesses=psw,
                pad_runs=pad_runs,
            )
        )
        trace.partitions.append(part)

    trace.total_drift = partition_metric(a_hat, part)
    if trace.total_drift >= eps:
        raise ScheduleError("telescoped drift escaped eps")
    # mixing witnesses, recomputed from the final partition alone
    final = part
    for m in range(1, depth + 1):
        sp = span(sys, final, 0, 2 * m - 1)
        table = {}
        for w1 in product(range(1, k + 1), repeat=m):
            for w2 in product(range(1, k + 1), repeat=m):
                idx = 0
                for a in w1 + w2:
                    idx = idx * k + (a - 1)
                table[(w1, w2)] = sp.cells[idx].measure()
        trace.witnesses[m] = table
    return trace


def _strip_pad(name):
    i = len(name)
    while i > 0 and name[i - 1] == 1:
        i -= 1
    return name[:i]


def dense_min_witnesses_positive(trace: DenseMinTrace) -> bool:
    """All 4-tuples of positive m-cylinders have positive product witnesses, every m <= depth.

    mu x mu((E1 x F1) and (T x T)^-m (E2 x F2)) factors as the product of
    the two pair measures, so positivity of every pair entry over positive
    words settles every 4-tuple.
    """
    for table in trace.witnesses.values():
        words = sorted({w for pair in table for w in pair})
        mass = {w: sum((table[(w, w2)] for w2 in words), Fraction(0)) for w in words}
        positive = [w for w in words if mass[w] > 0]
        for e1 in positive:
            for f1 in positive:
                for e2 in positive:
                    for f2 in positive:
                        if table[(e1, e2)] * table[(f1, f2)] <= 0:
                            return False
    return True


# ---------------------------------------------------------------------------
# triangular model-sequence array
# ---------------------------------------------------------------------------


@dataclass
class ModelSequenceTrace:
    base_p: int
    depth: int
    variant: str
    eps_seq: tuple
    betas_used: list  # after the join-replacement
    gamma: dict  # (k, n) -> Partition
    certificates: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "kind": "model_sequence_trace",
            "system": {"odometer": self.base_p},
            "depth": self.depth,
            "variant": self.variant,
            "eps_seq": [format_rational(e) for e in self.eps_seq],
            "betas_used": [b.to_json() for b in self.betas_used],
            "gamma": {f"{k},{n}": g.to_json() for (k, n), g in sorted(self.gamma.items())},
            "certificates": self.certificates,
        }


def _row_step_prop44(sys, beta_n, eps_n, n, alphabets, word_cap=2_000_000):
    """Row-n adjustment: per sub-alphabet k_j (j <= n) paint n+1 columns of universal words.

    Column i of the j-th family carries n-j aligned copies of the order
    (2i-1) universal word over k_j symbols and the (n+1)-th carries the
    order-2n word, padded with 1s; all n(n+1) columns are fresh and their
    total carrier stays below eps_n.
    """
    groups = [
        (n + 1, 2 * n * n * alphabets[j - 1] ** (2 * n), eps_n / n)
        for j in range(1, n + 1)
    ]
    base = IntervalSet.interval(0, Fraction(1, sys.base_p))
    plan = _acquire_columns(sys, base, groups)
    part = beta_n
    for j, picks in enumerate(plan, 1):
        k_j = alphabets[j - 1]
        names = []
        for i, col in enumerate(picks, 1):
            if i <= n:
                w = universal_word(k_j, 2 * i - 1, word_cap) * (n - j) if n > j else ()
            else:
                w = universal_word(k_j, 2 * n, word_cap)
            names.append(tuple(w) + (1,) * (col.height - len(w)))
            part = copy_name_on_column(part, sys, col, names[-1])
    drift = partition_metric(beta_n, part)
    if drift >= eps_n:
        raise ScheduleError(f"row {n} drift {drift} not below eps_{n} = {eps_n}")
    return part


def _row_step_prop52(sys, beta_n, eps_n, n):
    from ._proximal import wm_proximal_prep_adjust

    if n > 1:
        raise ScheduleError(
            "prop52 rows beyond depth 1 require towers far beyond desk scale; "
            "run the stamp pipeline directly for its single-row certificates"
        )
    tr = wm_proximal_prep_adjust(sys, beta_n, eps_n, depth=0)
    return tr.partitions[-1]


def build_model_sequence(sys, betas, eps_seq, depth: int, variant: str = "prop44") -> ModelSequenceTrace:
    """The triangular array of adjusted partitions with refinement transfers.

    Row n adjusts beta_n (replaced by its join with the previous diagonal
    entry, so rows refine upward) and the refinement is transferred down
    the column.  Exact checks recorded as certificates: the in-row
    refinement chain, the per-column drift below eps_n, and the final
    column-vs-beta drift below the eps tail sum.
    """
    if variant not in ("prop44", "prop52"):
        raise PreconditionError("variant must be prop44 or prop52")
    betas = list(betas)
    eps_seq = [Fraction(e) for e in eps_seq]
    if len(betas) < depth or len(eps_seq) < depth:
        raise PreconditionError("need one beta and one eps per level")
    trace = ModelSequenceTrace(
        base_p=sys.base_p, depth=depth, variant=variant, eps_seq=tuple(eps_seq[:depth]), betas_used=[], gamma={}
    )
    prev_diag = None
    alphabets = []
    for n in range(1, depth + 1):
        beta_n = betas[n - 1] if prev_diag is None else join(betas[n - 1], prev_diag)
        trace.betas_used.append(beta_n)
        alphabets.append(len(beta_n.cells))
        if variant == "prop44":
            diag = _row_step_prop44(sys, beta_n, eps_seq[n - 1], n, alphabets)
        else:
            diag = _row_step_prop52(sys, beta_n, eps_seq[n - 1], n)
        trace.gamma[(n, n)] = diag
        for k in range(n - 1, 0, -1):
            trace.gamma[(k, n)] = transfer_refinement(beta_n, diag, trace.gamma[(k, n - 1)])
        prev_diag = diag

    certs = {}
    for n in range(1, depth + 1):
        for k in range(1, n):
            if not refines(trace.gamma[(k + 1, n)], trace.gamma[(k, n)]):
                raise ScheduleError(f"refinement chain broken at gamma_{k}^{n}")
        certs[f"chain_row_{n}"] = True
        for k in range(1, n):
            d = partition_metric(trace.gamma[(k, n)], trace.gamma[(k, n - 1)])
            certs[f"cauchy_{k}_{n}"] = format_rational(d)
            if d >= eps_seq[n - 1]:
                raise ScheduleError(f"column drift d(gamma_{k}^{n}, gamma_{k}^{n - 1}) not below eps_{n}")
        certs[f"diag_drift_{n}"] = format_rational(partition_metric(trace.gamma[(n, n)], trace.betas_used[n - 1]))
    for k in range(1, depth + 1):
        d = partition_metric(trace.gamma[(k, depth)], trace.betas_used[k - 1])
        certs[f"beta_drift_{k}"] = format_rational(d)
        if d >= sum(eps_seq[k - 1 : depth], Fraction(0)):
            raise ScheduleError(f"d(gamma_{k}^{depth}, beta_{k}) escaped the eps tail sum")
    trace.certificates = certs
    return trace


# ---------------------------------------------------------------------------
# window quotient by a subword-closed word family
# ---------------------------------------------------------------------------


def quotient_min_closure(approx: SymbolicApprox, min_words) -> SymbolicApprox:
    """Collapse every word of ``min_words`` to the bottom symbol 0, transporting mass.

    ``min_words`` must be closed under subwords within the window.  Mass is
    conserved at every length exactly; off the collapsed class the measure
    is unchanged.  (The collapsed approximation may stop being
    extension-consistent at the class boundary; the leak vanishes exactly
    when the full-length collapsed mass is zero.)
    """
    min_words = {tuple(w) for w in min_words}
    for w in min_words:
        for i in range(len(w)):
            for j in range(i + 1, len(w) + 1):
                if w[i:j] not in min_words:
                    raise PreconditionError("min_words must be closed under subwords")
    rho = {}
    for w, q in approx.rho.items():
        key = (0,) * len(w) if w in min_words else w
        rho[key] = rho.get(key, Fraction(0)) + q
    out = SymbolicApprox(alphabet_size=approx.alphabet_size, window=approx.window, rho=rho)
    for length in range(1, approx.window + 1):
        before = sum((q for w, q in approx.rho.items() if len(w) == length), Fraction(0))
        after = sum((q for w, q in out.rho.items() if len(w) == length), Fraction(0))
        assert before == after  # additive transport cannot lose mass
    return out


from ._proximal import ProximalSchedule, ProximalTrace, wm_proximal_prep_adjust  # noqa: E402
