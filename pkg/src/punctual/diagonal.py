"""Adversary constructions on Baire space and the unit interval.

Dense open sets that defeat a finite fixture of delayed functions, a
bounded-escape variant, a generic-path solver whose output is constant on
logged index blocks, domination escapes against budgeted operators, and a
steep piecewise-linear function whose uniform-continuity moduli are forced
to dominate a given delayed function.
"""

from __future__ import annotations

import bisect
import math
from fractions import Fraction

from .core import Done, FuelMeter, PunctualStream, StepOracle, UniversalTable
from .errors import (
    AuditFailure,
    DensityTimeout,
    HorizonExceeded,
    PreconditionFailed,
    PromiseViolation,
)

# ---------------------------------------------------------------------------
# basic balls

# A ball is a finite tuple sigma of naturals, standing for the set of all
# functions extending sigma.  A stream stage emits one ball or None (skip).


def _unpair(c):
    """Inverse Cantor pairing: c -> (a, b)."""
    s = (math.isqrt(8 * c + 1) - 1) // 2
    b = c - s * (s + 1) // 2
    return s - b, b


def compatible(a, b):
    """Two strings are compatible iff one is a prefix of the other."""
    k = min(len(a), len(b))
    return tuple(a[:k]) == tuple(b[:k])


class OpenSetStream(PunctualStream):
    """Stage-enumerated open set: one basic ball (or None) per stage."""

    def listed_balls(self, horizon):
        """All (stage, ball) pairs with a non-skip emission, replayed fresh."""
        return [(t, b) for t, (b, _) in enumerate(self.run(horizon)) if b is not None]

    def audit_excludes(self, values, horizon):
        """Check that no listed ball can contain a point starting with `values`.

        Every ball must differ from `values` inside the overlap; a ball
        that merely outruns the supplied prefix does not count as excluded.
        Returns the first offending (stage, ball) or None.
        """
        values = tuple(values)
        for t, ball in self.listed_balls(horizon):
            k = min(len(ball), len(values))
            if tuple(ball[:k]) == values[:k]:
                return (t, ball)
        return None

    def extension_stage(self, sigma, horizon):
        """Least stage listing a ball compatible with sigma; None if absent."""
        sigma = tuple(sigma)
        for t, ball in self.listed_balls(horizon):
            if compatible(sigma, ball):
                return t
        return None


def full_space_stream(budget=None):
    """Dense open set covering everything: lists every length-1 ball."""

    def make_step():
        def step(t, meter):
            meter.spend(1)
            return (t,)

        return step

    return OpenSetStream(make_step, budget, "full-space")


def density_certificate(stream, max_len, alphabet, horizon):
    """First extension stage for every probe string, with per-length bounds.

    Probes all strings of length <= max_len over values < alphabet.  Returns
    (stages, bounds) where stages maps each probe to the least stage at which
    a compatible ball is listed, and bounds[L] is a stage bound valid for all
    probes of length <= L (running maximum, hence monotone).  Raises
    DensityTimeout naming the first unserved probe if the horizon runs out.
    """
    pending = {()}
    for L in range(1, max_len + 1):
        pending.update(
            base + (v,)
            for base in list(pending)
            if len(base) == L - 1
            for v in range(alphabet)
        )
    stages = {}
    step = stream._make_step()
    for t in range(horizon):
        meter = FuelMeter(stream.budget(t), t, stream.description)
        ball = step(t, meter)
        if ball is None:
            continue
        served = [s for s in pending if compatible(s, ball)]
        for s in served:
            stages[s] = t
            pending.discard(s)
        if not pending:
            break
    if pending:
        probe = min(pending, key=lambda s: (len(s), s))
        raise DensityTimeout(stream.description, probe)
    bounds, worst = [], 0
    for L in range(max_len + 1):
        worst = max([worst] + [t for s, t in stages.items() if len(s) == L])
        bounds.append(worst)
    return stages, bounds


# ---------------------------------------------------------------------------
# adversaries against a finite fixture


def baire_adversary(U: UniversalTable, budget=None):
    """Paired dense open sets defeating every entry of the fixture.

    Returns 2E streams.  While entry e is silent at 0, stream 2e lists the
    refinement ladder below (0,) and stream 2e+1 the ladder below (1,).
    Once f_e(0) = m0 shows up, the side whose ladder cannot contain f_e
    (2e if m0 != 0, else 2e+1) carves out the complement of the single
    point f_e, and the other side lists the whole space.
    """

    def make(e, parity):
        def make_step():
            state = {"known": [], "ladder": 0, "space": 0, "diag": 0, "fams": {}}

            def step(t, meter):
                known = state["known"]
                v = U.probe(e, len(known), t, meter)
                if v is not None:
                    known.append(v)
                meter.spend(1)
                if not known:
                    c = state["ladder"]
                    state["ladder"] = c + 1
                    return (parity, c)
                diag_side = 0 if known[0] != 0 else 1
                if parity != diag_side:
                    c = state["space"]
                    state["space"] = c + 1
                    return (c,)
                # carve the complement of f_e: for each already revealed
                # position, list the siblings of the revealed value; pair
                # scheduling folded into the revealed range serves every
                # position infinitely often even while the prefix grows
                fam, _ = _unpair(state["diag"])
                state["diag"] += 1
                fam %= len(known)
                idx = state["fams"].get(fam, 0)
                state["fams"][fam] = idx + 1
                meter.spend(1)
                k = idx if idx < known[fam] else idx + 1
                return tuple(known[:fam]) + (k,)

            return step

        return OpenSetStream(make_step, budget, "baire-adversary[%d,%d]" % (e, parity))

    return [make(e, parity) for e in range(len(U)) for parity in (0, 1)]


def bounded_tuple_at(n, idx):
    """idx-th tuple of omega^n, ordered by max entry then lexicographically."""
    if n == 0:
        if idx != 0:
            raise PreconditionFailed("omega^0 has a single tuple")
        return ()
    B = 1
    while B**n - (B - 1) ** n <= idx:
        idx -= B**n - (B - 1) ** n
        B += 1
    # idx-th tuple over [0,B) containing at least one entry equal to B-1
    out = []
    need = True
    for pos in range(n):
        rest = n - pos - 1
        for d in range(B):
            if need and d < B - 1:
                block = B**rest - (B - 1) ** rest
            else:
                block = B**rest
            if idx < block:
                out.append(d)
                need = need and d < B - 1
                break
            idx -= block
    return tuple(out)


def baire_bounded_adversary(U: UniversalTable, k_count=4, budget=None):
    """Dense open sets avoiding every point bounded by a fixture entry.

    Returns {(n, k): stream}.  Stream (n, k) starts by listing the ball (k,).
    If f_n(0) turns out to be >= k it lists the whole space; otherwise it
    enumerates every ball whose last coordinate overshoots the revealed
    bound, which in the limit is exactly the set of points escaping f_n.
    """

    def make(n, k):
        def make_step():
            state = {"known": [], "space": 0, "diag": 0, "fams": {}}

            def step(t, meter):
                known = state["known"]
                v = U.probe(n, len(known), t, meter)
                if v is not None:
                    known.append(v)
                meter.spend(1)
                if t == 0:
                    return (k,)
                if not known:
                    return None
                if known[0] >= k:
                    c = state["space"]
                    state["space"] = c + 1
                    return (c,)
                # each revealed prefix length L is a family listing all
                # balls whose coordinate L overshoots the bound there
                L, _ = _unpair(state["diag"])
                state["diag"] += 1
                L %= len(known)
                idx = state["fams"].get(L, 0)
                state["fams"][L] = idx + 1
                tup = bounded_tuple_at(L + 1, idx)
                meter.spend(len(tup) + 1)
                return tup[:L] + (known[L] + 1 + tup[L],)

            return step

        return OpenSetStream(make_step, budget, "bounded-adversary[%d,%d]" % (n, k))

    return {(n, k): make(n, k) for n in range(len(U)) for k in range(k_count)}


# ---------------------------------------------------------------------------
# generic-path solver


class DelaySchedule:
    """Strictly increasing stage marks; block i is [l(i), l(i+1)-1]."""

    def __init__(self, fn, description=""):
        self._fn = fn
        self.description = description

    def __call__(self, i):
        v = self._fn(i)
        if i > 0 and self._fn(i - 1) >= v:
            raise PreconditionFailed("schedule not strictly increasing at %d" % i)
        return v

    @classmethod
    def geometric(cls, base=2):
        return cls(lambda i: base**i, "geometric:%d" % base)

    @classmethod
    def from_list(cls, marks):
        marks = list(marks)
        return cls(lambda i: marks[i], "list")


class BctSolution:
    """Finite path prefix meeting every supplied open set.

    values: the committed prefix (filler-extended beyond its length).
    blocks: (block index, start, end) triples; the path is constant on each
    logged [start, end] by construction, and tests rescan it.
    balls: (requirement, stage, ball) adoption records.
    escapes: (requirement, n, i, value) domination-escape records.
    """

    def __init__(self, values, filler, blocks, balls, escapes):
        self.values = list(values)
        self.filler = filler
        self.blocks = blocks
        self.balls = balls
        self.escapes = escapes

    def at(self, i):
        return self.values[i] if i < len(self.values) else self.filler

    def stream(self, budget=None):
        return PunctualStream.from_emit(self.at, budget, "bct-solution")


def bct_solve(opens, schedule: DelaySchedule, escapes=None, horizon=10**5, filler=0, blocks=10):
    """Build a path entering a listed ball of every open set.

    Scans each set's emissions in stage order for the first ball compatible
    with the committed prefix and splices it in; the prefix is frozen while
    a decision is pending, so corrections can be delayed indefinitely.  With
    escapes, each (P, g) pair is then met by appending the constant run from
    dominate_escape.  Finally the path is filled out through `blocks` whole
    schedule blocks past the last splice; every schedule block lying inside
    a constant run (escape runs and the filler tail) is logged, and the
    result is constant on each logged block.  Raises DensityTimeout(n) if
    some set never offers a compatible ball within the horizon.
    """
    h = []
    balls, escape_log, runs = [], [], []

    for n, V in enumerate(opens):
        step = V._make_step()
        found = None
        for t in range(horizon):
            meter = FuelMeter(V.budget(t), t, V.description)
            ball = step(t, meter)
            if ball is not None and compatible(ball, h):
                found = (t, tuple(ball))
                break
        if found is None:
            raise DensityTimeout(n, tuple(h))
        t, ball = found
        if len(ball) > len(h):
            h.extend(ball[len(h):])
        balls.append((n, t, ball))

    for j, (P, g) in enumerate(escapes or []):
        m = h[-1] if h else filler
        n_copies, i, val = dominate_escape(P, g, h, m, horizon=horizon)
        runs.append((len(h), len(h) + n_copies))
        h.extend([m] * n_copies)
        escape_log.append((j, n_copies, i, val))

    tail = len(h)
    i = 0
    while schedule(i) < len(h):
        i += 1
    target = schedule(i + blocks) if blocks > 0 else len(h)
    h.extend([h[-1] if h else filler] * (target - len(h)))
    runs.append((tail, len(h)))

    logged = []
    i = 0
    while schedule(i + 1) - 1 < len(h):
        start, end = schedule(i), schedule(i + 1) - 1
        if any(a <= start and end < b for a, b in runs):
            logged.append((i, start, end))
        i += 1

    return BctSolution(h, filler, logged, balls, escape_log)


def dominate_escape(P, g: StepOracle, sigma, m, horizon=512):
    """Extension of sigma by copies of m on which P disagrees with g.

    P is a callable P(oracle, i) -> value or None, where oracle(j) yields
    the j-th cell of the queried point; queries are tracked so the returned
    copy count covers the computation's use.  Returns (n, i, value) with
    P evaluated on sigma + m^n at input i giving value != g(i).
    """
    sigma = tuple(sigma)
    for i in range(horizon):
        target = g.value_at(i, horizon)
        if target is None:
            continue
        use = [-1]

        def oracle(j):
            use[0] = max(use[0], j)
            return sigma[j] if j < len(sigma) else m

        val = P(oracle, i)
        if val is not None and val != target:
            return (max(0, use[0] + 1 - len(sigma)), i, val)
    raise PromiseViolation("operator agrees with the oracle on every checked input")


# ---------------------------------------------------------------------------
# steep function against uniform-continuity moduli

# Grid points are dyadics k/2^level; the accumulation point xi = sqrt(2)/2 is
# handled exactly through the equivalence  j/2^L < xi  <=>  2*j^2 < 4^L.


def _below_xi(r):
    """r < sqrt(2)/2, decided exactly on rationals."""
    return 2 * r.numerator**2 < r.denominator**2


def _left_frontier(level):
    """Largest j with j/2^level < xi."""
    four = 4**level
    j = math.isqrt(four // 2)
    while 2 * j * j >= four:
        j -= 1
    while 2 * (j + 1) ** 2 < four:
        j += 1
    return j


class BreakpointRow:
    """One forced-modulus row: z < x < xi < y < w with a fixed value gap."""

    __slots__ = ("index", "z", "x", "y", "w", "gap", "width", "stage", "level")

    def __init__(self, index, z, x, y, w, gap, width, stage, level):
        self.index = index
        self.z = z
        self.x = x
        self.y = y
        self.w = w
        self.gap = gap
        self.width = width
        self.stage = stage
        self.level = level

    def __repr__(self):
        return "BreakpointRow(i=%d, width=%s, gap=%s)" % (self.index, self.width, self.gap)


class BreakpointTable:
    def __init__(self, rows):
        self.rows = list(rows)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def row(self, i):
        for r in self.rows:
            if r.index == i:
                return r
        raise PreconditionFailed("no row with index %d" % i)


class SteepFunction:
    """Piecewise-linear function on [0,1], sup 2 at xi, with local precision shifts.

    value(r) is exact on the resolved region (everything except the open
    window between the two frontiers straddling xi).  delta(r, n) = n + shift
    where the shift was fixed when r's grid point was first considered.
    """

    def __init__(self, anchors_left, anchors_right, passes, frontier_left, frontier_right):
        self.anchors_left = anchors_left
        self.anchors_right = anchors_right
        self._passes = passes  # (level, fl, fr, shift_settled, shift_fresh)
        self.frontier_left = frontier_left
        self.frontier_right = frontier_right
        self.sup = Fraction(2)

    def defined(self, r):
        return not (self.frontier_left < r < self.frontier_right)

    def value(self, r):
        r = Fraction(r)
        if not (0 <= r <= 1):
            raise PreconditionFailed("argument outside [0,1]")
        if not self.defined(r):
            raise HorizonExceeded("point %s still unresolved near the peak" % r)
        anchors = self.anchors_left if r <= self.frontier_left else self.anchors_right
        lo, hi = 0, len(anchors) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if anchors[mid][0] <= r:
                lo = mid
            else:
                hi = mid
        (p0, v0), (p1, v1) = anchors[lo], anchors[hi]
        if r == p0:
            return v0
        if r == p1:
            return v1
        return v0 + (v1 - v0) * (r - p0) / (p1 - p0)

    def shift(self, r):
        r = Fraction(r)
        if r == 0 or r == 1:
            return 2
        den = r.denominator
        if den & (den - 1):
            raise PreconditionFailed("%s is not a dyadic grid point" % r)
        lvl = den.bit_length() - 1
        for level, fl, fr, settled, fresh in self._passes:
            if level >= lvl:
                return fresh if fl < r < fr else settled
        raise HorizonExceeded("grid level %d never reached" % lvl)

    def delta(self, r, n):
        return n + self.shift(r)

    def check_delta_consistency(self, grid_log2, n_max=8):
        """Exhaustive check on the dyadic grid of the stated denominator.

        For every resolved grid point r and precision n, every resolved grid
        point strictly within 2^-delta(r,n) must have value within 2^-n.
        Returns (True, None) or (False, (r, r_hat, n)).
        """
        N = 2**grid_log2
        pts = [Fraction(j, N) for j in range(N + 1)]
        defined = [p for p in pts if self.defined(p)]
        vals = [self.value(p) for p in defined]
        # sparse tables for range max/min so each (r, n) check is O(log)
        K = max(1, len(defined)).bit_length()
        mx = [vals]
        mn = [vals]
        for k in range(1, K):
            half = 1 << (k - 1)
            prev_mx, prev_mn = mx[-1], mn[-1]
            mx.append([max(prev_mx[i], prev_mx[i + half])
                       for i in range(len(defined) - (1 << k) + 1)])
            mn.append([min(prev_mn[i], prev_mn[i + half])
                       for i in range(len(defined) - (1 << k) + 1)])

        def span(lo, hi):  # inclusive index range
            k = (hi - lo + 1).bit_length() - 1
            return (max(mx[k][lo], mx[k][hi - (1 << k) + 1]),
                    min(mn[k][lo], mn[k][hi - (1 << k) + 1]))

        for i, r in enumerate(defined):
            for n in range(n_max + 1):
                rad = Fraction(1, 2 ** self.delta(r, n))
                lo = bisect.bisect_right(defined, r - rad)
                hi = bisect.bisect_left(defined, r + rad) - 1
                if hi < lo:
                    continue
                top, bot = span(lo, hi)
                bound = Fraction(1, 2**n)
                if top - vals[i] >= bound or vals[i] - bot >= bound:
                    for q in range(lo, hi + 1):
                        if q != i and abs(vals[q] - vals[i]) >= bound:
                            return False, (r, defined[q], n)
        return True, None


def uc_adversary(g: StepOracle, max_index=10, max_stages=10**5):
    """Steep function whose uniform-continuity moduli dominate g.

    Builds the function stage by stage while following g.  Waiting stages
    refine the grid and extend the current plateau flat toward xi on both
    sides; when g(i) converges, the two grid points nearest xi on each side
    of a grid finer than 2^-g(i) become a jump pair with value gap 2^(1-i),
    recorded as breakpoint row i.  Rows run for i = 1 .. max_index, so the
    plateau values sum to at most 2 and the peak at xi is exactly 2.

    Precision shifts carry a geometric floor of twice the defining grid
    level, which keeps every point's stated neighbourhood clear of later
    jumps (the next jump lands within one old grid cell of xi, while xi
    stays a quadratically bounded distance away from old grid points).
    """
    i_cur, level, t_cur = 1, 2, 0
    v = Fraction(0)
    # stage 0 lays the endpoints and the level-1 grid flat at 0
    fl = Fraction(_left_frontier(1), 2)
    fr = Fraction(_left_frontier(1) + 1, 2)
    fl_shift = 4
    fr_shift = 4 if fr != 1 else 2
    anchors_left = [(Fraction(0), Fraction(0))]
    anchors_right = [(Fraction(1), Fraction(0))]
    passes = [(0, Fraction(0), Fraction(1), 2, 2), (1, Fraction(0), Fraction(1), 4, 4)]
    last_x, last_y = Fraction(0), Fraction(1)
    rows = []

    def refresh_frontiers(lvl):
        j = _left_frontier(lvl)
        return Fraction(j, 2**lvl), Fraction(j + 1, 2**lvl)

    for stage in range(1, max_stages + 1):
        if i_cur > max_index:
            break
        got = g.eval(i_cur, stage)
        if not isinstance(got, Done):
            # waiting: refine, keep the plateau flat out to the new frontier
            s = max(t_cur, 2 * level + 2)
            passes.append((level, fl, fr, s, s))
            nfl, nfr = refresh_frontiers(level)
            if nfl != fl:
                fl, fl_shift = nfl, s
            if nfr != fr:
                fr, fr_shift = nfr, s
            level += 1
            continue
        G = got.value
        i = i_cur
        # pick the grid: finer than both the current level and 2^-G, with a
        # fresh point on each side of xi; where the old frontier's promised
        # neighbourhood is too wide to sit next to the jump, demand a second
        # fresh point so the jump pair is anchored on this row's own grid
        m = max(level, G)
        while True:
            m += 1
            width = Fraction(1, 2**m)
            if not (_below_xi(fl + width) and not _below_xi(fr - width)):
                continue
            left_ok = m <= fl_shift + i - 1 or _below_xi(fl + 2 * width)
            right_ok = m <= fr_shift + i - 1 or not _below_xi(fr - 2 * width)
            if left_ok and right_ok:
                break
        t_next = max(t_cur, G + 2)
        gap = Fraction(1, 2 ** (i - 1))
        fl_new, fr_new = refresh_frontiers(m)
        if m <= fl_shift + i - 1:
            z, x = fl, fl + width
        else:
            z, x = fl_new - width, fl_new
        if m <= fr_shift + i - 1:
            w, y = fr, fr - width
        else:
            w, y = fr_new + width, fr_new
        v_new = v + gap
        if anchors_left[-1][0] != z:
            anchors_left.append((z, v))
        anchors_left.append((x, v_new))
        if anchors_right[-1][0] != w:
            anchors_right.append((w, v))
        anchors_right.append((y, v_new))
        s = max(t_next, 2 * m + 2)
        passes.append((m, fl, fr, max(t_cur, 2 * m + 2), s))
        fl, fl_shift = fl_new, s
        fr, fr_shift = fr_new, s
        # the reported pair takes the widest plateau point at the target
        # distance, so a candidate modulus is refuted exactly when it lets
        # pairs closer than 2^-(g+2)-ish through; the steep cell itself may
        # sit on a finer grid when xi crowds the frontier
        wt = Fraction(1, 2 ** (G + 1))
        z_tab = x - wt if x - wt >= last_x else z
        w_tab = y + wt if y + wt <= last_y else w
        rows.append(BreakpointRow(i, z_tab, x, y, w_tab, gap, x - z_tab, stage, m))
        last_x, last_y = x, y
        v = v_new
        i_cur, level, t_cur = i + 1, m + 1, t_next

    if i_cur <= max_index:
        raise HorizonExceeded("only %d of %d rows built" % (len(rows), max_index))

    anchors_left.append((fl, v))
    anchors_right.append((fr, v))
    anchors_right.reverse()
    fn = SteepFunction(anchors_left, anchors_right, passes, fl, fr)
    return fn, BreakpointTable(rows)


def modulus_check(fn: SteepFunction, table: BreakpointTable, m, max_index=None):
    """Accept a candidate modulus iff no breakpoint row refutes it.

    Row i refutes m when its jump pair lies strictly within 2^-m(i): the
    pair's value gap is 2^(1-i) >= 2^-i, so such an m is not a modulus.
    Any accepted m therefore satisfies m(i) > g(i) wherever row i exists.
    Returns (True, None) or (False, row).
    """
    for row in table:
        if max_index is not None and row.index > max_index:
            continue
        if row.width < Fraction(1, 2 ** m(row.index)):
            gap = abs(fn.value(row.x) - fn.value(row.z))
            if gap < Fraction(1, 2**row.index):
                raise AuditFailure("table row %d does not match the function" % row.index)
            return False, row
    return True, None
