"""Padding transformers: oracle-given problem instances are converted into
punctual (step-budgeted) instances whose solutions decode back to solutions
of the original instance.  Also the binary-tree reductions between interval
covers, Delta01 instances, and paths, plus the rank-1 group coding.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

from .core import Done, PunctualStream, StepOracle, prime
from .errors import (
    InstanceInconsistent,
    PreconditionFailed,
    PromiseViolation,
    ZeroElement,
)

# ---------------------------------------------------------------------------
# bit-string helpers (strings of '0'/'1', length-lex enumerated)


def string_at(index):
    """index 0 -> "", then length-lex order over {0,1}."""
    return bin(index + 1)[3:]


def string_index(s):
    return int("1" + s, 2) - 1


def prefixes(s):
    return [s[:i] for i in range(len(s) + 1)]


# ---------------------------------------------------------------------------
# punctual binary trees


class PunctualTree:
    """Prefix-closed membership over bit-strings, decidable with bounded work.

    member_fn(sigma, meter) must inspect its instance only up to stage
    |sigma| and spend O(|sigma|) fuel.
    """

    def __init__(self, member_fn, description=""):
        self._member = member_fn
        self.description = description

    def member(self, sigma, meter=None):
        return self._member(sigma, meter)

    def extendible(self, sigma, depth):
        """True iff sigma has an extension of length `depth` in the tree."""
        if not self.member(sigma):
            return False
        if len(sigma) >= depth:
            return True
        return self.extendible(sigma + "0", depth) or self.extendible(sigma + "1", depth)

    def stream(self, budget=None):
        """Stage t decides membership of the t-th bit-string."""

        def make_step():
            def step(t, meter):
                s = string_at(t)
                return (s, self._member(s, meter))

            return step

        return PunctualStream(make_step, budget, "tree:" + self.description)


def tree_punctualize(T: StepOracle) -> PunctualTree:
    """Delay-robust tree: a string falls out once some prefix is confirmed
    out of the oracle tree by the time we reach the string's own length."""

    def member(sigma, meter=None):
        n = len(sigma)
        for tau in prefixes(sigma):
            r = T.probe(tau, n, meter)
            if r == Done(False) or r == Done(0):
                return False
        return True

    return PunctualTree(member, "punctualized(%s)" % T.description)


def pruned_path(member_fn, length, branching=2, search_bound=None):
    """Leftmost path of a pruned tree: P(n) = least i with P|n ^ i in the tree.

    member_fn takes a tuple of naturals.  For the binary case the bound is 2;
    the omega-branching case needs a caller-supplied search bound.
    """
    bound = branching if search_bound is None else search_bound
    path = []
    for n in range(length):
        for i in range(bound):
            if member_fn(tuple(path) + (i,)):
                path.append(i)
                break
        else:
            raise PromiseViolation("no child below bound %d at depth %d" % (bound, n))
    return path


# ---------------------------------------------------------------------------
# Cauchy sequences of strings


def cauchy_punctualize(rho: StepOracle) -> PunctualStream:
    """Total stream of strings sigma_n with |sigma_n| = n and the same limit
    as the oracle-given rho_n; waiting is padded by repetition."""

    def make_step():
        state = {"best": "", "next": 0}

        def step(t, meter):
            meter.spend(1)
            r = rho.probe(state["next"], t, meter)
            if isinstance(r, Done):
                state["best"] = r.value
                state["next"] += 1
            s = state["best"]
            if len(s) >= t:
                return s[:t]
            pad = s[-1] if s else "0"
            return s + pad * (t - len(s))

        return step

    return PunctualStream(make_step, None, "cauchy(%s)" % rho.description)


# ---------------------------------------------------------------------------
# Ramsey-type colorings


class ColoringInstance:
    """c: increasing n-tuples -> colors < k, revealed through a step oracle."""

    def __init__(self, arity, colors, oracle: StepOracle):
        if arity < 1 or colors < 2:
            raise PreconditionFailed("need arity >= 1 and colors >= 2")
        self.arity = arity
        self.colors = colors
        self.oracle = oracle


def increasing_tuples(top, n):
    """All increasing n-tuples over [0, top], colex order."""
    return sorted(itertools.combinations(range(top + 1), n), key=lambda t: t[::-1])


def tuple_at(index, n):
    """The index-th increasing n-tuple in colex order."""
    out = []
    for k in range(n, 0, -1):
        m = k - 1
        while comb(m + 1, k) <= index:
            m += 1
        out.append(m)
        index -= comb(m, k)
    return tuple(reversed(out))


class RamseyPunctualization:
    """p-values and the punctual coloring c_hat for one coloring instance.

    p is nondecreasing and advances to k+1 only after the oracle coloring
    has converged on every increasing tuple over [0, k+1]; on tuples whose
    p-values repeat, c_hat is 0, otherwise c_hat(x) = c(p(x_1)..p(x_n)).
    """

    def __init__(self, inst: ColoringInstance, horizon):
        self.inst = inst
        self.horizon = horizon
        self.p = [v for v, _ in self.p_stream().run(horizon, metered=False)]

    def p_stream(self, budget=None):
        n = self.inst.arity

        def make_step():
            state = {"p": 0, "pending": set(increasing_tuples(1, n))}

            def step(t, meter):
                if t == 0:
                    return 0
                still = set()
                for tup in state["pending"]:
                    if not isinstance(self.inst.oracle.probe(tup, t, meter), Done):
                        still.add(tup)
                if still:
                    state["pending"] = still
                else:
                    k = state["p"] + 1
                    state["p"] = k
                    state["pending"] = {
                        tup for tup in increasing_tuples(k + 1, n) if (k + 1) in tup
                    }
                return state["p"]

            return step

        return PunctualStream(make_step, budget, "ramsey-p")

    def c_hat(self, tup, meter=None):
        if any(x >= self.horizon for x in tup):
            raise PreconditionFailed("tuple beyond computed horizon")
        pv = tuple(self.p[x] for x in tup)
        if len(set(pv)) < len(pv):
            return 0
        r = self.inst.oracle.probe(pv, max(tup), meter)
        if not isinstance(r, Done):
            raise AssertionError("p advanced past an unconverged tuple")
        return r.value

    def c_hat_stream(self, budget=None):
        """Stage t emits c_hat of the t-th increasing tuple in colex order."""
        n = self.inst.arity

        def make_step():
            def step(t, meter):
                meter.spend(n)
                tup = tuple_at(t, n)
                if any(x >= self.horizon for x in tup):
                    return 0
                return self.c_hat(tup, meter)

            return step

        return PunctualStream(make_step, budget, "ramsey-chat")

    def decode(self, Y):
        """Map a c_hat-homogeneous set through p, removing duplicates."""
        return sorted(set(self.p[x] for x in Y))


def ramsey_punctualize(inst: ColoringInstance, horizon) -> RamseyPunctualization:
    return RamseyPunctualization(inst, horizon)


# ---------------------------------------------------------------------------
# cohesiveness instances


class CohPunctualization:
    def __init__(self, sigma_stream: PunctualStream, due):
        self.stream = sigma_stream
        self.due = due  # due[t] = index of the oracle string behind sigma_t

    def decode(self, G_hat):
        """Indices of the original sequence behind each chosen stage.
        Deliberately unbudgeted (oracle-grade)."""
        return [self.due[j] for j in G_hat]


def coh_punctualize(rho: StepOracle, horizon) -> CohPunctualization:
    """sigma_t in 2^t extends the latest computed rho_j; due(t) records j."""
    due = []

    def make_step():
        state = {"best": "", "due": 0, "next": 0}

        def step(t, meter):
            meter.spend(1)
            r = rho.probe(state["next"], t, meter)
            if isinstance(r, Done):
                state["best"] = r.value
                state["due"] = state["next"]
                state["next"] += 1
            s = state["best"]
            pad = s[-1] if s else "0"
            out = (s + pad * t)[:t]
            if len(due) == t:
                due.append(state["due"])
            return out

        return step

    s = PunctualStream(make_step, None, "coh(%s)" % rho.description)
    s.prefix(horizon)  # populate the due table once
    return CohPunctualization(s, due)


# ---------------------------------------------------------------------------
# continuous presentations for the intermediate-value transformer


class PiecewiseLinear:
    """Continuous piecewise-linear function on [0,1] as breakpoints."""

    def __init__(self, points):
        self.points = points  # sorted (x, y) Fractions spanning [0, 1]

    def __call__(self, x):
        pts = self.points
        if x <= pts[0][0]:
            return pts[0][1]
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        return pts[-1][1]

    def lipschitz(self):
        L = Fraction(0)
        for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]):
            if x1 != x0:
                L = max(L, abs((y1 - y0) / (x1 - x0)))
        return L


class ContFunPresentation:
    """A continuous function on [0,1] built from decided-midpoint hats.

    Each decision (mid, t, sign) contributes a capped distance hat of height
    2^(-t-2) on the discarded side; values(r, m) sums the hats decided by
    stage m, so the approximant sequence moves by less than 2^(-m-1) per
    index (fast-Cauchy) and every snapshot is 2-Lipschitz (delta(r,n)=n+2).
    """

    def __init__(self, decisions, description=""):
        self.decisions = list(decisions)  # (mid, stage, sign)
        self.delta_shift = 2
        self.description = description

    @staticmethod
    def _hat(r, mid, level, sign):
        if sign < 0:
            return -min(level, max(Fraction(0), mid + level - r))
        return min(level, max(Fraction(0), r - mid + level))

    def values(self, r, m):
        r = Fraction(r)
        neg = Fraction(0)
        pos = Fraction(0)
        for mid, t, sign in self.decisions:
            if t > m:
                continue
            level = Fraction(1, 2 ** (t + 2))
            h = self._hat(r, mid, level, sign)
            if sign < 0:
                neg = min(neg, h)
            else:
                pos = max(pos, h)
        return pos + neg

    def value(self, r):
        return self.values(r, self.decisions[-1][1] if self.decisions else 0)

    def delta(self, r, n):
        return n + self.delta_shift

    def check_delta_consistency(self, grid_log2):
        """Audit the modulus on the dyadic grid with denominator 2^grid_log2."""
        den = 2 ** grid_log2
        vals = [self.value(Fraction(k, den)) for k in range(den + 1)]
        for n in range(grid_log2 + 1):
            eps = Fraction(1, 2 ** self.delta(0, n))
            gap = Fraction(1, 2 ** n)
            for k in range(den + 1):
                j = k + 1
                while j <= den and Fraction(j - k, den) < eps:
                    if abs(vals[j] - vals[k]) >= gap:
                        return False, (Fraction(k, den), Fraction(j, den), n)
                    j += 1
        return True, None

    def check_fast_cauchy(self, grid_log2, horizon):
        """Audit |values(r,i) - values(r,i+1)| < 2^(-i-1) on the grid."""
        den = 2 ** grid_log2
        for k in range(den + 1):
            r = Fraction(k, den)
            prev = self.values(r, 0)
            for i in range(1, horizon):
                cur = self.values(r, i)
                if abs(cur - prev) >= Fraction(1, 2 ** i):
                    return False, (r, i - 1)
                prev = cur
        return True, None


class IvtPunctualization:
    def __init__(self, presentation, final_interval, decisions):
        self.presentation = presentation
        self.final_interval = final_interval  # sign change of X lies inside
        self.decisions = decisions  # (midpoint, stage, sign)

    def decode_zero(self):
        a, b = self.final_interval
        return (a + b) / 2

    def zero_band(self):
        """Interval containing every zero of the limit presentation."""
        a, b = self.final_interval
        pad = max(
            (Fraction(1, 2 ** (t + 2)) for _, t, _ in self.decisions), default=Fraction(0)
        )
        return a - pad, b + pad


def _ivt_check_endpoints(X: StepOracle):
    s0 = X.eval(Fraction(0), 0)
    s1 = X.eval(Fraction(1), 0)
    if not (isinstance(s0, Done) and s0.value < 0 and isinstance(s1, Done) and s1.value > 0):
        raise PreconditionFailed("need X(0) < 0 and X(1) > 0 decided at stage 0")


def ivt_punctualize(X: StepOracle, horizon) -> IvtPunctualization:
    """Bisection with padding: while the sign at the current midpoint is
    undecided the snapshot is unchanged; a decision at stage t adds a hat of
    height 2^(-t-2) covering the discarded half."""
    _ivt_check_endpoints(X)
    a, b = Fraction(0), Fraction(1)
    decisions = []
    for t in range(1, horizon):
        mid = (a + b) / 2
        r = X.eval(mid, t)
        if isinstance(r, Done):
            if r.value < 0:
                decisions.append((mid, t, -1))
                a = mid
            else:
                decisions.append((mid, t, 1))
                b = mid
    return IvtPunctualization(ContFunPresentation(decisions, "ivt"), (a, b), decisions)


def ivt_stream(X: StepOracle, budget=None) -> PunctualStream:
    """Per-stage view of the same construction, for fuel certification;
    emits the undecided interval after each stage."""

    def make_step():
        state = {}

        def step(t, meter):
            if t == 0:
                meter.spend(2)
                _ivt_check_endpoints(X)
                state["a"], state["b"] = Fraction(0), Fraction(1)
                return (state["a"], state["b"])
            a, b = state["a"], state["b"]
            mid = (a + b) / 2
            meter.spend(2)
            r = X.probe(mid, t, meter)
            if isinstance(r, Done):
                if r.value < 0:
                    state["a"] = mid
                else:
                    state["b"] = mid
            return (state["a"], state["b"])

        return step

    return PunctualStream(make_step, budget, "ivt(%s)" % X.description)


# ---------------------------------------------------------------------------
# interval covers


class IntervalCover:
    """Stagewise list of open rational intervals; None is the empty interval."""

    def __init__(self, intervals, description=""):
        self.intervals = list(intervals)
        self.description = description

    def prefix(self, t):
        return self.intervals[:t]

    def union_contains(self, x, t=None):
        for iv in self.intervals if t is None else self.intervals[:t]:
            if iv is not None and iv[0] < x < iv[1]:
                return True
        return False


def covers_closed(intervals, lo, hi):
    """Exact test: do the open rational intervals jointly cover [lo, hi]?"""
    ivs = sorted((a, b) for iv in intervals if iv is not None for a, b in [iv] if b > a)
    if hi < lo:
        return True
    x = lo
    while True:
        # the frontier point x itself must lie strictly inside some interval
        best = None
        for a, b in ivs:
            if a < x < b:
                best = b if best is None else max(best, b)
        if best is None:
            return False
        if best > hi:
            return True
        x = best


def heine_borel_punctualize(I: StepOracle, horizon) -> IntervalCover:
    """Copy the oracle cover, listing the empty interval while waiting."""
    return IntervalCover(heine_borel_stream(I).prefix(horizon, metered=False), "hb(%s)" % I.description)


def heine_borel_stream(I: StepOracle, budget=None) -> PunctualStream:
    def make_step():
        state = {"next": 0}

        def step(t, meter):
            meter.spend(1)
            r = I.probe(state["next"], t, meter)
            if isinstance(r, Done):
                state["next"] += 1
                return r.value
            return None

        return step

    return PunctualStream(make_step, budget, "hb(%s)" % I.description)


# ---------------------------------------------------------------------------
# Delta01 instances -> trees


def delta01_to_tree(phi, psi, horizon) -> PunctualTree:
    """Tree whose unique path is the characteristic function of
    {n : exists x phi(n,x)}, assuming phi and psi are complementary:
    bit 0 at i demands no phi-witness up to |sigma|, bit 1 no psi-witness.
    """
    for n in range(horizon):
        if any(phi(n, x) for x in range(horizon)) and any(psi(n, x) for x in range(horizon)):
            raise InstanceInconsistent("phi and psi both fire at n=%d" % n)

    def member(sigma, meter=None):
        m = len(sigma)
        for i, bit in enumerate(sigma):
            pred = phi if bit == "0" else psi
            for x in range(m + 1):
                if meter is not None:
                    meter.spend(1)
                if pred(i, x):
                    return False
        return True

    return PunctualTree(member, "delta01")


def delta01_unique_path(phi, length, witness_bound):
    """Full-knowledge characteristic function of {n : exists x phi(n,x)}."""
    return "".join(
        "1" if any(phi(n, x) for x in range(witness_bound + 1)) else "0" for n in range(length)
    )


# ---------------------------------------------------------------------------
# Heine-Borel <-> binary tree reductions


def dyadic_interval(sigma):
    k = int(sigma, 2) if sigma else 0
    den = 2 ** len(sigma)
    return Fraction(k, den), Fraction(k + 1, den)


class HbToWkl:
    def __init__(self, cover: IntervalCover):
        self.cover = cover

    def member(self, sigma, meter=None):
        """sigma survives until its dyadic interval is covered by the
        intervals revealed before stage |sigma|."""
        n = len(sigma)
        if meter is not None:
            meter.spend(n + 1)
        lo, hi = dyadic_interval(sigma)
        return not covers_closed(self.cover.prefix(n), lo, hi)

    def tree(self):
        return PunctualTree(self.member, "hb_to_wkl")

    def decode(self, path_bits):
        """A path decodes to the fast-Cauchy sequence of dyadic midpoints."""
        return [
            dyadic_interval(path_bits[:n])[0] + Fraction(1, 2 ** (n + 1))
            for n in range(len(path_bits) + 1)
        ]


def hb_to_wkl(cover: IntervalCover) -> HbToWkl:
    return HbToWkl(cover)


def cantor_interval(sigma):
    lo = Fraction(0)
    width = Fraction(1)
    for ch in sigma:
        width /= 3
        if ch == "1":
            lo += 2 * width
    return lo, lo + width


class WklToHb:
    """Cover of [0,1] whose uncovered points are exactly the Cantor-set
    images of the tree's surviving paths."""

    def __init__(self, tree: PunctualTree, horizon):
        self.tree = tree
        gaps = []  # removed middle thirds, by level
        level = 0
        while 2 ** level <= horizon:
            for idx in range(2 ** level):
                sigma = format(idx, "0%db" % level) if level else ""
                lo, hi = cantor_interval(sigma)
                third = (hi - lo) / 3
                gaps.append((lo + third, hi - third))
            level += 1
        self.intervals = []
        checked = 0
        for t in range(horizon):
            # gaps on even stages ("slowly"); dead Cantor intervals on odd
            if t % 2 == 0 and gaps:
                self.intervals.append(gaps.pop(0))
                continue
            emitted = False
            while checked < horizon:
                sigma = string_at(checked)
                checked += 1
                if sigma and not self.tree.member(sigma):
                    lo, hi = cantor_interval(sigma)
                    pad = (hi - lo) / 9
                    self.intervals.append((lo - pad, hi + pad))
                    emitted = True
                    break
            if not emitted:
                self.intervals.append(None)
        self.cover = IntervalCover(self.intervals, "wkl_to_hb")

    def decode(self, r, depth):
        """Homeomorphism inverse: the ternary expansion of a surviving real
        gives the bits of a path."""
        r = Fraction(r)
        bits = []
        lo, hi = Fraction(0), Fraction(1)
        for _ in range(depth):
            third = (hi - lo) / 3
            if r <= lo + third:
                bits.append("0")
                hi = lo + third
            elif r >= hi - third:
                bits.append("1")
                lo = hi - third
            else:
                raise PromiseViolation("real falls in a removed middle third")
        return "".join(bits)


def wkl_to_hb(tree: PunctualTree, horizon) -> WklToHb:
    return WklToHb(tree, horizon)


# ---------------------------------------------------------------------------
# rank-1 group coding of a decidable set


class RankOneGroup:
    """Subgroup of the rationals in which p_i divides the unit iff i is in
    the coded set: denominators may use any powers of the coded primes."""

    def __init__(self, indices):
        self.indices = sorted(set(indices))
        self.primes = [prime(i) for i in self.indices]
        self.unit = Fraction(1)

    def contains(self, q):
        d = Fraction(q).denominator
        for p in self.primes:
            while d % p == 0:
                d //= p
        return d == 1

    def divides(self, m, g):
        if m == 0:
            return False
        return self.contains(Fraction(g) / m)


def baer_encode(S) -> RankOneGroup:
    """S: iterable of indices in the coded set (up to a horizon)."""
    return RankOneGroup(S)


def baer_decode(G: RankOneGroup, g, horizon):
    """Enumerate {m <= horizon : m | g in G}; the prime indices among them
    recover the coded set up to finite difference."""
    if g == 0:
        raise ZeroElement("cannot decode the type of 0")
    return [m for m in range(1, horizon + 1) if G.divides(m, g)]


def baer_decode_set(G: RankOneGroup, g, index_horizon):
    """Indices i with p_i dividing g in G: equals the coded set up to the
    finitely many primes dividing the numerator of g."""
    if g == 0:
        raise ZeroElement("cannot decode the type of 0")
    return [i for i in range(index_horizon) if G.divides(prime(i), g)]
