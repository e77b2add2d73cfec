"""Presented structures: stage-built dense orders, a bit-defined random
graph, clopen Boolean algebras, instance coders with matching decoders,
and a basis extractor for vector spaces over finite fields.

Builders ship Skolem helpers (between/below/above, extension witnesses,
splits).  Coder outputs deliberately do not: their order/edge/algebra
structure hides a witness schedule, and the decoders recover it from an
isomorphism plus the built side's Skolem data using only bounded searches.
"""

from __future__ import annotations

from fractions import Fraction

from .core import FinSet, PunctualStream, is_code
from .errors import (
    HorizonExceeded,
    InstanceInconsistent,
    PreconditionFailed,
)

# ---------------------------------------------------------------------------
# dense linear orders


def interleave_sizes(s):
    """Prefix sizes of the stage-built dense order: 2, 5, 11, 23, ..."""
    q = 2
    for _ in range(s):
        q = 2 * q + 1
    return q


class LinearOrderPresentation:
    """Strict linear order on N with comparison and interval Skolem data.

    skolem(a0, a1) returns (c, d, e) with c < a0 < d < a1 < e; between,
    below and above expose the pieces individually.
    """

    def less(self, x, y):
        raise NotImplementedError

    def between(self, x, y):
        raise NotImplementedError

    def below(self, x):
        raise NotImplementedError

    def above(self, x):
        raise NotImplementedError

    def skolem(self, a0, a1):
        if not self.less(a0, a1):
            raise PreconditionFailed("skolem needs an ordered pair")
        return (self.below(a0), self.between(a0, a1), self.above(a1))


class DloOrder(LinearOrderPresentation):
    """Dense order without endpoints built by stagewise interleaving.

    Stage 0 is 0 < 1; stage s+1 surrounds and separates the stage-s chain
    with the least fresh naturals, so the prefix {0..q(s)-1} is always a
    finite chain and every Skolem search is bounded by the next stage.
    """

    # comparisons run on (birth stage, rank) pairs: an element entering at
    # rank j keeps rank 2j+1 in every later stage, so no stage list is ever
    # materialised and ids of any size compare in O(log id) arithmetic

    def _birth(self, x):
        if x < 2:
            return (0, x)
        s = 0
        while interleave_sizes(s + 1) <= x:
            s += 1
        return (s + 1, 2 * (x - interleave_sizes(s)))

    def _rank(self, x, S):
        b, j = self._birth(x)
        return (j + 1) * (1 << (S - b)) - 1

    @staticmethod
    def _least_in_window(S, a, b):
        """Least id with rank in [a, b] of the stage-S order."""
        while S > 0:
            pa, pb = a // 2, (b - 1) // 2  # odd ranks carry older elements
            if pa <= pb:
                a, b, S = pa, pb, S - 1
                continue
            ae = a if a % 2 == 0 else a + 1
            return interleave_sizes(S - 1) + ae // 2
        return a

    def order_prefix(self, s):
        q = interleave_sizes(s)
        return sorted(range(q), key=lambda x: self._rank(x, s))

    def less(self, x, y):
        if x == y:
            return False
        S = max(self._birth(x)[0], self._birth(y)[0])
        return self._rank(x, S) < self._rank(y, S)

    def between(self, x, y):
        # least natural strictly inside; the next stage guarantees one
        S = max(self._birth(x)[0], self._birth(y)[0])
        rx, ry = self._rank(x, S), self._rank(y, S)
        if rx > ry:
            rx, ry = ry, rx
        if ry - rx > 1:
            return self._least_in_window(S, rx + 1, ry - 1)
        return interleave_sizes(S) + rx + 1

    def below(self, x):
        S, _ = self._birth(x)
        r = self._rank(x, S)
        if r == 0:
            return interleave_sizes(S)
        return self._least_in_window(S, 0, r - 1)

    def above(self, x):
        S, _ = self._birth(x)
        r = self._rank(x, S)
        if r == interleave_sizes(S) - 1:
            return interleave_sizes(S) + r + 1
        return self._least_in_window(S, r + 1, interleave_sizes(S) - 1)


def dlo_build() -> DloOrder:
    """Dense linear order without endpoints, with bounded Skolem searches."""
    return DloOrder()


class EncodedDlo(LinearOrderPresentation):
    """Dense order hiding a witness schedule for a predicate theta.

    Layout: multiples of 4 carry a copy of the stage-built order (an
    unbounded open left part); numbers 4k+2 form an ascending right chain;
    odd numbers fill the gap (4k+2, 4k+6) only from the stage where
    theta(k, y) has a witness y within the stage bound.  Comparison is by
    exact dyadic position, so no stage is ever materialised.

    The between/below/above helpers here are oracle-grade (they do
    arithmetic a clocked consumer could not), which is the point: this
    side has no cheap Skolem function.
    """

    def __init__(self, theta, horizon):
        if not theta(0, 0):
            raise PreconditionFailed("theta(0, 0) must hold (normalise first)")
        self.theta = theta
        self.horizon = horizon
        self.A = dlo_build()
        self._tk = {}
        self._per_stage = []  # odds consumed at stage s (index s-1)
        self._meta = {}

    # --- witness schedule

    def t_fill(self, k):
        """First stage whose gap (4k+2, 4k+6) receives an odd; None if the
        witness stays beyond the horizon."""
        if k not in self._tk:
            w = None
            for y in range(self.horizon + 1):
                if self.theta(k, y):
                    w = y
                    break
            self._tk[k] = None if w is None else max(k, w, 1)
        return self._tk[k]

    def _consumed_at(self, s):
        while len(self._per_stage) < s:
            s2 = len(self._per_stage) + 1
            tot = 0
            for k in range(s2 + 1):
                t = self.t_fill(k)
                if t is not None and t <= s2:
                    tot += 1 << (s2 - t)
            self._per_stage.append(tot)
        return self._per_stage[s - 1]

    def _odd_meta(self, o):
        """(stage, gap index, slot) of the odd number o."""
        if o not in self._meta:
            j = (o - 1) // 2
            s = 1
            while True:
                c = self._consumed_at(s)
                if j < c:
                    break
                j -= c
                s += 1
                if s > 4 * self.horizon + 64:
                    raise HorizonExceeded("odd %d not placed in range" % o)
            for k in range(s + 1):
                t = self.t_fill(k)
                if t is None or t > s:
                    continue
                block = 1 << (s - t)
                if j < block:
                    self._meta[o] = (s, k, j)
                    break
                j -= block
        return self._meta[o]

    def _odd_id(self, s, k, r):
        """Inverse of _odd_meta: identity of slot r of gap k at stage s."""
        j = sum(self._consumed_at(s2) for s2 in range(1, s))
        for k2 in range(k):
            t = self.t_fill(k2)
            if t is not None and t <= s:
                j += 1 << (s - t)
        return 2 * (j + r) + 1

    # --- classification and order

    def _pos(self, x):
        """Dyadic position of a right-part element (gap k spans (k, k+1))."""
        if x % 4 == 2:
            return Fraction((x - 2) // 4)
        s, k, r = self._odd_meta(x)
        t = self.t_fill(k)
        return k + Fraction(2 * r + 1, 1 << (s - t + 1))

    def less(self, x, y):
        if x == y:
            return False
        xa, ya = x % 4 == 0, y % 4 == 0
        if xa and ya:
            return self.A.less(x // 4, y // 4)
        if xa:
            return True  # the copied order sits below the coding part
        if ya:
            return False
        return self._pos(x) < self._pos(y)

    # --- oracle-grade Skolem helpers

    def between(self, x, y):
        if not self.less(x, y):
            raise PreconditionFailed("between needs an ordered pair")
        if x % 4 == 0 and y % 4 == 0:
            return 4 * self.A.between(x // 4, y // 4)
        if x % 4 == 0:
            return 4 * self.A.above(x // 4)
        p1, p2 = self._pos(x), self._pos(y)
        k0 = int(p1) + 1
        if p1 < k0 < p2:
            return 4 * k0 + 2  # a chain element separates them
        k = int(p1)
        t = self.t_fill(k)
        if t is None:
            raise HorizonExceeded(
                "gap %d has no witness within horizon %d" % (k, self.horizon))
        a, b = p1 - k, p2 - k
        for s in range(t, t + 4 * self.horizon + 128):
            den = 1 << (s - t + 1)
            u = int(a * den) + 1
            if u % 2 == 0:
                u += 1
            while Fraction(u, den) <= a:
                u += 2
            if Fraction(u, den) < b:
                return self._odd_id(s, k, (u - 1) // 2)
        raise AssertionError("unreachable: gap fillings are dense")

    def below(self, x):
        if x % 4 == 0:
            return 4 * self.A.below(x // 4)
        return 0  # the whole copied order lies below the coding part

    def above(self, x):
        if x % 4 == 0:
            return 4 * self.A.above(x // 4)
        return 4 * (int(self._pos(x)) + 1) + 2


def dlo_encode(theta, horizon) -> EncodedDlo:
    """Dense order whose gap fillings reveal witnesses of theta."""
    return EncodedDlo(theta, horizon)


class BackForth:
    """Order-isomorphism engine between two dense presentations.

    Anchored at 0 -> 0 and 1 -> 1 (both presentations must order 0 below 1);
    even rounds map the least unmapped domain natural, odd rounds the least
    unmapped codomain natural, images chosen by the codomain's interval
    helpers, so both maps are total in the limit and mutually inverse.
    """

    def __init__(self, dom, cod):
        if not (dom.less(0, 1) and cod.less(0, 1)):
            raise PreconditionFailed("both presentations must order 0 < 1")
        self.dom, self.cod = dom, cod
        self.h = {0: 0, 1: 1}
        self.hinv = {0: 0, 1: 1}
        self._dom_sorted = [0, 1]  # mapped domain elements in dom-order
        self._round = 0

    def _insert_pos(self, side, arr, x):
        lo, hi = 0, len(arr)
        while lo < hi:
            mid = (lo + hi) // 2
            if side.less(arr[mid], x):
                lo = mid + 1
            else:
                hi = mid
        return lo

    def _extend(self, a):
        """Map the domain element a, preserving order against the range."""
        arr = self._dom_sorted
        i = self._insert_pos(self.dom, arr, a)
        if i == 0:
            img = self.cod.below(self.h[arr[0]])
        elif i == len(arr):
            img = self.cod.above(self.h[arr[-1]])
        else:
            img = self.cod.between(self.h[arr[i - 1]], self.h[arr[i]])
        self.h[a] = img
        self.hinv[img] = a
        arr.insert(i, a)

    def _extend_back(self, b):
        """Choose a preimage for the codomain element b."""
        arr = self._dom_sorted
        imgs = [self.h[x] for x in arr]
        lo, hi = 0, len(imgs)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.cod.less(imgs[mid], b):
                lo = mid + 1
            else:
                hi = mid
        if lo == 0:
            pre = self.dom.below(arr[0])
        elif lo == len(arr):
            pre = self.dom.above(arr[-1])
        else:
            pre = self.dom.between(arr[lo - 1], arr[lo])
        self.h[pre] = b
        self.hinv[b] = pre
        arr.insert(lo, pre)

    def step(self):
        r = self._round
        self._round += 1
        if r % 2 == 0:
            a = 0
            while a in self.h:
                a += 1
            self._extend(a)
        else:
            b = 0
            while b in self.hinv:
                b += 1
            self._extend_back(b)

    def value(self, a, max_rounds=100000):
        for _ in range(max_rounds):
            if a in self.h:
                return self.h[a]
            self.step()
        raise HorizonExceeded("element %d not mapped in %d rounds" % (a, max_rounds))

    def inverse(self, b, max_rounds=200000):
        for _ in range(max_rounds):
            if b in self.hinv:
                return self.hinv[b]
            self.step()
        raise HorizonExceeded("value %d not hit in %d rounds" % (b, max_rounds))


def dlo_backforth(A, B, budget=None):
    """Streams (h, h_inverse) of an isomorphism built back and forth.

    h.emit(t) is the image of domain element t; h_inverse.emit(t) the
    preimage of codomain element t.  Both replay the same deterministic
    engine, so they are mutually consistent.
    """

    def make_h():
        eng = BackForth(A, B)

        def step(t, meter):
            meter.spend(2 * t + 2)
            return eng.value(t)

        return step

    def make_hinv():
        eng = BackForth(A, B)

        def step(t, meter):
            meter.spend(2 * t + 2)
            return eng.inverse(t)

        return step

    return (PunctualStream(make_h, budget, "backforth"),
            PunctualStream(make_hinv, budget, "backforth_inv"))


def dlo_decode(engine: BackForth, A: DloOrder, theta, count, horizon):
    """Recover a choice function for theta from an isomorphism engine
    mapping the encoded order onto A.

    For each k, the image of the gap (4k+2, 4k+6) is separated in A by the
    built side's Skolem function; pulling that separator back gives a gap
    filler whose identity bounds the least witness.
    """
    out = []
    for k in range(count):
        u = engine.value(4 * k + 2)
        v = engine.value(4 * k + 6)
        mid = A.between(u, v)
        xi = engine.inverse(mid)
        if xi % 2 == 0:
            raise PreconditionFailed("separator preimage %d is not a gap filler" % xi)
        f_k = None
        for y in range(min(xi, horizon) + 1):
            if theta(k, y):
                f_k = y
                break
        if f_k is None:
            raise HorizonExceeded("no witness for %d below %d" % (k, min(xi, horizon)))
        out.append(f_k)
    return out


# ---------------------------------------------------------------------------
# random graphs


class GraphPresentation:
    """Graph on N with an extension-witness Skolem function."""

    def adjacency(self, u, v):
        raise NotImplementedError

    def skolem(self, X, Y):
        raise NotImplementedError


class BitGraph(GraphPresentation):
    """The bit graph: i ~ j (i < j) iff bit i of j is set.

    Satisfies the finite extension property with an explicit witness, so it
    is the age-closure limit of finite graphs in concrete clothing.
    """

    def adjacency(self, u, v):
        if u == v:
            return False
        if u > v:
            u, v = v, u
        return (v >> u) & 1 == 1

    def skolem(self, X, Y):
        X, Y = set(X), set(Y)
        if X & Y:
            raise PreconditionFailed("witness sets must be disjoint")
        m = max(X | Y | {0}) + 1
        return sum(1 << x for x in X) + (1 << m)


def rg_build() -> BitGraph:
    return BitGraph()


def _requirement(j):
    """Decode the j-th extension demand (X, Y); None when j is no demand."""
    w = 0
    while (w + 1) * (w + 2) // 2 <= j:
        w += 1
    b = j - w * (w + 1) // 2
    cx, cy = w - b, b
    if not (is_code(cx) and is_code(cy)):
        return None
    X = frozenset(FinSet.from_code(cx).elements())
    Y = frozenset(FinSet.from_code(cy).elements())
    if not X or not Y or (X & Y):
        return None
    return (X, Y)


class EncodedGraph(GraphPresentation):
    """Graph hiding a witness schedule for a predicate psi.

    Phase n grows a clique over everything built so far until the stage
    bound covers a witness for psi(n, .); the node added then is born
    isolated (the visible marker).  Between phases the construction serves
    the fixed round-robin list of extension demands up to index n, which
    keeps the limit graph extension-closed, albeit with unbounded delay.
    """

    def __init__(self, psi, horizon, max_nodes=4096):
        self.psi = psi
        self.horizon = horizon
        self.max_nodes = max_nodes
        self.nbrs = []  # node -> set of earlier neighbours (mirrored below)
        self.markers = []  # marker node of each phase
        self.catchup_end = []  # first stage after each phase's service segment
        self._phase = 0
        self._mode = "coding"
        self._req = 0  # next unserved demand index
        self._wit = {}

    def _have_witness(self, n, s):
        for y in range(min(s, self.horizon) + 1):
            if self.psi(n, y):
                return True
        return False

    def _met(self, j):
        req = _requirement(j)
        if req is None:
            return True
        X, Y = req
        n = len(self.nbrs)
        if X | Y and max(X | Y) >= n:
            return None  # not yet expressible
        for z in range(n):
            if z in X or z in Y:
                continue
            if all(self._adj_built(z, x) for x in X) and \
                    not any(self._adj_built(z, y) for y in Y):
                return True
        return False

    def _adj_built(self, u, v):
        if u == v:
            return False
        if u > v:
            u, v = v, u
        return u in self.nbrs[v]

    def _build_stage(self):
        s = len(self.nbrs)
        if s >= self.max_nodes:
            raise HorizonExceeded("graph build cap %d reached" % self.max_nodes)
        if self._mode == "coding":
            if self._have_witness(self._phase, s):
                self.nbrs.append(set())  # marker: born isolated
                self.markers.append(s)
                self._mode = "catchup"
            else:
                self.nbrs.append(set(range(s)))
            return
        # serve demands up to the current phase index, then start next phase
        while self._req <= self._phase:
            st = self._met(self._req)
            if st is True:
                self._req += 1
                continue
            if st is None:
                self.nbrs.append(set(range(s)))  # grow the domain first
                return
            X, _ = _requirement(self._req)
            self.nbrs.append(set(X))
            self._req += 1
            return
        self.catchup_end.append(s)
        self._phase += 1
        self._mode = "coding"
        self._req = 0
        self._build_stage()

    def ensure(self, n):
        while len(self.nbrs) <= n:
            self._build_stage()

    def adjacency(self, u, v):
        self.ensure(max(u, v))
        return self._adj_built(u, v)

    def skolem(self, X, Y):
        """Oracle-grade witness search (builds until the demand is met)."""
        X, Y = set(X), set(Y)
        self.ensure(max(X | Y) if X | Y else 0)
        for _ in range(self.max_nodes):
            for z in range(len(self.nbrs)):
                if z in X or z in Y:
                    continue
                if all(self._adj_built(z, x) for x in X) and \
                        not any(self._adj_built(z, y) for y in Y):
                    return z
            self._build_stage()
        raise HorizonExceeded("no extension witness within build cap")


def rg_encode(psi, horizon, max_nodes=4096) -> EncodedGraph:
    return EncodedGraph(psi, horizon, max_nodes)


def rg_decode(g_of, psi, count, horizon):
    """Recover a choice function from an isomorphism g_of: built graph ->
    encoded graph (supplied as a callable on vertex numbers).

    f(0) is bounded by the images of the least built-side non-edge (0, 2);
    afterwards the encoded prefix is reconstructed from the values found so
    far, and f(n+1) is bounded by the images of t_n + 1 pairwise
    non-adjacent nodes: below the phase-(n+1) marker the target graph has
    only t_n nodes with any non-neighbour at all, so one image must land at
    the marker or beyond, and the marker stage dominates the witness.
    """
    shadow = EncodedGraph(psi, horizon)

    def mu(n, bound):
        for y in range(min(bound, horizon) + 1):
            if psi(n, y):
                return y
        raise HorizonExceeded("no witness for %d below %d" % (n, min(bound, horizon)))

    out = []
    d = max(g_of(0), g_of(2))
    out.append(mu(0, d))
    for n in range(1, count):
        # the shadow build is deterministic, so its service-segment ends are
        # available as soon as the previous witnesses are known
        shadow.ensure(d + 1)
        while len(shadow.catchup_end) < n:
            shadow._build_stage()
        t_prev = shadow.catchup_end[n - 1]
        # 0 and the odd-position powers of two are pairwise non-adjacent
        nodes = [0] + [1 << (2 * k + 1) for k in range(t_prev)]
        d = max(g_of(v) for v in nodes)
        out.append(mu(n, d))
    return out


# ---------------------------------------------------------------------------
# Boolean algebras (clopen subsets of the binary tree's boundary)


def _lift(mask, d):
    """Mask at depth d -> equivalent mask at depth d+1 (each cell splits)."""
    out = 0
    for i in range(1 << d):
        if (mask >> i) & 1:
            out |= 0b11 << (2 * i)
    return out


def _reduce(mask, d):
    """Minimal-depth canonical form of (mask, depth)."""
    while d > 0:
        half = 1 << (d - 1)
        down = 0
        ok = True
        for i in range(half):
            pair = (mask >> (2 * i)) & 0b11
            if pair == 0b11:
                down |= 1 << i
            elif pair != 0:
                ok = False
                break
        if not ok:
            break
        mask, d = down, d - 1
    return mask, d


class BooleanAlgebraPresentation:
    """Boolean algebra on N via canonical clopen masks.

    Subclasses fix the id enumeration; operations go through masks, so the
    laws hold by construction and audits can replay them on ids.
    """

    def mask_of(self, x):
        raise NotImplementedError

    def id_of(self, mask, depth):
        raise NotImplementedError

    def _binop(self, x, y, op):
        mx, dx = self.mask_of(x)
        my, dy = self.mask_of(y)
        while dx < dy:
            mx, dx = _lift(mx, dx), dx + 1
        while dy < dx:
            my, dy = _lift(my, dy), dy + 1
        return self.id_of(*_reduce(op(mx, my), dx))

    def join(self, x, y):
        return self._binop(x, y, lambda a, b: a | b)

    def meet(self, x, y):
        return self._binop(x, y, lambda a, b: a & b)

    def neg(self, x):
        m, d = self.mask_of(x)
        return self.id_of(*_reduce(~m & ((1 << (1 << d)) - 1), d))

    @property
    def zero(self):
        return self.id_of(0, 0)

    @property
    def one(self):
        return self.id_of(1, 0)

    def leq(self, x, y):
        return self.meet(x, y) == x

    def skolem_split(self, x):
        """Disjoint nonzero (y, z) with y v z = x; witnesses atomlessness."""
        m, d = self.mask_of(x)
        if m == 0:
            raise PreconditionFailed("cannot split zero")
        bits = [i for i in range(1 << d) if (m >> i) & 1]
        if len(bits) >= 2:
            y = 1 << bits[0]
            z = m & ~y
            return (self.id_of(*_reduce(y, d)), self.id_of(*_reduce(z, d)))
        m2 = _lift(m, d)
        y = 1 << (2 * bits[0])
        return (self.id_of(*_reduce(y, d + 1)),
                self.id_of(*_reduce(m2 & ~y, d + 1)))


class CanonicalBa(BooleanAlgebraPresentation):
    """Atomless algebra with ids in canonical (depth, mask) order."""

    _MAX_DEPTH = 4

    def __init__(self):
        self._ids = {}
        self._elems = []
        for d in range(self._MAX_DEPTH + 1):
            for m in range(1 << (1 << d)):
                if _reduce(m, d)[1] == d and (m, d) not in self._ids:
                    self._ids[(m, d)] = len(self._elems)
                    self._elems.append((m, d))

    def mask_of(self, x):
        if x >= len(self._elems):
            raise PreconditionFailed("id %d beyond supported depth" % x)
        return self._elems[x]

    def id_of(self, mask, depth):
        key = _reduce(mask, depth)
        if key not in self._ids:
            raise PreconditionFailed("element beyond supported depth")
        return self._ids[key]


def ba_build() -> CanonicalBa:
    return CanonicalBa()


class EncodedBa(BooleanAlgebraPresentation):
    """Atomless algebra whose id order hides a witness schedule.

    The distinguished element d is the left half.  The predicate is
    normalised so witnesses for input x start at x; l(s) is the length of
    the solved initial segment with witnesses bounded by s.  A stage adds
    the next proper element below d only when l grows; all other elements
    (below the complement, and mixed combinations) fill the remaining
    stages, so among any m distinct nonzero elements strictly below d the
    largest id bounds every witness for inputs < m.
    """

    def __init__(self, psi, horizon, max_stages=4096):
        self.psi = psi
        self.horizon = horizon
        self.max_stages = max_stages
        base = CanonicalBa()
        self._canon = base
        # fixed header: 0, 1, d = left half, complement of d
        d_key = base.mask_of(base.id_of(0b01, 1))
        nd_key = base.mask_of(base.id_of(0b10, 1))
        self._ids = {(0, 0): 0, (1, 0): 1, d_key: 2, nd_key: 3}
        self._elems = [(0, 0), (1, 0), d_key, nd_key]
        self._below_d = [k for k in base._elems
                        if k not in self._ids and self._canon_leq(k, d_key)]
        self._below_nd = [k for k in base._elems
                         if k not in self._ids and self._canon_leq(k, nd_key)]
        self._mixed = [k for k in base._elems
                       if k not in self._ids
                       and not self._canon_leq(k, d_key)
                       and not self._canon_leq(k, nd_key)]
        self._bd = self._bn = self._bm = 0
        self._ell = 0
        self._flip = 0
        self.increase_stages = []

    def _canon_leq(self, a, b):
        ma, da = a
        mb, db = b
        while da < db:
            ma, da = _lift(ma, da), da + 1
        while db < da:
            mb, db = _lift(mb, db), db + 1
        return ma & mb == ma

    def psi_norm(self, x, y):
        return y >= x and self.psi(x, y - x)

    def _ell_at(self, s):
        m = 0
        while True:
            if any(self.psi_norm(m, y) for y in range(min(s, self.horizon) + 1)):
                m += 1
            else:
                return m

    def _build_stage(self):
        s = len(self._elems)
        if s - 4 >= self.max_stages:
            raise HorizonExceeded("algebra build cap reached")
        new_ell = self._ell_at(s)
        if new_ell > self._ell:
            self._ell = new_ell
            if self._bd >= len(self._below_d):
                raise PreconditionFailed("supported depth exhausted below d")
            key = self._below_d[self._bd]
            self._bd += 1
            self.increase_stages.append(s)
        else:
            self._flip ^= 1
            if self._flip and self._bn < len(self._below_nd):
                key = self._below_nd[self._bn]
                self._bn += 1
            elif self._bm < len(self._mixed):
                key = self._mixed[self._bm]
                self._bm += 1
            elif self._bn < len(self._below_nd):
                key = self._below_nd[self._bn]
                self._bn += 1
            else:
                raise PreconditionFailed("supported depth exhausted")
        self._ids[key] = s
        self._elems.append(key)

    @property
    def d(self):
        return 2

    def mask_of(self, x):
        while x >= len(self._elems):
            self._build_stage()
        return self._elems[x]

    def id_of(self, mask, depth):
        key = _reduce(mask, depth)
        for _ in range(self.max_stages + 8):
            if key in self._ids:
                return self._ids[key]
            self._build_stage()
        raise HorizonExceeded("element never enumerated")


def ba_encode(psi, horizon, max_stages=4096) -> EncodedBa:
    return EncodedBa(psi, horizon, max_stages)


def ba_decode(g_of, A: CanonicalBa, B: EncodedBa, psi, count, horizon):
    """Recover a choice function from an isomorphism g_of: A -> B.

    The preimage of B's distinguished element is split repeatedly by A's
    Skolem function; the ids of the images of `count` distinct pieces bound
    the witnesses for every input below `count`.
    """
    d_prime = None
    for x in range(len(A._elems)):
        if g_of(x) == B.d:
            d_prime = x
            break
    if d_prime is None:
        raise PreconditionFailed("distinguished element not hit on the prefix")
    pieces = []
    frontier = [d_prime]
    while len(pieces) < count:
        x = frontier.pop(0)
        y, z = A.skolem_split(x)
        for p in (y, z):
            if len(pieces) < count and p not in pieces:
                pieces.append(p)
                frontier.append(p)
    bound = max(g_of(p) for p in pieces)
    out = []
    for x in range(count):
        f_x = None
        for y in range(x, min(bound, horizon) + 1):
            if B.psi_norm(x, y):
                f_x = y - x
                break
        if f_x is None:
            raise HorizonExceeded("no witness for %d below %d" % (x, bound))
        out.append(f_x)
    return out


# ---------------------------------------------------------------------------
# vector spaces over finite fields


class VectorSpacePresentation:
    """Vector space with domain N over a prime field of size k.

    add/scalar are total on the domain; zero is the element 0.
    """

    def __init__(self, k, add, scalar, contains=None, description=""):
        self.k = k
        self.add = add
        self.scalar = scalar
        self.contains = contains if contains is not None else (lambda v: True)
        self.zero = 0
        self.description = description

    @classmethod
    def coordinate_space(cls, p):
        """Eventually-zero coordinate sequences over F_p, digit-coded."""

        def add(u, v):
            out, mult = 0, 1
            while u or v:
                out += ((u + v) % p) * mult
                u, v, mult = u // p, v // p, mult * p
            return out

        def scalar(a, v):
            a %= p
            out, mult = 0, 1
            while v:
                out += ((a * (v % p)) % p) * mult
                v, mult = v // p, mult * p
            return out

        return cls(p, add, scalar, description="F_%d coordinate space" % p)


def span_elements(V: VectorSpacePresentation, vecs):
    """All k^len(vecs) linear combinations (includes zero)."""
    out = {V.zero}
    for v in vecs:
        nxt = set()
        for w in out:
            cur = w
            for _ in range(V.k):
                nxt.add(cur)
                cur = V.add(cur, v)
        out = nxt
    return out


def basis_finite_field(V: VectorSpacePresentation, budget=None) -> PunctualStream:
    """Basis stream: element of index 1 first, then at each stage the least
    vector outside the current span, searched within the bound k^(n+1)+1.

    Raises InstanceInconsistent when the bound is exhausted (the space is
    not infinite-dimensional over the inspected prefix).
    """

    def make_step():
        basis = []

        def step(t, meter):
            if t == 0:
                if V.zero == 1:
                    raise PreconditionFailed("element 1 must be non-zero")
                basis.append(1)
                meter.spend(1)
                return 1
            bound = V.k ** (len(basis) + 1) + 1
            sp = span_elements(V, basis)
            meter.spend(len(sp))
            for z in range(bound + 1):
                meter.spend(1)
                if V.contains(z) and z not in sp:
                    basis.append(z)
                    return z
            raise InstanceInconsistent(
                "no vector outside span within bound %d" % bound)

        return step

    return PunctualStream(make_step, budget, "basis(%s)" % V.description)
