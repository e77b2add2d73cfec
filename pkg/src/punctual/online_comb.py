"""Online combinatorics: per-stage algorithms whose decisions about the
s-th element inspect only the revealed prefix and the output so far.

Linear extension, transitive reorientation, sparse independent-ish vertex
streams, bounded-palette coloring, bipartite matching, and component
decision functions.  Each construction is replayable and fuel-metered.
"""

from __future__ import annotations

import itertools
from collections import deque

from .core import FinSet, PunctualStream, pair_code
from .errors import (
    HallViolation,
    InvalidInstance,
    PreconditionFailed,
    PromiseViolation,
)

# ---------------------------------------------------------------------------
# input types


class HonestGraph:
    """Locally finite undirected graph bundled with exact neighborhood codes.

    Convention: v is always a member of N(v).  b(v) is the prime-exponent
    code of N(v), so a stream may bound searches by decoding b.
    """

    def __init__(self, nbr_fn, description=""):
        self._nbr = nbr_fn
        self._cache = {}
        self.description = description

    def neighbors(self, v):
        if v not in self._cache:
            s = set(self._nbr(v))
            s.add(v)
            self._cache[v] = tuple(sorted(s))
        return self._cache[v]

    def adjacency(self, u, v):
        return u in self.neighbors(v)

    def b(self, v):
        return FinSet.from_elements(self.neighbors(v)).code()

    @classmethod
    def from_neighbor_map(cls, nbrs, description=""):
        """Finite-support fixture: vertices outside the map are isolated."""
        d = {v: set(ns) for v, ns in nbrs.items()}
        return cls(lambda v: d.get(v, ()), description)

    @classmethod
    def edgeless(cls):
        return cls(lambda v: (), "edgeless")


class PosetStream:
    """Strict partial order revealed one element per stage.

    reveal(s) -> (element, below, above): below is the set of previously
    revealed elements p with p < element, above the set with element < p.
    """

    def __init__(self, reveal_fn, description=""):
        self.reveal = reveal_fn
        self.description = description

    @classmethod
    def from_order(cls, elements, less):
        elements = list(elements)

        def reveal(s):
            e = elements[s]
            prior = elements[:s]
            below = frozenset(p for p in prior if less(p, e))
            above = frozenset(p for p in prior if less(e, p))
            return e, below, above

        return cls(reveal, "from_order")


class OrientedGraphStream:
    """Oriented graph revealed one vertex per stage.

    reveal(s) -> (vertex, out_to, in_from): out_to holds the prior vertices
    u with vertex -> u in the input orientation, in_from those with
    u -> vertex.  At most one direction per pair (the two sets are disjoint).
    """

    def __init__(self, reveal_fn, description=""):
        self.reveal = reveal_fn
        self.description = description

    @classmethod
    def from_direction(cls, vertices, direction):
        """direction(u, v) in {+1, -1, 0}: +1 means u -> v."""
        vertices = list(vertices)

        def reveal(s):
            v = vertices[s]
            prior = vertices[:s]
            out_to = frozenset(u for u in prior if direction(v, u) > 0)
            in_from = frozenset(u for u in prior if direction(u, v) > 0)
            return v, out_to, in_from

        return cls(reveal, "from_direction")


class BipartiteInstance:
    """Bipartite graph (A, B, E) with edges crossing sides only.

    Finite form: a_side and b_side are lists and adjacency is a predicate.
    Streamed form: a_enum enumerates A and the honest bundle nbr gives the
    exact finite neighborhood of every vertex on either side.  h, when
    present, is a surplus witness: any finite X subseteq A of size >= h(n)
    has |N(X)| - |X| >= n; h(0) must be 0.
    """

    def __init__(self, a_side=None, b_side=None, adjacency=None,
                 a_enum=None, nbr=None, h=None):
        self.a_side = list(a_side) if a_side is not None else None
        self.b_side = list(b_side) if b_side is not None else None
        self._adj = adjacency
        self.a_enum = a_enum
        self._nbr = nbr
        self.h = h
        if h is not None and h(0) != 0:
            raise PreconditionFailed("surplus witness must have h(0) = 0")
        if self.a_side is not None and self.b_side is not None:
            if set(self.a_side) & set(self.b_side):
                raise PreconditionFailed("sides must be disjoint")

    def neighbors(self, v, meter=None):
        if meter is not None:
            meter.spend(1)
        if self._nbr is not None:
            return sorted(self._nbr(v))
        if v in set(self.a_side):
            return [b for b in self.b_side if self._adj(v, b)]
        return [a for a in self.a_side if self._adj(a, v)]

    def adjacent(self, a, b):
        if self._adj is not None:
            return self._adj(a, b)
        return b in self._nbr(a)


# ---------------------------------------------------------------------------
# linear extension


def szpilrajn_extend(P: PosetStream, budget=None) -> PunctualStream:
    """Online linear extension of a streamed strict partial order.

    Stage s emits the linearisation of the first s+1 elements as a tuple,
    least first.  The new element is inserted at the lowest position
    admissible under the revealed constraints, which pins the output down
    (an antichain streamed as 0, 1, 2 comes out reversed).  Raises
    InvalidInstance when the revealed prefix is not a strict partial order.
    """

    def make_step():
        order = []  # current linearisation, least first
        rel = {}  # element -> (below, above) as revealed
        pos = {}

        def step(t, meter):
            e, below, above = P.reveal(t)
            meter.spend(1 + len(below) + len(above))
            if e in pos:
                raise InvalidInstance("element %r revealed twice" % (e,))
            for q in below | above:
                if q not in pos:
                    raise InvalidInstance("relation to unrevealed %r" % (q,))
            if below & above:
                raise InvalidInstance("antisymmetry violated at %r" % (e,))
            # transitivity of the revealed relation through e
            for q in below:
                qb, _ = rel[q]
                meter.spend(len(qb))
                if not qb <= below:
                    raise InvalidInstance("below-set of %r not closed" % (e,))
            for q in above:
                _, qa = rel[q]
                meter.spend(len(qa))
                if not qa <= above:
                    raise InvalidInstance("above-set of %r not closed" % (e,))
            lo = 0
            for q in below:
                lo = max(lo, pos[q] + 1)
            hi = len(order)
            for q in above:
                hi = min(hi, pos[q])
            if lo > hi:
                raise InvalidInstance("prefix at %r is not a partial order" % (e,))
            order.insert(lo, e)
            rel[e] = (below, above)
            for i in range(lo, len(order)):
                pos[order[i]] = i
            meter.spend(len(order))
            return tuple(order)

        return step

    return PunctualStream(make_step, budget, "szpilrajn(%s)" % P.description)


# ---------------------------------------------------------------------------
# transitive reorientation


def _solve_orientation(variables, clauses, units, prefer):
    """Deterministic 2-SAT over edge-direction booleans.

    clauses are (u, w) pairs meaning x_u implies x_w; units maps a variable
    to a forced value; unforced variables take prefer[u], flipped when
    propagation from the preferred value conflicts.  Returns an assignment
    or None when unsatisfiable.
    """
    fwd = {u: [] for u in variables}
    for u, w in clauses:
        fwd[u].append((w, True))  # x_u = T forces x_w = T
        fwd[w].append((u, False))  # x_w = F forces x_u = F

    def propagate(assign, u, val):
        queue = [(u, val)]
        while queue:
            a, v = queue.pop()
            if a in assign:
                if assign[a] != v:
                    return False
                continue
            assign[a] = v
            for b, pol in fwd[a]:
                # (a True -> b True) fires on v True; contrapositive on False
                if pol and v:
                    queue.append((b, True))
                elif not pol and not v:
                    queue.append((b, False))
        return True

    assign = {}
    for u, val in units.items():
        if not propagate(assign, u, val):
            return None
    for u in sorted(variables):
        if u in assign:
            continue
        trial = dict(assign)
        if propagate(trial, u, prefer[u]):
            assign = trial
            continue
        trial = dict(assign)
        if propagate(trial, u, not prefer[u]):
            assign = trial
            continue
        return None
    return assign


def reorient(G: OrientedGraphStream, budget=None) -> PunctualStream:
    """Online transitive reorientation of a streamed oriented graph.

    The input must be pseudo-transitive on every prefix (a -> b -> c forces
    an edge between a and c in some direction).  Stage s emits the output
    relation on the prefix as a frozenset of ordered pairs.  Rule: the new
    vertex's edges are the only undecided bits; directions forced by
    transitivity against the committed output are propagated, and any
    remaining freedom keeps the input's direction.  Raises InvalidInstance
    on a pseudo-transitivity violation or an unorientable prefix.
    """

    def make_step():
        seen = []
        in_dir = {}  # committed input orientation, ordered pairs
        out_rel = set()  # committed output orientation

        def step(t, meter):
            v, out_to, in_from = G.reveal(t)
            if out_to & in_from:
                raise InvalidInstance("double edge at %r" % (v,))
            nbrs = out_to | in_from
            meter.spend(1 + len(nbrs))
            for u in nbrs:
                if u not in set(seen):
                    raise InvalidInstance("edge to unrevealed %r" % (u,))
            # incremental pseudo-transitivity audit on the input orientation
            new_in = {(v, u) for u in out_to} | {(u, v) for u in in_from}
            all_in = set(in_dir) | new_in
            for (a, b) in new_in:
                for c in seen + [v]:
                    meter.spend(2)
                    if (b, c) in all_in and c != a:
                        if (a, c) not in all_in and (c, a) not in all_in:
                            raise InvalidInstance(
                                "pseudo-transitivity fails on %r,%r,%r" % (a, b, c))
                    if (c, a) in all_in and c != b:
                        if (c, b) not in all_in and (b, c) not in all_in:
                            raise InvalidInstance(
                                "pseudo-transitivity fails on %r,%r,%r" % (c, a, b))
            # x_u := (u -> v in the output); clauses close 2-chains through v
            clauses = []
            for u in nbrs:
                for w in nbrs:
                    meter.spend(1)
                    if u != w and (u, w) not in out_rel:
                        clauses.append((u, w))
            units = {}
            for u in nbrs:
                for y in seen:
                    if y in nbrs or y == u:
                        continue
                    meter.spend(2)
                    if (y, u) in out_rel:
                        if units.get(u) is True:
                            raise InvalidInstance("prefix unorientable at %r" % (v,))
                        units[u] = False
                    if (u, y) in out_rel:
                        if units.get(u) is False:
                            raise InvalidInstance("prefix unorientable at %r" % (v,))
                        units[u] = True
            prefer = {u: (u in in_from) for u in nbrs}
            assign = _solve_orientation(nbrs, clauses, units, prefer)
            if assign is None:
                raise InvalidInstance("prefix unorientable at %r" % (v,))
            for u in nbrs:
                out_rel.add((u, v) if assign[u] else (v, u))
            in_dir.update(dict.fromkeys(new_in))
            seen.append(v)
            meter.spend(len(out_rel))
            return frozenset(out_rel)

        return step

    return PunctualStream(make_step, budget, "reorient(%s)" % G.description)


# ---------------------------------------------------------------------------
# sparse vertex streams on honest graphs


def set_code(xs):
    """Code of a finite set of naturals; 1 for the empty set.

    Any member of the coded set is strictly below the code, so code + 1 is
    always a fresh vertex.
    """
    f = FinSet.from_elements(xs)
    return f.code() if f.charvec else 1


def rival_sands(G: HonestGraph, budget=None) -> PunctualStream:
    """Strictly increasing vertex stream H with: every vertex of G is
    adjacent to at most one member of H (vertices are self-adjacent).

    Stage s emits x_s = c + 1 where c codes the set of
    neighbors-of-neighbors of x_0..x_{s-1}; since codes majorise their
    members, x_s avoids every 2-ball around the chosen prefix.  Values grow
    beyond any fixed audit window after a few stages, which is harmless:
    adjacency to the window is decided by the window's own neighborhoods.
    """

    def make_step():
        chosen = []

        def step(t, meter):
            nn = set()
            for x in chosen:
                for y in G.neighbors(x):
                    meter.spend(1)
                    nn.update(G.neighbors(y))
            meter.spend(len(nn) + 1)
            x_t = set_code(nn) + 1
            chosen.append(x_t)
            return x_t

        return step

    return PunctualStream(make_step, budget, "rival_sands(%s)" % G.description)


# ---------------------------------------------------------------------------
# bounded-palette coloring


def default_ncolor(vertices, adj, n, _memo={}):
    """Exhaustive proper n-coloring of a finite subgraph, colors 0..n-1.

    Deterministic backtracking over the sorted vertex list; memoized per
    (vertex set, edge set, n).  Returns None when no coloring exists.
    """
    verts = tuple(sorted(set(vertices)))
    edges = frozenset(
        (u, w) for u in verts for w in verts if u < w and adj(u, w))
    key = (verts, edges, n)
    if key in _memo:
        return dict(_memo[key]) if _memo[key] is not None else None
    col = {}

    def bt(i):
        if i == len(verts):
            return True
        v = verts[i]
        for c in range(n):
            if all((min(u, v), max(u, v)) not in edges or col[u] != c
                   for u in verts[:i]):
                col[v] = c
                if bt(i + 1):
                    return True
                del col[v]
        return False

    res = dict(col) if bt(0) else None
    _memo[key] = res
    return dict(res) if res is not None else None


def schmerl_color(G: HonestGraph, n, finite_ncolor=default_ncolor,
                  budget=None) -> PunctualStream:
    """Online proper coloring with at most 2n-1 colors, given that every
    finite subgraph is n-colorable (realized by finite_ncolor).

    Vertices are 0, 1, 2, ...; stage s emits the color of s.  Batches color
    the 2-ball around the colored region with an alternating half-palette so
    that the frontier (colored vertices with uncolored neighbors) always sits
    inside {1..n-1} or {n+1..2n-1}; a batch vertex slated for the shared
    pivot color n that still touches uncolored territory is deferred.
    """
    if n < 1:
        raise PreconditionFailed("n must be positive")

    def make_step():
        colors = {}
        state = {"low": True}  # frontier currently inside {1..n-1}?

        def batch(v, meter):
            x_set = set(colors)
            h_set = {v}
            for x in x_set:
                for y in G.neighbors(x):
                    meter.spend(1)
                    h_set.update(G.neighbors(y))
            h_set -= x_set
            meter.spend(len(h_set) + 1)
            base = finite_ncolor(sorted(h_set), G.adjacency, n)
            if base is None:
                raise PromiseViolation(
                    "finite subgraph around %r is not %d-colorable" % (v, n))
            # palette: {n..2n-1} while the frontier is low, {1..n} while high;
            # the pivot n is shared, so v's class is steered off it
            palette = list(range(n, 2 * n)) if state["low"] else list(range(1, n + 1))
            pivot_slot = palette.index(n)
            perm = list(range(n))
            if perm[base[v]] == pivot_slot:
                other = (pivot_slot + 1) % n
                perm[base[v]], perm[other] = perm[other], perm[base[v]]
            d = {w: palette[perm[base[w]]] for w in h_set}
            deferred = set()
            for w in h_set:
                if d[w] == n:
                    meter.spend(1)
                    if any(u not in x_set and u not in h_set
                           for u in G.neighbors(w) if u != w):
                        deferred.add(w)
            for w in h_set - deferred:
                colors[w] = d[w]
            state["low"] = not state["low"]
            if v in deferred:
                raise PromiseViolation("pivot steering failed at %r" % (v,))

        def step(t, meter):
            meter.spend(1)
            if n == 1:
                # promise forces an edgeless graph
                if len(G.neighbors(t)) > 1:
                    raise PromiseViolation("1-colorable promise broken at %d" % t)
                colors[t] = 1
                return 1
            if t == 0:
                colors[0] = 1
                return 1
            if t not in colors:
                batch(t, meter)
            return colors[t]

        return step

    return PunctualStream(make_step, budget, "schmerl(%s,n=%d)" % (G.description, n))


# ---------------------------------------------------------------------------
# bipartite matching


def _augment(a, nbr_of, match, visited_b):
    for b in nbr_of(a):
        if b in visited_b:
            continue
        visited_b.add(b)
        if b not in match or _augment(match[b], nbr_of, match, visited_b):
            match[b] = a
            return True
    return False


def hall_finite(inst: BipartiteInstance):
    """Injective matching of a finite left side into its neighborhoods.

    Raises HallViolation with a witness set X (|N(X)| < |X|) when the
    matching condition fails.
    """
    if inst.a_side is None:
        raise PreconditionFailed("finite matching needs an explicit left side")
    return _hall_on(inst.a_side, inst.neighbors)


def _hall_on(a_list, nbr_of):
    match = {}  # b -> a
    for a in a_list:
        visited = set()
        if not _augment(a, nbr_of, match, visited):
            # alternating-reachability witness: a plus the left endpoints of
            # every matched right vertex explored; its neighborhood is exactly
            # the explored right vertices, one short of the witness
            witness = {a} | {match[b] for b in visited if b in match}
            raise HallViolation(witness)
    return {a: b for b, a in match.items()}


def hall_extended(inst: BipartiteInstance, budget=None) -> PunctualStream:
    """Online injective matching for an infinite left side with a surplus
    witness h.

    Stage s emits (a_s, f(a_s)): a_s is the s-th left vertex, matched by
    finite matching inside its radius-2h(s+1) ball in the residual graph.
    Raises PromiseViolation when the ball has no matching (the witness h or
    the honest bundle was wrong).
    """
    if inst.a_enum is None or inst._nbr is None or inst.h is None:
        raise PreconditionFailed("needs a left enumeration, bundle, and witness")

    def make_step():
        matched_a, matched_b = set(), set()

        def step(t, meter):
            a_t = inst.a_enum(t)
            meter.spend(1)
            if a_t in matched_a:
                raise PromiseViolation("left enumeration repeats %r" % (a_t,))
            radius = 2 * inst.h(t + 1)
            # residual ball around a_t: left vertices at even distance
            dist = {a_t: 0}
            q = deque([a_t])
            while q:
                x = q.popleft()
                if dist[x] >= radius:
                    continue
                for y in inst.neighbors(x, meter):
                    if y in matched_a or y in matched_b or y in dist:
                        continue
                    dist[y] = dist[x] + 1
                    q.append(y)
            s_ball = sorted(x for x, d in dist.items() if d % 2 == 0)
            try:
                g = _hall_on(
                    s_ball,
                    lambda a: [y for y in inst.neighbors(a, meter)
                               if y not in matched_b])
            except HallViolation as hv:
                raise PromiseViolation(
                    "ball around %r has no matching: %s" % (a_t, hv)) from hv
            matched_a.add(a_t)
            matched_b.add(g[a_t])
            return (a_t, g[a_t])

        return step

    return PunctualStream(make_step, budget, "hall_extended")


# ---------------------------------------------------------------------------
# connected components with bounded reach


def connected_components(adjacency, reps, reach_bound, universe_bound):
    """Component equivalence decision function from a finite rep list.

    Promise: every vertex reaches some rep by a path of length at most
    reach_bound(v) through vertices below universe_bound.  Reps are merged
    by their own bounded searches; the kept system S is the first subset of
    reps (supersets enumerated first) with pairwise-unconnected members, so
    it holds exactly one rep per component.  Returns f(v, u) -> 0/1;
    raises PromiseViolation(v) when v's search finds no rep.
    """
    reps = list(reps)
    rep_set = set(reps)

    def ball(v, depth):
        dist = {v: 0}
        q = deque([v])
        while q:
            x = q.popleft()
            if dist[x] >= depth:
                continue
            for y in range(universe_bound):
                if y not in dist and (adjacency(x, y) or adjacency(y, x)):
                    dist[y] = dist[x] + 1
                    q.append(y)
        return dist

    # merge reps that see each other within their own bounds
    parent = {r: r for r in reps}

    def find(r):
        while parent[r] != r:
            parent[r] = parent[parent[r]]
            r = parent[r]
        return r

    for r in reps:
        for x in ball(r, reach_bound(r)):
            if x in rep_set:
                parent[find(x)] = find(r)

    classes = {r: find(r) for r in reps}

    def disconnected(subset):
        return all(classes[a] != classes[b]
                   for a, b in itertools.combinations(subset, 2))

    kept = None
    for size in range(len(reps), 0, -1):
        for subset in itertools.combinations(reps, size):
            if disconnected(subset):
                kept = subset
                break
        if kept:
            break

    cache = {}

    def rep_of(v):
        if v not in cache:
            d = ball(v, reach_bound(v))
            hits = sorted(x for x in d if x in rep_set)
            if not hits:
                raise PromiseViolation(v)
            cls = classes[hits[0]]
            (member,) = [s for s in kept if classes[s] == cls]
            cache[v] = member
        return cache[v]

    def f(v, u):
        return 1 if rep_of(v) == rep_of(u) else 0

    f.kept_reps = kept
    return f
