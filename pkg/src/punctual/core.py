"""Clocked computation model and finite-set calculus.

Step oracles are stage-indexed, monotone partial computations.  Punctual
streams are total per-stage emitters whose work is certified against an
explicit fuel budget.  Finite sets carry a dual representation: a bounded
characteristic vector and a prime-exponent code.
"""

from __future__ import annotations

import itertools

from .errors import PreconditionFailed, PunctualityViolation

# ---------------------------------------------------------------------------
# step oracles


class NotYet:
    """Sentinel: the oracle has not converged at this stage."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NotYet"


NOT_YET = NotYet()


class Done:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value

    def __eq__(self, other):
        return isinstance(other, Done) and other.value == self.value

    def __hash__(self):
        return hash(("Done", self.value))

    def __repr__(self):
        return "Done(%r)" % (self.value,)


class StepOracle:
    """A stage-indexed approximation of a partial function.

    eval(x, t) returns NOT_YET or Done(v); once Done, every later stage
    must return the same Done (monotonicity is the fixture's obligation,
    audited by tests, not enforced here).
    """

    def __init__(self, eval_fn, description=""):
        self._eval = eval_fn
        self.description = description

    def eval(self, x, t):
        return self._eval(x, t)

    def probe(self, x, t, meter=None):
        """Metered lookup; one fuel unit per single-step advance."""
        if meter is not None:
            meter.spend(1)
        return self._eval(x, t)

    def value_at(self, x, horizon):
        """Full-knowledge lookup used only by oracles/audits, never by streams."""
        for t in range(horizon + 1):
            r = self._eval(x, t)
            if isinstance(r, Done):
                return r.value
        return None

    @classmethod
    def from_function(cls, f, delay=0, description=""):
        """Total function revealed with a convergence delay.

        delay may be a constant or a function of the input.
        """
        d = delay if callable(delay) else (lambda x, _d=delay: _d)

        def ev(x, t):
            return Done(f(x)) if t >= d(x) else NOT_YET

        return cls(ev, description or "from_function")

    @classmethod
    def from_table(cls, records, description="table"):
        """Fixture oracle: records is {x: (t_converge, value)}."""
        tbl = dict(records)

        def ev(x, t):
            if x in tbl and t >= tbl[x][0]:
                return Done(tbl[x][1])
            return NOT_YET

        return cls(ev, description)

    @classmethod
    def never(cls, description="never"):
        return cls(lambda x, t: NOT_YET, description)


class UniversalTable:
    """Finite fixture of step oracles; lookup(e, x, s) is the stage-s
    approximation of entry e at x (None while not converged)."""

    def __init__(self, entries):
        self.entries = list(entries)

    def __len__(self):
        return len(self.entries)

    def lookup(self, e, x, s):
        r = self.entries[e].eval(x, s)
        return r.value if isinstance(r, Done) else None

    def probe(self, e, x, s, meter=None):
        if meter is not None:
            meter.spend(1)
        return self.lookup(e, x, s)


# ---------------------------------------------------------------------------
# fuel and punctual streams


class FuelMeter:
    __slots__ = ("consumed", "limit", "stage", "description")

    def __init__(self, limit, stage=0, description=""):
        self.consumed = 0
        self.limit = limit
        self.stage = stage
        self.description = description

    def spend(self, n=1):
        self.consumed += n
        if self.consumed > self.limit:
            raise PunctualityViolation(self.stage, self.consumed, self.limit, self.description)


def polynomial_budget(c=1000, k=2):
    """budget(t) = c * (t+1)^k, the default punctuality envelope."""

    def budget(t):
        return c * (t + 1) ** k

    budget.c = c
    budget.k = k
    return budget


DEFAULT_BUDGET = polynomial_budget()


class PunctualStream:
    """A total output stream with per-stage fuel accounting.

    make_step() returns a fresh step(t, meter) -> value closure holding all
    mutable state, so any run can be replayed from scratch; emit order is
    t = 0, 1, 2, ...
    """

    def __init__(self, make_step, budget=None, description=""):
        self._make_step = make_step
        self.budget = budget if budget is not None else DEFAULT_BUDGET
        self.description = description

    def clone(self):
        return PunctualStream(self._make_step, self.budget, self.description)

    def run(self, horizon, metered=True):
        """Fresh replay of stages [0, horizon); returns list of (value, fuel)."""
        step = self._make_step()
        out = []
        for t in range(horizon):
            meter = FuelMeter(self.budget(t) if metered else float("inf"), t, self.description)
            v = step(t, meter)
            out.append((v, meter.consumed))
        return out

    def prefix(self, horizon, metered=True):
        return [v for v, _ in self.run(horizon, metered=metered)]

    def emit(self, t):
        return self.prefix(t + 1)[t]

    @classmethod
    def from_emit(cls, emit_fn, budget=None, description="", unit_cost=1):
        """Wrap a pure per-stage function; each call costs unit_cost fuel."""

        def make_step():
            def step(t, meter):
                meter.spend(unit_cost)
                return emit_fn(t)

            return step

        return cls(make_step, budget, description)


def join(f: PunctualStream, g: PunctualStream) -> PunctualStream:
    """Interleaved stream: output(2i) = f(i), output(2i+1) = g(i)."""

    def budget(t):
        i = t // 2
        return f.budget(i) + g.budget(i) + 4

    def make_step():
        fs, gs = f._make_step(), g._make_step()

        def step(t, meter):
            meter.spend(1)
            i, r = divmod(t, 2)
            return fs(i, meter) if r == 0 else gs(i, meter)

        return step

    return PunctualStream(make_step, budget, "join(%s,%s)" % (f.description, g.description))


class Certification:
    def __init__(self, description, horizon, fuel, limits, ok, violation=None):
        self.description = description
        self.horizon = horizon
        self.fuel = fuel
        self.limits = limits
        self.ok = ok
        self.violation = violation

    def __repr__(self):
        return "Certification(%s, horizon=%d, ok=%s)" % (self.description, self.horizon, self.ok)


def certify_punctual(s: PunctualStream, horizon, raise_on_violation=True):
    """Replay s for `horizon` stages; succeed iff fuel(t) <= budget(t) always."""
    if horizon < 1:
        raise PreconditionFailed("horizon must be >= 1")
    step = s._make_step()
    fuel, limits = [], []
    for t in range(horizon):
        limit = s.budget(t)
        meter = FuelMeter(limit, t, s.description)
        try:
            step(t, meter)
        except PunctualityViolation as v:
            if raise_on_violation:
                raise
            fuel.append(meter.consumed)
            limits.append(limit)
            return Certification(s.description, horizon, fuel, limits, False, v)
        fuel.append(meter.consumed)
        limits.append(limit)
    return Certification(s.description, horizon, fuel, limits, True)


# ---------------------------------------------------------------------------
# primes and tuple codes


_PRIMES = [2, 3]


def prime(i):
    """The i-th prime, p_0 = 2."""
    while len(_PRIMES) <= i:
        n = _PRIMES[-1] + 2
        while not all(n % p for p in _PRIMES if p * p <= n):
            n += 2
        _PRIMES.append(n)
    return _PRIMES[i]


def ex(i, x):
    """Max exponent of the i-th prime in x (0 for x <= 1)."""
    if x <= 1:
        return 0
    p, e = prime(i), 0
    while x % p == 0:
        x //= p
        e += 1
    return e


def long_(x):
    """Index of the largest prime divisor of x; 0 when x <= 1."""
    if x <= 1:
        return 0
    best, i = 0, 0
    while x > 1:
        p = prime(i)
        if p * p > x:
            # remaining x is prime
            while prime(best) != x:
                best += 1
            return best
        if x % p == 0:
            best = i
            while x % p == 0:
                x //= p
        i += 1
    return best


def code_tuple(a):
    """code(a_0..a_n) = prod p_i^(a_i+1); always a member of CT."""
    a = tuple(a)
    if not a:
        raise PreconditionFailed("tuple must be non-empty")
    m = 1
    for i, ai in enumerate(a):
        m *= prime(i) ** (ai + 1)
    return m


def decode_tuple(m):
    """Inverse of code_tuple on CT."""
    if not is_code(m):
        raise PreconditionFailed("%d is not a tuple code" % m)
    out = []
    i = 0
    while True:
        e = ex(i, m)
        if e == 0:
            return tuple(out)
        out.append(e - 1)
        i += 1


def is_code(m):
    """m is in CT iff m >= 2 and every prime up to its largest prime divisor divides m."""
    if m < 2:
        return False
    i = 0
    x = m
    while x > 1:
        p = prime(i)
        if x % p:
            return False
        while x % p == 0:
            x //= p
        i += 1
    return True


# ---------------------------------------------------------------------------
# finite sets


class FinSet:
    """Finite subset of N as a trimmed characteristic vector with support bound.

    Canonical form: charvec has no trailing zero (the empty set is the empty
    vector with bound 0).  The prime-exponent code is the tuple code of the
    characteristic vector, so it lies in CT.
    """

    __slots__ = ("charvec", "bound")

    def __init__(self, charvec):
        v = list(charvec)
        while v and v[-1] == 0:
            v.pop()
        self.charvec = tuple(v)
        self.bound = len(v) - 1 if v else 0

    @classmethod
    def from_elements(cls, xs):
        xs = set(xs)
        if not xs:
            return cls(())
        top = max(xs)
        return cls(1 if i in xs else 0 for i in range(top + 1))

    @classmethod
    def from_code(cls, m):
        return cls.from_elements(i for i, a in enumerate(decode_tuple(m)) if a == 1)

    def elements(self):
        return [i for i, b in enumerate(self.charvec) if b]

    def __contains__(self, x):
        return 0 <= x < len(self.charvec) and self.charvec[x] == 1

    def __eq__(self, other):
        return isinstance(other, FinSet) and other.charvec == self.charvec

    def __hash__(self):
        return hash(self.charvec)

    def __repr__(self):
        return "FinSet(%s)" % self.elements()

    def code(self):
        """Prime-exponent code; None for the empty set (CT has no code for it)."""
        if not self.charvec:
            return None
        return code_tuple(self.charvec)

    def union(self, other):
        return FinSet.from_elements(self.elements() + other.elements())

    def intersection(self, other):
        return FinSet.from_elements(x for x in self.elements() if x in other)

    def difference(self, other):
        return FinSet.from_elements(x for x in self.elements() if x not in other)

    def is_subset(self, other):
        return all(x in other for x in self.elements())


def cardinality(S: FinSet) -> int:
    """|S| = sum of the characteristic vector up to the bound."""
    return sum(S.charvec)


def card_witness(S: FinSet):
    """Strictly increasing bijection g: [0, |S|-1] -> S by bounded minimisation."""
    f, d = S.charvec, S.bound
    g = []
    prev = -1
    for _ in range(cardinality(S)):
        y = prev + 1
        while y <= d and f[y] != 1:
            y += 1
        g.append(y)
        prev = y
    return g


def find_missing(S: FinSet, K: FinSet) -> int:
    """Least x in S \\ K; requires |K| < |S|."""
    if cardinality(K) >= cardinality(S):
        raise PreconditionFailed("|S| <= |K|")
    for x in S.elements():
        if x not in K:
            return x
    raise AssertionError("unreachable: cardinality comparison guarantees a witness")


def pair_code(a, b):
    """Cantor pairing, used to represent product sets as sets of naturals."""
    return (a + b) * (a + b + 1) // 2 + b


def product_set(S: FinSet, K: FinSet) -> FinSet:
    return FinSet.from_elements(pair_code(a, b) for a in S.elements() for b in K.elements())


def power_set(S: FinSet, n: int) -> FinSet:
    """S^n as a set of tuple codes."""
    return FinSet.from_elements(
        code_tuple(t) for t in itertools.product(S.elements(), repeat=n)
    )
