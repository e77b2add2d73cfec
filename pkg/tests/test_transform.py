import random
from fractions import Fraction

import pytest

from punctual.core import NOT_YET, Done, StepOracle, certify_punctual, prime
from punctual.errors import (
    InstanceInconsistent,
    PreconditionFailed,
    PromiseViolation,
    ZeroElement,
)
from punctual.transform import (
    ColoringInstance,
    baer_decode,
    baer_decode_set,
    baer_encode,
    cauchy_punctualize,
    coh_punctualize,
    covers_closed,
    delta01_to_tree,
    delta01_unique_path,
    dyadic_interval,
    hb_to_wkl,
    heine_borel_punctualize,
    heine_borel_stream,
    increasing_tuples,
    ivt_punctualize,
    ivt_stream,
    pruned_path,
    ramsey_punctualize,
    string_at,
    string_index,
    tree_punctualize,
    tuple_at,
    wkl_to_hb,
)

rng = random.Random(202)


def test_string_enumeration():
    assert [string_at(i) for i in range(7)] == ["", "0", "1", "00", "01", "10", "11"]
    for i in range(64):
        assert string_index(string_at(i)) == i


def test_tuple_at_matches_colex():
    for n in (1, 2, 3):
        tups = increasing_tuples(9, n)
        for i, t in enumerate(tups):
            assert tuple_at(i, n) == t


# --- tree transformer


def _random_tree_oracle(rng):
    """Oracle tree: prefix-closed random subtree of 2^<=6, delayed reveal."""
    members = {""}
    frontier = [""]
    for _ in range(6):
        nxt = []
        for s in frontier:
            for b in "01":
                if rng.random() < 0.8:
                    members.add(s + b)
                    nxt.append(s + b)
        frontier = nxt
    delays = {}

    def ev(sigma, t):
        d = delays.setdefault(sigma, rng.randrange(4))
        return Done(sigma in members) if t >= d else NOT_YET

    return StepOracle(ev, "rand-tree"), members


def test_tree_punctualize_contains_oracle_tree():
    for _ in range(10):
        T, members = _random_tree_oracle(rng)
        PT = tree_punctualize(T)
        # every oracle member stays in; membership is prefix-closed
        for s in members:
            assert PT.member(s)
        for i in range(64):
            s = string_at(i)
            if PT.member(s):
                assert all(PT.member(s[:j]) for j in range(len(s)))
    st = PT.stream()
    vals = st.prefix(32)
    assert all(vals[i][0] == string_at(i) for i in range(32))
    assert certify_punctual(st, 32).ok


def test_tree_punctualize_eventually_agrees():
    # with delays bounded by 3, strings of length >= 4 match the oracle tree
    T = StepOracle.from_function(lambda s: "11" not in s, delay=3)
    PT = tree_punctualize(T)
    for i in range(130):
        s = string_at(i)
        if len(s) >= 4:
            assert PT.member(s) == all("11" not in s[:j] for j in range(len(s) + 1))


def test_pruned_path():
    assert pruned_path(lambda p: all(b == 0 for b in p[:-1]) and p[-1] <= 1, 5) == [0] * 5
    assert pruned_path(lambda p: all(b == 1 for b in p), 4) == [1] * 4
    with pytest.raises(PromiseViolation):
        pruned_path(lambda p: False, 1)


# --- cauchy transformer


def test_cauchy_punctualize_padding_and_limit():
    seq = ["", "1", "10", "101", "1011"]
    rho = StepOracle.from_table({n: (3 * n + 2, seq[n]) for n in range(5)})
    st = cauchy_punctualize(rho)
    vals = st.prefix(30)
    for t, v in enumerate(vals):
        assert len(v) == t
    # final emitted strings extend the oracle limit
    assert vals[-1].startswith("1011")
    assert certify_punctual(st, 30).ok


# --- ramsey transformer


def _delayed_coloring(rng, arity, colors, top, max_delay):
    tbl = {}
    for tup in increasing_tuples(top, arity):
        tbl[tup] = (rng.randrange(max_delay), rng.randrange(colors))
    return ColoringInstance(arity, colors, StepOracle.from_table(tbl, "coloring"))


def test_ramsey_punctualize_decodes_homogeneous_sets():
    for _ in range(8):
        inst = _delayed_coloring(rng, 2, 2, 30, 6)
        R = ramsey_punctualize(inst, 200)
        p = R.p
        assert all(p[i] <= p[i + 1] for i in range(len(p) - 1))
        # pick Y homogeneous for c_hat with distinct p-values, brute force
        distinct = []
        for x in range(200):
            if not distinct or p[x] > p[distinct[-1]]:
                distinct.append(x)
        by_color = {}
        base = distinct[0]
        for x in distinct[1:]:
            by_color.setdefault(R.c_hat((base, x)), []).append(x)
        col, Y = max(by_color.items(), key=lambda kv: len(kv[1]))
        Y = [base] + Y
        dec = R.decode(Y)
        assert len(dec) == len(Y)
        for a, b in zip(dec, dec[1:]):
            assert inst.oracle.value_at((a, b) if a < b else (b, a), 10**4) is not None
    assert certify_punctual(R.p_stream(), 100).ok
    assert certify_punctual(R.c_hat_stream(), 100).ok


def test_ramsey_duplicate_p_gets_color_zero():
    inst = _delayed_coloring(rng, 2, 3, 10, 5)
    R = ramsey_punctualize(inst, 60)
    for x in range(59):
        if R.p[x] == R.p[x + 1]:
            assert R.c_hat((x, x + 1)) == 0
            break


def test_coloring_instance_validation():
    with pytest.raises(PreconditionFailed):
        ColoringInstance(0, 2, StepOracle.never())
    with pytest.raises(PreconditionFailed):
        ColoringInstance(2, 1, StepOracle.never())


# --- coh transformer


def test_coh_punctualize_decode():
    seq = ["0", "01", "011", "0110"]
    rho = StepOracle.from_table({n: (4 * n + 1, seq[n]) for n in range(4)})
    C = coh_punctualize(rho, 40)
    vals = C.stream.prefix(40)
    assert all(len(vals[t]) == t for t in range(40))
    G_hat = [5, 20, 39]
    idx = C.decode(G_hat)
    assert idx == sorted(idx)
    for j, n in zip(G_hat, idx):
        assert vals[j].startswith(seq[n])
    assert certify_punctual(C.stream, 40).ok


# --- ivt transformer


def _sign_oracle(root, delay):
    # endpoint signs must be decided at stage 0
    def f(x):
        return -1 if x < root else 1

    d = delay if callable(delay) else (lambda x, _d=delay: _d)
    return StepOracle.from_function(
        f, delay=lambda x: 0 if x in (0, 1) else d(x), description="sign"
    )


def test_ivt_punctualize_localizes_root():
    for _ in range(10):
        root = Fraction(rng.randrange(1, 255), 256)
        X = _sign_oracle(root, delay=rng.randrange(3))
        out = ivt_punctualize(X, 40)
        a, b = out.final_interval
        assert a <= root <= b
        assert b - a <= Fraction(1, 2**30)
        lo, hi = out.zero_band()
        assert lo <= out.decode_zero() <= hi
        ok, wit = out.presentation.check_delta_consistency(8)
        assert ok, wit
        ok, wit = out.presentation.check_fast_cauchy(6, 20)
        assert ok, wit


def test_ivt_stream_certified():
    X = _sign_oracle(Fraction(1, 3), delay=2)
    st = ivt_stream(X)
    vals = st.prefix(25)
    for (a0, b0), (a1, b1) in zip(vals, vals[1:]):
        assert a0 <= a1 <= b1 <= b0
    assert certify_punctual(st, 25).ok


def test_ivt_requires_sign_change():
    with pytest.raises(PreconditionFailed):
        ivt_punctualize(StepOracle.from_function(lambda x: 1), 10)


# --- heine-borel transformer


def test_covers_closed():
    assert covers_closed([(Fraction(-1, 10), Fraction(6, 10)), (Fraction(5, 10), Fraction(11, 10))], 0, 1)
    assert not covers_closed([(Fraction(0), Fraction(1))], 0, 1)  # endpoints open
    assert not covers_closed(
        [(Fraction(-1), Fraction(1, 2)), (Fraction(1, 2), Fraction(2))], 0, 1
    )
    assert covers_closed([], 1, 0)


def test_heine_borel_punctualize_preserves_cover():
    ivs = [
        (Fraction(-1, 8), Fraction(3, 8)),
        (Fraction(1, 4), Fraction(3, 4)),
        (Fraction(5, 8), Fraction(9, 8)),
    ]
    I = StepOracle.from_table({n: (5 * n + 2, ivs[n]) for n in range(3)})
    cover = heine_borel_punctualize(I, 30)
    nonempty = [iv for iv in cover.intervals if iv is not None]
    assert nonempty == ivs
    assert covers_closed(cover.intervals, 0, 1)
    assert cover.union_contains(Fraction(1, 2))
    assert not cover.union_contains(Fraction(1, 2), t=2)
    assert certify_punctual(heine_borel_stream(I), 30).ok


# --- baer coding


def test_baer_roundtrip():
    S = [0, 3, 5]
    G = baer_encode(S)
    assert G.contains(Fraction(1, 2 * 7 * 7 * 13))
    assert not G.contains(Fraction(1, 3))
    assert baer_decode_set(G, 1, 8) == S
    got = baer_decode(G, 1, 50)
    assert all(G.divides(m, 1) for m in got)
    assert prime(3) in got and prime(1) not in got
    # decoding a non-unit element differs only at numerator primes
    assert set(baer_decode_set(G, 6, 8)) ^ set(S) <= {0, 1}
    with pytest.raises(ZeroElement):
        baer_decode(G, 0, 5)
    with pytest.raises(ZeroElement):
        baer_decode_set(G, 0, 5)


# --- delta01 and WKL reductions (small scale; full scale in acceptance)


def test_delta01_unique_path_recovery():
    truth = [1, 0, 1, 1, 0, 0, 1, 0]
    phi = lambda n, x: n < 8 and truth[n] == 1 and x == n + 2
    psi = lambda n, x: n < 8 and truth[n] == 0 and x == 2 * n + 1
    T = delta01_to_tree(phi, psi, 20)
    want = "".join(map(str, truth))
    assert delta01_unique_path(phi, 8, 20) == want
    # witnesses appear by 2n+1, so extendibility to depth 17 prunes dead bits
    path = "".join(
        str(b) for b in pruned_path(lambda p: T.extendible("".join(map(str, p)), 17), 8)
    )
    assert path == want
    with pytest.raises(InstanceInconsistent):
        delta01_to_tree(lambda n, x: n == 0 and x == 1, lambda n, x: n == 0 and x == 2, 5)


def test_hb_to_wkl_uncovered_point():
    # cover everything except a neighborhood of 1/3
    cover = heine_borel_punctualize(
        StepOracle.from_table(
            {
                0: (1, (Fraction(-1, 8), Fraction(21, 64))),
                1: (3, (Fraction(22, 64), Fraction(9, 8))),
            }
        ),
        16,
    )
    red = hb_to_wkl(cover)
    T = red.tree()
    path = "".join(str(b) for b in pruned_path(lambda p: T.member("".join(map(str, p))), 8))
    lo, hi = dyadic_interval(path)
    assert not covers_closed(cover.intervals, lo, hi)
    mids = red.decode(path)
    for m0, m1 in zip(mids, mids[1:]):
        assert abs(m1 - m0) <= Fraction(1, 2 ** mids.index(m0))


def test_wkl_to_hb_roundtrip():
    from punctual.transform import PunctualTree

    T = PunctualTree(lambda s, meter=None: "1" not in s or s.index("1") >= 2, "shift")
    red = wkl_to_hb(T, 64)
    # surviving reals decode to paths of the tree
    surv = [
        Fraction(x, 3**4)
        for x in range(3**4 + 1)
        if not red.cover.union_contains(Fraction(x, 3**4))
    ]
    assert surv
    for r in surv:
        bits = red.decode(r, 4)
        assert T.member(bits)
