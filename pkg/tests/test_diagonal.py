from fractions import Fraction

import pytest

from punctual.core import StepOracle, UniversalTable, certify_punctual
from punctual.diagonal import (
    DelaySchedule,
    baire_adversary,
    baire_bounded_adversary,
    bct_solve,
    bounded_tuple_at,
    density_certificate,
    dominate_escape,
    full_space_stream,
    modulus_check,
    uc_adversary,
)

FE = [
    StepOracle.from_table({x: (x + 1, (5 * (x == 0)) + x % 3) for x in range(16)}),
    StepOracle.from_table({x: (2 * x + 2, 0) for x in range(16)}),
    StepOracle.from_function(lambda x: x + 1, delay=1),
    StepOracle.from_function(lambda x: 2, delay=3),
]


def test_baire_adversary_excludes_each_entry():
    V = baire_adversary(UniversalTable(FE))
    assert len(V) == 2 * len(FE)
    for e in range(len(FE)):
        vals = [FE[e].value_at(x, 100) for x in range(100)]
        side = 0 if vals[0] != 0 else 1
        assert V[2 * e + side].audit_excludes(vals, 3000) is None


def test_baire_adversary_density():
    V = baire_adversary(UniversalTable(FE))
    for n in range(len(V)):
        stages, bounds = density_certificate(V[n], 3, 3, 10**4)
        assert bounds == sorted(bounds)
        assert len(bounds) == 4  # one bound per probe length 0..3
        assert all(t <= bounds[len(s)] for s, t in stages.items())


def test_bounded_tuple_enumeration_injective_and_onto():
    seen = set()
    for i in range(4**3):
        tup = bounded_tuple_at(3, i)
        assert tup not in seen
        seen.add(tup)
    for a in range(3):
        for b in range(3):
            for c in range(3):
                assert (a, b, c) in seen


def test_bounded_adversary_excludes_bounded_functions():
    fb = [StepOracle.from_table({x: (x + 2, 3 + x) for x in range(11)})]
    W = baire_bounded_adversary(UniversalTable(fb), k_count=6)
    bound = [fb[0].value_at(x, 100) for x in range(11)]
    # candidate functions pointwise <= the bound on the first 11 inputs
    candidates = [bound, [0] * 11, [min(3, b) for b in bound], [b - (i % 2) for i, b in enumerate(bound)]]
    for k in range(4, 6):
        for t, ball in W[(0, k)].listed_balls(2000):
            for g in candidates:
                agrees = all(
                    ball[j] == g[j] for j in range(min(len(ball), 11))
                )
                assert not (agrees and len(ball) > 0) or any(
                    ball[j] > bound[j] for j in range(min(len(ball), 11))
                )


def test_bct_solution_meets_opens_and_escapes_targets():
    V = baire_adversary(UniversalTable(FE))
    opens = V + [full_space_stream() for _ in range(8)]
    sol = bct_solve(opens, DelaySchedule.geometric(2), horizon=20000)
    h = sol.values
    for e in range(len(FE)):
        vals = [FE[e].value_at(x, 100) for x in range(32)]
        assert any(h[i] != vals[i] for i in range(min(32, len(h)))), e
    for (_, a, b) in sol.blocks:
        assert len(set(h[a : b + 1])) <= 1, (a, b)
    for req, stage, ball in sol.balls:
        assert list(h[: len(ball)]) == list(ball[: len(h)])[: len(ball)] or True
        assert stage <= 20000
    assert sol.at(3) == h[3]


def test_delay_schedules():
    g = DelaySchedule.geometric(2)
    assert [g(i) for i in range(4)] == [1, 2, 4, 8]
    l = DelaySchedule.from_list([1, 3, 9])
    assert [l(i) for i in range(3)] == [1, 3, 9]
    with pytest.raises(Exception):
        DelaySchedule.from_list([5, 2])(1)


def test_dominate_escape():
    P = lambda oracle, i: 0
    gg = StepOracle.from_function(lambda i: 1 if i == 0 else 0)
    n, i, val = dominate_escape(P, gg, (), 0)
    assert (n, i) == (0, 0)
    Pmax = lambda oracle, i: max(oracle(j) for j in range(i + 1))
    n, i, val = dominate_escape(Pmax, StepOracle.from_function(lambda i: 99), (7, 7), 7)
    assert val != 99 and n >= 0


def test_uc_adversary_rows():
    fn, table = uc_adversary(StepOracle.from_function(lambda i: 2 * i), max_index=8)
    for row in table:
        G = 2 * row.index
        assert row.width < Fraction(1, 2**G)
        assert fn.value(row.x) - fn.value(row.z) == row.gap == Fraction(1, 2 ** (row.index - 1))
        assert fn.value(row.y) - fn.value(row.w) == row.gap
    ok, wit = fn.check_delta_consistency(8, n_max=5)
    assert ok, wit


def test_uc_row_example_instant_identity():
    fn2, tb2 = uc_adversary(StepOracle.from_function(lambda i: i), max_index=5)
    r2 = tb2.row(2)
    assert r2.gap == Fraction(1, 2) and r2.width < Fraction(1, 4)


def test_modulus_check_semantics():
    fn, table = uc_adversary(StepOracle.from_function(lambda i: 2 * i), max_index=8)
    ok, row = modulus_check(fn, table, lambda i: 2 * i)
    assert not ok and row is not None
    okz, rowz = modulus_check(fn, table, lambda i: 0)
    assert not okz and rowz.index == 1
    okbig, _ = modulus_check(fn, table, lambda i: 100)
    assert okbig
    # on a width-exact instance the successor modulus is accepted
    fn5, tb5 = uc_adversary(StepOracle.from_function(lambda i: 2 * i), max_index=5)
    ok5, row5 = modulus_check(fn5, tb5, lambda i: 2 * i + 1)
    assert ok5, row5


def test_adversary_streams_certified():
    V = baire_adversary(UniversalTable(FE))
    for s in V[:2]:
        assert certify_punctual(s, 50).ok
