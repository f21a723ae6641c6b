from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from digitdyn import lines as L
from digitdyn.core import Cycle, enumerate_cycles, step

SEVEN = Cycle((50, 34, 20, 26, 122, 68, 80), 15)


def _line(b, pairs_and_slopes, lam, prov=L.FIRST):
    pt = L.VarietyPoint(b, tuple(p for p, _ in pairs_and_slopes))
    return L.IntegerLine(pt, lam, tuple(s for _, s in pairs_and_slopes), prov)


def test_first_line_examples():
    f = L.first_line(Cycle((2, 4), 3))
    assert f.lam == 10 and f.point.pairs == ((2, 0), (1, 1)) and f.slopes == ((6, 2), (2, 4))
    for b0 in (2, 7, 30):
        f = L.first_line(Cycle((1,), b0))
        assert f.lam == b0 * b0 + 1 and f.slopes == ((b0, 1),)
    assert L.first_line(SEVEN).lam == 226
    with pytest.raises(ValueError):
        L.first_line(Cycle((4, 16, 37, 58, 89, 145, 42, 20), 10))


def test_reduce_examples():
    r = L.reduce_line(L.first_line(Cycle((2, 4), 3)))
    assert r.lam == 5 and r.slopes == ((3, 1), (1, 2)) and r.reduced
    c = L.propagate(r, 1)
    assert c.base == 8 and c.members == (13, 26)
    r = L.reduce_line(L.first_line(SEVEN))
    assert r.lam == 113
    assert ((5, 3), (36, 25)) in zip(r.point.pairs, r.slopes)
    # g = 1: a cycle containing a member coprime to b0^2+1 is unchanged
    f = L.first_line(Cycle((20,), 8).__class__((52,), 8))
    assert math.gcd(65, 52) == 13 and L.reduce_line(f).lam == 5
    c = enumerate_cycles(5).propagating(1)
    for x in c:
        f = L.first_line(x)
        if math.gcd(26, *x.members) == 1:
            assert L.reduce_line(f) == f


def test_propagate_examples():
    r = L.reduce_line(L.first_line(SEVEN))
    assert L.propagate(r, 0) == SEVEN
    c = L.propagate(r, 2553)
    assert c.base == 288504 and c.length == 7 and c.propagating and c.verify()


def test_propagate_rejects_bad_line():
    f = L.first_line(Cycle((2, 4), 3))
    bad = L.IntegerLine(f.point, f.lam, ((6, 2), (2, 5)), L.FIRST)
    with pytest.raises(L.PropagationError):
        L.propagate(bad, 1)


def test_v1_examples():
    a, b = L.v1_lines(8, 4, 2)
    assert (a.lam, b.lam) == (13, 5)
    assert a.on_variety() and b.on_variety()
    assert a.same_line_as(L.first_line(Cycle((20,), 8)))
    a, b = L.v1_lines(3, 2, 1)
    assert (a.lam, b.lam) == (2, 5)
    for x, y in ((1, 0), (0, 0)):
        with pytest.raises(ValueError):
            L.v1_lines(8, x, y)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=2, max_value=400))
def test_v1_lines_identically_on_variety(b):
    from digitdyn.onecycle import enumerate_1cycles

    for c in enumerate_1cycles(b):
        if c.trivial:
            continue
        a, s = L.v1_lines(b, c.x, c.y)
        assert a.lam == (b * b + 1) // c.d and s.lam == c.d
        assert a.on_variety(range(-3, 6)) and s.on_variety(range(-3, 6))
        assert not a.same_line_as(s)


def test_v2_examples():
    line = L.v2_second_line(8, 2, 3, 5, 1)
    assert str(line) == "b=17t+8; x1=3t+2, y1=5t+3; x2=9t+5, y2=2t+1"
    line = L.v2_second_line(24, 16, 6, 4, 12)
    assert line.lam == 53 and line.slopes == ((34, 13), (8, 25))
    assert line.provenance == L.V2_SECOND and line.content == 1


def test_first_line_root_for_deflation():
    f = L.first_line(L.VarietyPoint(8, ((2, 3), (5, 1))))
    assert [Fraction(s, f.lam) for pair in f.slopes for s in pair] == [Fraction(1, 5), Fraction(2, 5),
                                                                     Fraction(3, 5), Fraction(1, 5)]


def test_evaluate_D():
    assert L.evaluate_D(8, 2, 3, 5, 1) > 0
    assert L.evaluate_D(24, 16, 6, 4, 12) > 0
    with pytest.raises(ValueError):
        L.evaluate_D(8, 2, 3, 0, 0)


def _prop_two_cycles(max_b):
    out = []
    for b in range(2, max_b + 1):
        out += enumerate_cycles(b).propagating(2)
    return out


@pytest.fixture(scope="module")
def two_cycles():
    return _prop_two_cycles(150)


def test_v2_random_sample(two_cycles):
    rng = random.Random(7)
    for c in rng.sample(two_cycles, 100):
        line = L.second_line_for_cycle(c)
        first = L.first_line(c)
        assert line.on_variety() and line.content == 1 and line.lam > 0
        assert not line.same_line_as(first)


def test_v2_second_line_propagates(two_cycles):
    for c in two_cycles[:60]:
        line = L.second_line_for_cycle(c)
        if L.certifies_propagation(line):
            for t in (1, 2, 5):
                assert L.propagate(line, t).propagating


def test_rational_roots():
    assert L.rational_roots([6, -5, 1]) == [2, 3]
    assert L.rational_roots([Fraction(-1, 4), 0, 1]) == [Fraction(-1, 2), Fraction(1, 2)]
    assert L.rational_roots([1, 0, 1]) == []
    assert L.rational_roots([-2, 0, 1]) == []


@given(st.lists(st.fractions(min_value=-50, max_value=50, max_denominator=12), min_size=1, max_size=4))
@settings(deadline=None)
def test_rational_roots_recovers_planted(roots):
    p = [Fraction(1)]
    for r in roots:
        p = [Fraction(0)] + p
        for i in range(len(p) - 1):
            p[i] -= r * p[i + 1]
    assert L.rational_roots(p) == sorted(set(roots))


def test_gcd_lemma_examples():
    assert L.gcd_lemma_check(17, 8) and L.gcd_lemma_check(53, 24)
    m, w = L.compose(17, 8, 53, 24)
    assert m == 901 and w % 901 == 6808 % 901
    assert L.compose(17, 8, 53, 24, 400, 128) == (901, 6808)
    with pytest.raises(ValueError):
        L.compose(4, 1, 6, 2)


def test_gcd_lemma_brute_force():
    rng = random.Random(3)
    for _ in range(200):
        c, d = rng.randint(-1000, 1000), rng.randint(-1000, 1000)
        g = 0
        for x in range(1001):
            g = math.gcd(g, (c * x + d) ** 2 + 1)
            if g == 1:
                break
        assert (g == 1) == L.gcd_lemma_check(c, d)


def test_composed_values_coprime():
    m, w = L.compose(17, 8, 53, 24)
    for t in range(50):
        b = w + m * t
        assert math.gcd(b * b + 1, 17 * 53) == 1
        assert (b - 8) % 17 == 0 and (b - 24) % 53 == 0


def test_roundtrip_dict():
    line = L.v2_second_line(8, 2, 3, 5, 1)
    assert L.IntegerLine.from_dict(line.to_dict()) == line
