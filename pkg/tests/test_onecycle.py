from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from digitdyn.core import enumerate_cycles, step
from digitdyn.onecycle import (
    ConsistencyError,
    OneCycle,
    count_1cycles,
    decompose_1cycle,
    dual_1cycle,
    enumerate_1cycles,
)


def test_counts():
    assert count_1cycles(2) == 1
    assert count_1cycles(8) == 3
    assert count_1cycles(3) == 3
    assert count_1cycles(288504) == 47


def test_enumerate_examples():
    assert [c.n for c in enumerate_1cycles(3)] == [1, 5, 8]
    assert [c.n for c in enumerate_1cycles(8)] == [1, 20, 52]
    assert [c.n for c in enumerate_1cycles(10)] == [1]


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=150))
def test_enumerate_matches_census(b):
    fixed = [c.members[0] for c in enumerate_cycles(b).cycles if c.length == 1]
    assert [c.n for c in enumerate_1cycles(b)] == fixed


def test_dual_examples():
    c = OneCycle(8, 4, 2)
    d = dual_1cycle(c)
    assert (d.n, d.x, d.y) == (52, 4, 6)
    assert c.d == 5 and d.d == 13
    assert dual_1cycle(d) == c
    c = OneCycle(3, 2, 1)
    d = dual_1cycle(c)
    assert d.n == 8 and c.d * d.d == 10 and (c.d, d.d) == (5, 2)
    with pytest.raises(ValueError):
        dual_1cycle(OneCycle(8, 1, 0))


def test_decompose_examples():
    dec = decompose_1cycle(OneCycle(8, 4, 2))
    assert (dec.g, dec.g_dual, dec.h, dec.h_dual) == (2, 2, 1, 3)
    dec = decompose_1cycle(OneCycle(3, 2, 1))
    assert (dec.g, dec.g_dual, dec.h, dec.h_dual) == (1, 2, 1, 1)
    dec = decompose_1cycle(OneCycle(3, 2, 2))
    assert (dec.g, dec.g_dual, dec.h, dec.h_dual) == (2, 1, 1, 1)


def test_invalid_cycle_rejected():
    with pytest.raises((ValueError, ConsistencyError)):
        OneCycle(8, 4, 3)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=2, max_value=2000))
def test_structure_identities(b):
    cs = enumerate_1cycles(b)
    assert len(cs) == count_1cycles(b)
    for c in cs:
        assert step(c.n, b) == c.n
        if c.trivial:
            continue
        d = dual_1cycle(c)
        dec = decompose_1cycle(c)
        assert c.d > 1 and d.d > 1
        assert c.d * d.d == b * b + 1
        assert c.n * d.n == (b * b + 1) * c.x**2
        assert c.n != d.n
        assert c.x == dec.g * dec.g_dual and c.y == dec.g * dec.h
        assert b - c.y == dec.g_dual * dec.h_dual and c.x - 1 == dec.h * dec.h_dual
        assert c.d == c.n // dec.g**2 and d.d == d.n // dec.g_dual**2


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=2, max_value=2000))
def test_one_cycles_are_propagating(b):
    from digitdyn.core import Cycle

    for c in enumerate_1cycles(b):
        assert Cycle((c.n,), b).propagating


def test_few_one_cycles_require_prime():
    # a base with at least two non-trivial fixed points has at least three cycles
    from digitdyn.arith import is_prime

    for b in range(2, 2001):
        if len(enumerate_1cycles(b)) >= 3:
            assert not is_prime(b * b + 1)
