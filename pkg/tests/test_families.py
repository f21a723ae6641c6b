from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from digitdyn import families as F
from digitdyn.arith import divisors
from digitdyn.core import Cycle, PowerMap, TableMap, enumerate_cycles, step


def test_cubic_3k1_example():
    cycles = F.instantiate_family("cubic-3k+1", 1)
    assert Cycle((35,), 4, PowerMap(3)) in cycles
    assert step(35, 4, 3) == 35


SINGLE = [f.id for f in F.FAMILIES.values() if len(f.params) == 1]


@pytest.mark.parametrize("fid", SINGLE)
def test_single_parameter_families(fid):
    lo = F.FAMILIES[fid].minimums[0]
    for k in range(lo, lo + 300):
        for c in F.instantiate_family(fid, k):
            assert c.verify()


@pytest.mark.parametrize("fid", ["power-c^(m-1)", "power-2c^(m-1)-1", "power-c(c-1)", "power-c(c+1)"])
def test_power_families(fid):
    lo_m, lo_c = F.FAMILIES[fid].minimums
    for m in range(lo_m, 8):
        if fid == "power-c(c+1)" and m % 2 == 0:
            with pytest.raises(ValueError):
                F.instantiate_family(fid, m, 2)
            continue
        for c in range(lo_c, 60):
            F.instantiate_family(fid, m, c)


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("ell", [2, 3, 4, 5])
@pytest.mark.parametrize("c", [2, 3])
def test_tower_has_exact_length(m, ell, c):
    (cyc,) = F.instantiate_family("tower", m, ell, c)
    assert cyc.length == ell and cyc.base == c ** (m**ell - 1)


def test_prime_order():
    from digitdyn.arith import multiplicative_order, primes_up_to

    for m in (2, 3, 5):
        for p in primes_up_to(40):
            if p <= m:
                continue
            for c in (2, 3, 7):
                (cyc,) = F.instantiate_family("prime-order", m, p, c)
                assert cyc.length == multiplicative_order(m, p)


def test_square_two_cycle():
    for m in (2, 3, 4):
        for c in range(2, 30):
            (cyc,) = F.instantiate_family("square-2cycle", m, c)
            assert set(cyc.members) == {c**m, c ** (m * m)}


def test_doubling_examples():
    (c,) = F.instantiate_family("doubling", 3, 1, 1)
    assert c.base == 15 and c.members == (2, 4, 16) and c.propagating
    (c,) = F.instantiate_family("doubling", 4, 1, 1)
    assert c.base == 255 and c.members == (2, 4, 16, 256)
    with pytest.raises(F.FamilyError):
        F.instantiate_family("doubling", 2, 2, 3)
    with pytest.raises(ValueError):
        F.instantiate_family("doubling", 2, 2, 4)


def test_cubic_curves_corrected():
    b, x, y, u, v = F.cubic_2cycle_curve_a(1)
    assert (b, x, y, u, v) == (31, 4, 1, 3, 2)
    assert step(35, 31, 3) == 65 and step(65, 31, 3) == 35
    for curve in (F.cubic_2cycle_curve_a, F.cubic_2cycle_curve_b):
        for t in range(0, 200):
            b, x, y, u, v = curve(t)
            assert x**3 + y**3 == u + b * v and u**3 + v**3 == x + b * y


def test_cubic_curves_with_u_linear_in_t_fail():
    # the variants u(t)=t and u(t)=t+1 miss the defining equations
    for t in range(1, 20):
        b = 9 * t * t + 15 * t + 7
        x, y, u, v = 2 * t + 2, t, t, t + 1
        assert x**3 + y**3 != u + b * v
        b = 9 * t * t + 21 * t + 13
        x, y, u, v = 2 * t + 3, t + 1, t + 1, t + 2
        assert x**3 + y**3 != u + b * v


def test_instance_rejects_out_of_range():
    with pytest.raises(ValueError):
        F.instantiate_family("cubic-k^2", 1)
    with pytest.raises(TypeError):
        F.instantiate_family("tower", 2, 3)


def test_compute_N_examples():
    assert all(F.compute_N(2, b) == 2 for b in range(3, 50))
    assert F.compute_N(3, 3) == 6
    assert F.compute_N(3, 4) == 6


def test_min_cycles_examples():
    assert F.min_cycles(3, 4) == 3
    assert F.min_cycles(2, 9) == 2
    # prime m >= 5 and b = mk + 1: divisible by m
    assert F.min_cycles(5, 11) % 5 == 0
    assert F.min_cycles(5, 11) == 10
    ok, found = F.census_lower_bound_holds(5, 11)
    assert ok and found >= 10
    for m in (5, 7, 11):
        for k in range(1, 30):
            assert F.min_cycles(m, m * k + 1) % m == 0


@pytest.mark.parametrize("m", [2, 3])
def test_min_cycles_against_census(m):
    for b in range(2, 80 if m == 2 else 25):
        assert F.min_cycles(m, b) <= enumerate_cycles(b, m).total


def test_congruence_examples():
    assert len(F.congruence_certificate(3, 4, 3).cycles) == 3
    cert = F.congruence_certificate(2, 3, 2)
    assert cert.cycles[0].members == (1,) and all(x % 2 == 0 for x in cert.cycles[1].members)
    assert len(F.congruence_certificate(7, 10, 1).cycles) == 1
    with pytest.raises(ValueError):
        F.congruence_certificate(2, 10, 3 * 7)
    with pytest.raises(ValueError):
        F.congruence_certificate(2, 7, 3)  # 3 | 6 but 2^2 != 2 mod 3


def test_congruence_table_map():
    phi = TableMap(tuple(d + 4 * ((d * 7) % 3) for d in range(5)))
    cert = F.congruence_certificate(phi, 5, 4)
    assert len(set(cert.cycles)) == 4


def test_congruence_random_triples():
    rng = random.Random(11)
    done = 0
    while done < 500:
        m, b = rng.randint(2, 7), rng.randint(2, 500)
        a = rng.choice(divisors(F.min_cycles(m, b)))
        for _ in range(100):
            n = rng.randint(0, 10**12)
            assert (step(n, b, m) - n) % a == 0
        done += 1


@pytest.mark.parametrize("k", [1, 2, 30])
def test_five_cycles(k):
    cycles = F.five_cycles(k)
    assert len(set(cycles)) == 5
    census = set(enumerate_cycles(3 * k + 1, 3).cycles)
    assert set(cycles) <= census
