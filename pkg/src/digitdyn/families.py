"""Parametric cycle families and lower bounds on the number of cycles of S_{x^m,b}.

Every family instance is rebuilt by iterating S before it is handed out, so a
mistyped formula surfaces as a FamilyError instead of a wrong cycle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .arith import multiplicative_order, primes_up_to, valuation, is_prime
from .core import Cycle, DigitMap, PowerMap, TableMap, as_map, enumerate_cycles, orbit, step


class FamilyError(AssertionError):
    """A family instance failed direct verification."""


def _num(digits, b):
    n = 0
    for d in reversed(digits):
        n = n * b + d
    return n


@dataclass(frozen=True)
class FamilySpec:
    id: str
    m: int | None  # None: exponent is a parameter
    params: tuple[str, ...]
    minimums: tuple[int, ...]
    length: int | None  # None: depends on the parameters
    claim: str
    build: Callable  # params -> (b, m, [(start, length), ...])
    description: str = ""


def _cubic_3k1(k):
    b = 3 * k + 1
    return b, 3, [(_num(d, b), 1) for d in ([2 * k + 1, 0, k + 1], [0, 2 * k + 1, k], [1, 2 * k + 1, k])]


def _cubic_3k2(k):
    b = 3 * k + 2
    return b, 3, [(_num([2 * k + 1, 0, k], b), 1)]


def _cubic_9k3(k):
    b = 9 * k + 3
    return b, 3, [(_num([6 * k + 2, 4 * k + 2, 5 * k + 1], b), 1)]


def _cubic_9k6(k):
    b = 9 * k + 6
    return b, 3, [(_num([6 * k + 4, 2 * k + 1, 7 * k + 5], b), 1)]


def _cubic_730(k):
    b = 9 * (730 * k * k - 1)
    n = _num([27 * k, 3 * k], b)
    assert n == 730 * (3 * k) ** 3
    return b, 3, [(n, 1)]


def _cubic_sq(k):
    b = k * k
    return b, 3, [(_num([0, k], b), 1), (_num([1, k], b), 1)]


def _cubic_sq_3k1(k):
    b = (3 * k + 1) ** 2
    return b, 3, [(_num([2 * k + 1, k + 1], b), 1)]


def _cubic_sq_3k2(k):
    b = (3 * k + 2) ** 2
    return b, 3, [(_num([2 * k + 1, k], b), 1)]


def _cubic_sq_3k(k):
    b = (3 * k) ** 2
    digits = (
        [0, 6 * k * k + k, 3 * k * k + 2 * k],
        [1, 6 * k * k + k, 3 * k * k + 2 * k],
        [0, 6 * k * k - k, 3 * k * k - 2 * k],
        [1, 6 * k * k - k, 3 * k * k - 2 * k],
    )
    return b, 3, [(_num(d, b), 1) for d in digits]


# (b, x, y, u, v) curves on x^3 + y^3 = u + b v, u^3 + v^3 = x + b y.
def cubic_2cycle_curve_a(t):
    return 9 * t * t + 15 * t + 7, 2 * t + 2, t, 2 * t + 1, t + 1


def cubic_2cycle_curve_b(t):
    return 9 * t * t + 21 * t + 13, 2 * t + 3, t + 1, 2 * t + 2, t + 2


def _curve_family(curve):
    def build(t):
        b, x, y, u, v = curve(t)
        if x**3 + y**3 != u + b * v or u**3 + v**3 != x + b * y:
            raise FamilyError(f"curve point {(b, x, y, u, v)} is not on the cubic 2-cycle variety")
        return b, 3, [(x + b * y, 2)]

    return build


def _power_c(m, c):
    b = c ** (m - 1)
    return b, m, [(c**m, 1), (1 + c**m, 1)]


def _power_2c(m, c):
    b = 2 * c ** (m - 1) - 1
    return b, m, [(c + b * c, 1)]


def _power_cminus(m, c):
    b = c * (c ** (m - 1) - 1) // (c - 1) + (c - 1) ** (m - 1)
    return b, m, [(c + b * (c - 1), 1)]


def _power_cplus(m, c):
    if m % 2 == 0:
        raise ValueError("this family needs an odd exponent")
    b = c * (c ** (m - 1) - 1) // (c + 1) + (c + 1) ** (m - 1)
    return b, m, [(c + b * (c + 1), 1)]


def _tower(m, ell, c):
    b = c ** (m**ell - 1)
    return b, m, [(c**m, ell)]


def _prime_order(m, p, c):
    if not is_prime(p) or p <= m:
        raise ValueError("need a prime p > m")
    return c**p, m, [(c**m, multiplicative_order(m, p))]


def _square_2cycle(m, c):
    return c ** (m + 1), m, [(c**m, 2)]


def _doubling(ell, alpha, beta):
    if math.gcd(alpha, beta) != 1:
        raise ValueError("alpha and beta must be coprime")
    if (alpha ** (2**ell) - alpha) % beta:
        raise FamilyError(f"beta={beta} does not divide alpha^(2^ell) - alpha; base is not integral")
    gamma = alpha * alpha + beta * beta
    num = gamma ** (2 ** (ell - 1)) - alpha
    if num % beta:
        raise FamilyError("base is not integral")
    return num // beta, 2, [(gamma, ell)]


FAMILIES: dict[str, FamilySpec] = {
    f.id: f
    for f in [
        FamilySpec("cubic-3k+1", 3, ("k",), (1,), 1, "1-cycle", _cubic_3k1, "b=3k+1: [2k+1,0,k+1], [0,2k+1,k], [1,2k+1,k]"),
        FamilySpec("cubic-3k+2", 3, ("k",), (1,), 1, "1-cycle", _cubic_3k2, "b=3k+2: [2k+1,0,k]"),
        FamilySpec("cubic-9k+3", 3, ("k",), (1,), 1, "1-cycle", _cubic_9k3, "b=9k+3: [6k+2,4k+2,5k+1]"),
        FamilySpec("cubic-9k+6", 3, ("k",), (1,), 1, "1-cycle", _cubic_9k6, "b=9k+6: [6k+4,2k+1,7k+5]"),
        FamilySpec("cubic-9(730k^2-1)", 3, ("k",), (1,), 1, "1-cycle", _cubic_730, "b=9(730k^2-1): [27k,3k]"),
        FamilySpec("cubic-k^2", 3, ("k",), (2,), 1, "1-cycle", _cubic_sq, "b=k^2: [0,k], [1,k]"),
        FamilySpec("cubic-(3k+1)^2", 3, ("k",), (1,), 1, "1-cycle", _cubic_sq_3k1, "b=(3k+1)^2: [2k+1,k+1]"),
        FamilySpec("cubic-(3k+2)^2", 3, ("k",), (1,), 1, "1-cycle", _cubic_sq_3k2, "b=(3k+2)^2: [2k+1,k]"),
        FamilySpec("cubic-(3k)^2", 3, ("k",), (1,), 1, "1-cycle", _cubic_sq_3k, "b=(3k)^2: [0|1, 6k^2+-k, 3k^2+-2k]"),
        FamilySpec("cubic-2cycle-9t^2+15t+7", 3, ("t",), (0,), 2, "2-cycle", _curve_family(cubic_2cycle_curve_a)),
        FamilySpec("cubic-2cycle-9t^2+21t+13", 3, ("t",), (0,), 2, "2-cycle", _curve_family(cubic_2cycle_curve_b)),
        FamilySpec("power-c^(m-1)", None, ("m", "c"), (3, 2), 1, "1-cycle", _power_c, "b=c^(m-1): [c^m], [1+c^m]"),
        FamilySpec("power-2c^(m-1)-1", None, ("m", "c"), (2, 2), 1, "1-cycle", _power_2c, "b=2c^(m-1)-1: [c+bc]"),
        FamilySpec("power-c(c-1)", None, ("m", "c"), (2, 2), 1, "1-cycle", _power_cminus),
        FamilySpec("power-c(c+1)", None, ("m", "c"), (3, 2), 1, "1-cycle", _power_cplus),
        FamilySpec("tower", None, ("m", "ell", "c"), (2, 2, 2), None, "l-cycle", _tower, "b=c^(m^l-1): orbit of c^m"),
        FamilySpec("prime-order", None, ("m", "p", "c"), (2, 3, 2), None, "l-cycle", _prime_order, "b=c^p: orbit of c^m"),
        FamilySpec("square-2cycle", None, ("m", "c"), (2, 2), 2, "2-cycle", _square_2cycle, "b=c^(m+1): cyc(c^m, c^(m^2))"),
        FamilySpec("doubling", 2, ("ell", "alpha", "beta"), (2, 1, 1), None, "propagating l-cycle", _doubling,
                   "b=(gamma^(2^(l-1))-alpha)/beta: cyc(gamma, gamma^2, ..., gamma^(2^(l-1)))"),
    ]
}


def instantiate_family(fid: str, *params: int) -> tuple[Cycle, ...]:
    """Build and verify every cycle of one family instance."""
    spec = FAMILIES[fid]
    if len(params) != len(spec.params):
        raise TypeError(f"{fid} takes parameters {spec.params}")
    for name, val, lo in zip(spec.params, params, spec.minimums):
        if val < lo:
            raise ValueError(f"{fid}: {name}={val} is below its minimum {lo}")
    b, m, starts = spec.build(*params)
    if b < 2:
        raise FamilyError(f"{fid}{params}: base {b} < 2")
    out = []
    for start, ell in starts:
        members = [start]
        for _ in range(ell - 1):
            members.append(step(members[-1], b, m))
        if step(members[-1], b, m) != start or len(set(members)) != ell:
            raise FamilyError(f"{fid}{params}: orbit of {start} in base {b} is not an {ell}-cycle")
        c = Cycle(tuple(members), b, PowerMap(m))
        if spec.claim.startswith("propagating") and not c.propagating:
            raise FamilyError(f"{fid}{params}: {c} is not propagating")
        out.append(c)
    if len(set(out)) != len(out):
        raise FamilyError(f"{fid}{params}: cycles are not distinct")
    return tuple(out)


# --- lower bound on the number of cycles ------------------------------------------


def compute_N(m: int, b: int) -> int:
    """Modulus N(m, b): every digit value n < b satisfies n^m = n (mod N)."""
    if m < 2 or b < 2:
        raise ValueError("need m >= 2 and b >= 2")
    n = 1
    for p in primes_up_to(m):
        if (m - 1) % (p - 1):
            continue
        if p <= b - 1:
            n *= p
        else:
            r = valuation(m - 1, p) + 1
            if (m - 1) % (p ** (r - 1) * (p - 1)) == 0:
                n *= p**r
    return n


def min_cycles(m: int, b: int) -> int:
    return math.gcd(b - 1, compute_N(m, b))


@dataclass(frozen=True)
class CongruenceCertificate:
    map: DigitMap
    base: int
    modulus: int
    cycles: tuple[Cycle, ...]  # cycles[r-1] is the cycle of the orbit of r


def congruence_certificate(phi: DigitMap | int, b: int, a: int) -> CongruenceCertificate:
    """Orbits of 1..a land in a pairwise distinct cycles when a | b-1 and phi(n) = n mod a."""
    phi = as_map(phi)
    if a < 1 or (b - 1) % a:
        raise ValueError(f"{a} does not divide b-1 = {b - 1}")
    if isinstance(phi, TableMap) and phi.base_bound != b:
        raise ValueError(f"digit table is declared for base {phi.base_bound}, not {b}")
    bad = [n for n in range(b) if (phi(n) - n) % a]
    if bad:
        raise ValueError(f"phi(n) != n mod {a} for digits {bad[:5]}")
    cycles = []
    for r in range(1, a + 1):
        o = orbit(r, b, phi)
        seq = [*o.tail, *o.cycle.members]
        if any(x % a != r % a for x in seq):
            raise AssertionError(f"congruence fails along the orbit of {r}")
        cycles.append(o.cycle)
    if len(set(cycles)) != a:
        raise AssertionError("orbit cycles are not pairwise distinct")
    return CongruenceCertificate(phi, b, a, tuple(cycles))


def five_cycles(k: int) -> tuple[Cycle, ...]:
    """Five distinct cycles of S_{x^3,3k+1}: [1], the cycle of 3, and the three cubic-3k+1 cycles."""
    if k < 1:
        raise ValueError("k must be >= 1")
    b = 3 * k + 1
    cycles = (Cycle((1,), b, PowerMap(3)), orbit(3, b, 3).cycle, *instantiate_family("cubic-3k+1", k))
    if len(set(cycles)) != 5:
        raise AssertionError(f"cycles for b={b} are not distinct")
    if any(x % 3 for x in cycles[1].members):
        raise AssertionError("cycle of 3 is not divisible by 3")
    return cycles


def five_cycles_check(k: int) -> bool:
    return len(five_cycles(k)) == 5


def census_lower_bound_holds(m: int, b: int, max_scan: int | None = None) -> tuple[bool, int]:
    """Scan orbits from 1 upward until min_cycles(m, b) distinct cycles are seen.

    Any set of cycles actually found is a lower bound for the true census, so reaching the
    bound proves it does not exceed the census. Returns (ok, cycles found).
    """
    need = min_cycles(m, b)
    bound = max_scan if max_scan is not None else max(need, 1)
    cl = enumerate_cycles(b, m, scan_bound=bound, stop_above_count=need - 1 if need > 1 else None)
    return cl.total >= need, cl.total
