"""Exact integer helpers: primality, factorization, divisors."""
from __future__ import annotations

import math
import random
from collections import Counter

# Deterministic for n < 3,317,044,064,679,887,385,961,981.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MR_DETERMINISTIC_LIMIT = 3_317_044_064_679_887_385_961_981

_SMALL_PRIMES = [p for p in range(2, 1000) if all(p % q for q in range(2, math.isqrt(p) + 1))]


class FactorizationError(ArithmeticError):
    pass


def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def _mr_round(n: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def miller_rabin(n: int, extra_rounds: int = 20, rng: random.Random | None = None) -> tuple[bool, bool]:
    """Return ``(is_probable_prime, deterministic)``.

    Below ``MR_DETERMINISTIC_LIMIT`` the fixed witness set makes the verdict exact.
    Above it, ``extra_rounds`` random bases are added and ``deterministic`` is False.
    """
    if n < 2:
        return False, True
    for p in _SMALL_PRIMES:
        if n == p:
            return True, True
        if n % p == 0:
            return False, True
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        if not _mr_round(n, d, s, a):
            return False, True
    if n < MR_DETERMINISTIC_LIMIT:
        return True, True
    rng = rng or random.Random(n)
    for _ in range(extra_rounds):
        if not _mr_round(n, d, s, rng.randrange(2, n - 1)):
            return False, True
    return True, False


def is_prime(n: int) -> bool:
    return miller_rabin(n)[0]


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int, trial_limit: int = 10**6, seed: int = 0) -> dict[int, int]:
    """Prime factorization of ``n >= 1`` as ``{p: e}``.

    Trial division up to ``trial_limit``, then Pollard-Brent on the cofactor.
    The product is re-checked before returning.
    """
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    rng = random.Random(seed)
    out: Counter[int] = Counter()
    m = n
    for p in _SMALL_PRIMES:
        while m % p == 0:
            out[p] += 1
            m //= p
    p = _SMALL_PRIMES[-1] + 2
    while m > 1 and p <= trial_limit and p * p <= m:
        while m % p == 0:
            out[p] += 1
            m //= p
        p += 2
    stack = [m] if m > 1 else []
    while stack:
        k = stack.pop()
        if is_prime(k):
            out[k] += 1
            continue
        if is_square(k):
            r = math.isqrt(k)
            stack += [r, r]
            continue
        f = _pollard_brent(k, rng)
        stack += [f, k // f]
    fac = dict(sorted(out.items()))
    check = 1
    for q, e in fac.items():
        check *= q**e
    if check != n:
        raise FactorizationError(f"factorization of {n} failed verification")
    return fac


def divisor_count(n: int) -> int:
    return math.prod(e + 1 for e in factorize(n).values())


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def is_prime_power(n: int) -> bool:
    return n > 1 and len(factorize(n)) == 1


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, n + 1, p)))
    return [i for i, v in enumerate(sieve) if v]


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def multiplicative_order(a: int, n: int) -> int:
    if math.gcd(a, n) != 1:
        raise ValueError(f"{a} is not a unit mod {n}")
    k, x = 1, a % n
    while x != 1 % n:
        x = x * a % n
        k += 1
    return k


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int] | None:
    """Solve x = r1 (mod m1), x = r2 (mod m2); ``None`` if incompatible."""
    g = math.gcd(m1, m2)
    if (r2 - r1) % g:
        return None
    lcm = m1 // g * m2
    k = ((r2 - r1) // g * pow(m1 // g, -1, m2 // g)) % (m2 // g) if m2 // g > 1 else 0
    return (r1 + m1 * k) % lcm, lcm
