"""Fixed points of S_{x^2,b}: enumeration, divisor count, duality and gcd decomposition."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .arith import divisor_count


class ConsistencyError(ArithmeticError):
    """An identity that must hold for every 1-cycle failed."""


@dataclass(frozen=True)
class OneCycle:
    base: int
    x: int
    y: int

    def __post_init__(self):
        b, x, y = self.base, self.x, self.y
        if not (0 <= x < b and 0 <= y < b) or x * x + y * y != x + b * y:
            raise ValueError(f"({x},{y}) is not a 1-cycle digit pair in base {b}")

    @property
    def n(self) -> int:
        return self.x + self.base * self.y

    @property
    def d(self) -> int:
        return math.gcd(self.base**2 + 1, self.n)

    @property
    def trivial(self) -> bool:
        return (self.x, self.y) == (1, 0)


@dataclass(frozen=True)
class OneCycleDecomposition:
    g: int
    g_dual: int
    h: int
    h_dual: int
    dual_n: int
    dual_d: int


def count_1cycles(b: int) -> int:
    """Number of proper divisors of b^2 + 1 (trivial cycle included)."""
    if b < 2:
        raise ValueError("base must be >= 2")
    return divisor_count(b * b + 1) - 1


def enumerate_1cycles(b: int) -> list[OneCycle]:
    if b < 2:
        raise ValueError("base must be >= 2")
    out = []
    for y in range(b):
        disc = 1 + 4 * y * (b - y)
        r = math.isqrt(disc)
        if r * r != disc:
            continue
        # x^2 - x - y(b - y) = 0; the other root (1 - r)/2 is <= 0.
        x = (1 + r) // 2
        if x < b and (x, y) != (0, 0):
            out.append(OneCycle(b, x, y))
    return sorted(out, key=lambda c: c.n)


def _require_nontrivial(c: OneCycle) -> None:
    if c.trivial:
        raise ValueError("the trivial cycle [1] has no dual")


def dual_1cycle(c: OneCycle) -> OneCycle:
    _require_nontrivial(c)
    b = c.base
    dual = OneCycle(b, c.x, b - c.y)
    if c.d * dual.d != b * b + 1 or c.n * dual.n != (b * b + 1) * c.x**2:
        raise ConsistencyError(f"duality identities fail for {c}")
    return dual


def decompose_1cycle(c: OneCycle) -> OneCycleDecomposition:
    _require_nontrivial(c)
    b, x, y = c.base, c.x, c.y
    g, gd = math.gcd(x, y), math.gcd(x, b - y)
    h, hd = math.gcd(x - 1, y), math.gcd(x - 1, b - y)
    dual = dual_1cycle(c)
    if (x, y, b - y, x - 1) != (g * gd, g * h, gd * hd, h * hd):
        raise ConsistencyError(f"product identities fail for {c}")
    if c.n % (g * g) or c.d != c.n // (g * g) or dual.n % (gd * gd) or dual.d != dual.n // (gd * gd):
        raise ConsistencyError(f"d = n/g^2 identities fail for {c}")
    return OneCycleDecomposition(g, gd, h, hd, dual.n, dual.d)
