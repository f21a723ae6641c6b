"""Integer lines on the cycle varieties V_l and propagation of cycles along them.

A point of V_l is a base b together with digit pairs (x_i, y_i), i = 1..l, satisfying
x_i^2 + y_i^2 = x_{i+1} + b*y_{i+1} cyclically. A propagating l-cycle in base b gives
such a point with 0 <= x_i, y_i < b and x_i != 0.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import mpmath

from .arith import crt_pair, divisors
from .core import Cycle, PowerMap, is_propagating, step

log = logging.getLogger(__name__)

FIRST = "first-line"
V1_SECOND = "v1-second"
V2_SECOND = "v2-second"

ROOT_CANDIDATE_CAP = 10**5


class PropagationError(AssertionError):
    """A propagated cycle failed direct verification."""


class NoSecondLineError(ArithmeticError):
    """The exact solve could not certify a rational second line."""


@dataclass(frozen=True)
class VarietyPoint:
    base: int
    pairs: tuple[tuple[int, int], ...]

    @classmethod
    def from_cycle(cls, cycle: Cycle) -> "VarietyPoint":
        b = cycle.base
        if any(n >= b * b for n in cycle.members):
            raise ValueError(f"{cycle} has a member with 3 or more digits in base {b}")
        return cls(b, tuple((n % b, n // b) for n in cycle.members))

    @property
    def ell(self) -> int:
        return len(self.pairs)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(x + self.base * y for x, y in self.pairs)

    def residuals(self) -> list:
        b, p = self.base, self.pairs
        return [p[i][0] ** 2 + p[i][1] ** 2 - p[(i + 1) % len(p)][0] - b * p[(i + 1) % len(p)][1] for i in range(len(p))]

    def on_variety(self) -> bool:
        return all(r == 0 for r in self.residuals())

    def is_cycle_point(self) -> bool:
        b = self.base
        return self.on_variety() and all(0 < x < b and 0 <= y < b for x, y in self.pairs)


@dataclass(frozen=True)
class IntegerLine:
    """t -> (b0 + lam*t, x_i + sx_i*t, y_i + sy_i*t)."""

    point: VarietyPoint
    lam: int
    slopes: tuple[tuple[int, int], ...]
    provenance: str = FIRST

    @property
    def ell(self) -> int:
        return self.point.ell

    @property
    def content(self) -> int:
        return reduce(math.gcd, [s for pair in self.slopes for s in pair], self.lam)

    @property
    def reduced(self) -> bool:
        return self.content == 1

    def at(self, t) -> VarietyPoint:
        return VarietyPoint(
            self.point.base + self.lam * t,
            tuple((x + sx * t, y + sy * t) for (x, y), (sx, sy) in zip(self.point.pairs, self.slopes)),
        )

    def on_variety(self, ts: Sequence[int] = (0, 1, 2, 3, 4)) -> bool:
        # Residuals are quadratic in t, so three values already force the zero polynomial.
        return all(self.at(t).on_variety() for t in ts)

    def direction(self) -> tuple[int, ...]:
        return (self.lam, *(s for pair in self.slopes for s in pair))

    def same_line_as(self, other: "IntegerLine") -> bool:
        """Same point set (both pass through the same base point here)."""
        d1, d2 = self.direction(), other.direction()
        return all(a * d2[0] == c * d1[0] for a, c in zip(d1, d2)) and self.point == other.point

    def to_dict(self) -> dict:
        return {
            "base": self.point.base,
            "pairs": [list(p) for p in self.point.pairs],
            "lam": self.lam,
            "slopes": [list(s) for s in self.slopes],
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IntegerLine":
        pt = VarietyPoint(int(d["base"]), tuple((int(x), int(y)) for x, y in d["pairs"]))
        return cls(pt, int(d["lam"]), tuple((int(a), int(c)) for a, c in d["slopes"]), d.get("provenance", FIRST))

    def __str__(self):
        b0 = self.point.base
        parts = [f"b={self.lam}t+{b0}"]
        for i, ((x, y), (sx, sy)) in enumerate(zip(self.point.pairs, self.slopes), 1):
            parts.append(f"x{i}={sx}t+{x}, y{i}={sy}t+{y}")
        return "; ".join(parts)


def _as_point(c) -> VarietyPoint:
    return c if isinstance(c, VarietyPoint) else VarietyPoint.from_cycle(c)


def first_line(c: Cycle | VarietyPoint) -> IntegerLine:
    """The line b0 + (b0^2+1)t through the point of a cycle whose members have <= 2 digits."""
    p = _as_point(c)
    b0 = p.base
    slopes = tuple((x * b0 - y, y * b0 + x) for x, y in p.pairs)
    return IntegerLine(p, b0 * b0 + 1, slopes, FIRST)


def reduce_line(line: IntegerLine) -> IntegerLine:
    """Divide a first line by g = gcd(b0^2 + 1, n_1, ..., n_l)."""
    b0 = line.point.base
    g = reduce(math.gcd, line.point.members, b0 * b0 + 1)
    if line.lam % g or any(s % g for pair in line.slopes for s in pair):
        raise ArithmeticError(f"slopes of {line} are not divisible by g={g}")
    return IntegerLine(line.point, line.lam // g, tuple((a // g, c // g) for a, c in line.slopes), line.provenance)


def primitive(line: IntegerLine) -> IntegerLine:
    g = line.content
    sign = 1 if line.lam > 0 else -1
    k = sign * g
    return IntegerLine(line.point, line.lam // k, tuple((a // k, c // k) for a, c in line.slopes), line.provenance)


def propagate(line: IntegerLine, t: int) -> Cycle:
    """The cycle at base b(t), verified by direct iteration and the propagating predicate."""
    if t < 0:
        raise ValueError("t must be non-negative")
    p = line.at(t)
    b, members = p.base, p.members
    mem_ok = len(set(members)) == len(members)
    for i, n in enumerate(members):
        if not mem_ok or step(n, b) != members[(i + 1) % len(members)]:
            raise PropagationError(f"line {line} does not give a cycle at t={t} (base {b})")
    if not is_propagating(members, b) or not p.is_cycle_point():
        raise PropagationError(f"cycle at t={t} (base {b}) is not propagating")
    return Cycle(members, b, PowerMap(2))


# --- lines on V_1 ---------------------------------------------------------------


def v1_lines(b0: int, x0: int, y0: int) -> tuple[IntegerLine, IntegerLine]:
    """The two lines through (b0, x0, y0) on V_1, in primitive integer form.

    The first coincides with the propagating first line, the second has slope d = gcd(b0^2+1, n).
    """
    if y0 == 0 and x0 in (0, 1):
        raise ValueError("points on the lines (t,0,0) and (t,1,0) are excluded")
    p = VarietyPoint(b0, ((x0, y0),))
    if not p.on_variety():
        raise ValueError(f"({b0},{x0},{y0}) is not on V_1")
    a = IntegerLine(p, (x0 - 1) ** 2 + y0**2, (((x0 - 1) * y0, y0**2),), FIRST)
    c = IntegerLine(p, x0**2 + y0**2, ((x0 * y0, y0**2),), V1_SECOND)
    return primitive(a), primitive(c)


# --- the second line on V_2 -------------------------------------------------------
# A univariate polynomial is a list of Fractions, lowest degree first.


def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _add(p, q):
    n = max(len(p), len(q))
    return _trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def _neg(p):
    return [-a for a in p]


def _mul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, c in enumerate(q):
            out[i + j] += a * c
    return _trim(out)


def _eval(p, x):
    acc = Fraction(0)
    for a in reversed(p):
        acc = acc * x + a
    return acc


def _deflate(p, r):
    """Divide p by (X - r); the remainder must vanish."""
    n = len(p) - 1
    q = [Fraction(0)] * n
    acc = Fraction(0)
    for i in range(n, 0, -1):
        acc = acc * r + p[i]
        q[i - 1] = acc
    if acc * r + p[0] != 0:
        raise NoSecondLineError("known first-line root does not divide the eliminant")
    return _trim(q)


def _integer_poly(p):
    den = reduce(lambda a, c: a * c // math.gcd(a, c), (a.denominator for a in p), 1)
    ints = [int(a * den) for a in p]
    g = reduce(math.gcd, ints, 0)
    return [a // g for a in ints]


def _divmod(p, q):
    p, q = [Fraction(a) for a in p], _trim(q)
    out = [Fraction(0)] * max(len(p) - len(q) + 1, 1)
    while len(_trim(p)) >= len(q):
        p = _trim(p)
        k, c = len(p) - len(q), p[-1] / q[-1]
        out[k] = c
        for i, a in enumerate(q):
            p[i + k] -= c * a
    return _trim(out), _trim(p)


def _gcd(p, q):
    p, q = _trim(p), _trim(q)
    while q:
        p, q = q, _divmod(p, q)[1]
    return p


def squarefree_part(p):
    """p / gcd(p, p'): same roots, each simple."""
    p = _trim([Fraction(a) for a in p])
    dp = [i * a for i, a in enumerate(p)][1:]
    g = _gcd(p, dp)
    return p if len(g) <= 1 else _divmod(p, g)[0]


def rational_roots(p) -> list[Fraction]:
    """All rational roots of a polynomial with rational coefficients, each verified exactly.

    Works on the squarefree part. Candidates come from a high-precision numerical root
    finder (roots are simple, so they round cleanly); if the finder does not converge, the
    rational-root theorem is tried with at most ROOT_CANDIDATE_CAP candidates.
    """
    p = _trim(p)
    if len(p) <= 1:
        return []
    p = squarefree_part(p)
    roots: set[Fraction] = set()
    if p[0] == 0:
        roots.add(Fraction(0))
        p = p[1:]
    ints = _integer_poly(p)
    n, lead = len(ints) - 1, ints[-1]
    if n == 0:
        return sorted(roots)
    # rational root r of P  <=>  integer root lead*r of the monic lead^(n-1) P(y/lead)
    monic = [ints[i] * lead ** (n - 1 - i) for i in range(n)] + [1]
    digits = max(len(str(abs(a))) for a in monic)
    with mpmath.workdps(2 * digits + 40):
        try:
            approx = mpmath.polyroots(list(reversed(monic)), maxsteps=400, extraprec=4 * digits + 100)
        except mpmath.libmp.NoConvergence:
            approx = []
        cands = set()
        for z in approx:
            if abs(mpmath.im(z)) < 1 + abs(z) * mpmath.mpf(10) ** (-digits):
                k = int(mpmath.nint(mpmath.re(z)))
                cands.update((k - 1, k, k + 1))
    found = []
    for y in cands:
        r = Fraction(y, lead)
        if _eval(p, r) == 0:
            found.append(r)
    rest = p
    for r in found:
        rest = _deflate(rest, r)
    roots.update(found)
    if len(rest) > 1 and not approx:
        roots.update(_rational_root_theorem(_integer_poly(rest)))
    return sorted(roots)


def _rational_root_theorem(ints) -> list[Fraction]:
    a0, an = abs(ints[0]), abs(ints[-1])
    ps, qs = divisors(a0), divisors(an)
    if 2 * len(ps) * len(qs) > ROOT_CANDIDATE_CAP:
        raise NoSecondLineError("rational root candidate set exceeds the cap")
    poly = [Fraction(a) for a in ints]
    return [Fraction(s * u, q) for u in ps for q in qs for s in (1, -1) if _eval(poly, Fraction(s * u, q)) == 0]


def evaluate_D(b0: int, x0: int, y0: int, u0: int, v0: int) -> int:
    """Published positivity certificate for the second line (a polynomial in y0, u0, v0)."""
    if (u0, v0) == (0, 0):
        raise ValueError("(u0, v0) = (0, 0) is excluded")
    if min(b0, x0, y0, u0, v0) < 0:
        raise ValueError("coordinates must be non-negative")
    y, u, v = y0, u0, v0
    val = (
        u**2 + v**2 + 4 * y**2 * u**4 + 8 * y**2 * u**3 + 8 * y**2 * u**2 * v**2 + 4 * y**2 * u**2
        + 8 * y**2 * u * v**2 + 4 * y**2 * v**4 + 4 * y**2 * v**2 + 4 * y * u**4 * v + 8 * y * u**2 * v**3
        + 4 * y * v**5 + u**6 + 2 * u**5 + 3 * u**4 * v**2 + 3 * u**4 + 4 * u**3 * v**2 + 2 * u**3
        + 3 * u**2 * v**4 + 6 * u**2 * v**2 + 2 * u * v**4 + 2 * u * v**2 + v**6 + 3 * v**4
    )
    assert val > 0
    return val


def _affine_sq(f):
    """(a p + c q + e)^2 as a quadratic in q with coefficients in Q[p]."""
    a, c, e = f
    lin = _trim([e, a])
    return [_mul(lin, lin), _mul([2 * c], lin), _trim([c * c])]


def _affine(f):
    a, c, e = f
    return [_trim([e, a]), _trim([c]), []]


def _qadd(*qs):
    return [reduce(_add, (q[k] for q in qs), []) for k in range(3)]


def _qneg(q):
    return [_neg(x) for x in q]


def _second_line_direction(b0, x0, y0, u0, v0, solve_xi_mu: bool):
    """Rational directions (1, xi, eta, mu, nu) of lines through the point, other than the first.

    Conditions: 2x0 xi + 2y0 eta - mu - b0 nu = v0,  -xi - b0 eta + 2u0 mu + 2v0 nu = y0,
                xi^2 + eta^2 = nu,  mu^2 + nu^2 = eta.
    Two variables are solved from the linear pair; the two conics in the free pair (p, q)
    are combined into a resultant in p.
    """
    F = Fraction
    bb = b0 * b0 + 1
    first = (F(x0 * b0 - y0, bb), F(x0 + y0 * b0, bb), F(u0 * b0 - v0, bb), F(u0 + v0 * b0, bb))
    if solve_xi_mu:
        # unknowns xi, mu; free p = eta, q = nu
        det = 4 * x0 * u0 - 1
        if det == 0:
            return None
        # R1 = v0 - 2y0 p + b0 q, R2 = y0 + b0 p - 2v0 q
        r1, r2 = (F(-2 * y0), F(b0), F(v0)), (F(b0), F(-2 * v0), F(y0))
        xi = tuple((2 * u0 * a + c) / det for a, c in zip(r1, r2))
        mu = tuple((a + 2 * x0 * c) / det for a, c in zip(r1, r2))
        eta, nu = (F(1), F(0), F(0)), (F(0), F(1), F(0))
        known = first[1]
    else:
        # unknowns eta, nu; free p = xi, q = mu
        det = 4 * y0 * v0 - b0 * b0
        if det == 0:
            return None
        # 2y0 eta - b0 nu = v0 - 2x0 p + q ;  -b0 eta + 2v0 nu = y0 + p - 2u0 q
        r1, r2 = (F(-2 * x0), F(1), F(v0)), (F(1), F(-2 * u0), F(y0))
        eta = tuple((2 * v0 * a + b0 * c) / det for a, c in zip(r1, r2))
        nu = tuple((b0 * a + 2 * y0 * c) / det for a, c in zip(r1, r2))
        xi, mu = (F(1), F(0), F(0)), (F(0), F(1), F(0))
        known = first[0]
    q1 = _qadd(_affine_sq(xi), _affine_sq(eta), _qneg(_affine(nu)))
    q2 = _qadd(_affine_sq(mu), _affine_sq(nu), _qneg(_affine(eta)))
    (c1, b1, a1), (c2, b2, a2) = q1, q2
    # Sylvester resultant of two quadratics in q
    t1 = _add(_mul(a1, c2), _neg(_mul(a2, c1)))
    t2 = _add(_mul(a1, b2), _neg(_mul(a2, b1)))
    t3 = _add(_mul(b1, c2), _neg(_mul(b2, c1)))
    res = _add(_mul(t1, t1), _neg(_mul(t2, t3)))
    if not res:
        raise NoSecondLineError("eliminant vanishes identically")
    cubic = _deflate(res, known)
    out = []
    for p in rational_roots(cubic):
        qa, qb, qc = (_eval(k, p) for k in (a1, b1, c1))
        ra, rb, rc = (_eval(k, p) for k in (a2, b2, c2))
        lin_a, lin_c = ra * qb - qa * rb, ra * qc - qa * rc
        qs = []
        if lin_a != 0:
            qs = [-lin_c / lin_a]
        elif ra != 0:
            disc = rb * rb - 4 * ra * rc
            if disc >= 0:
                num, den = disc.numerator, disc.denominator
                sn, sd = math.isqrt(num), math.isqrt(den)
                if sn * sn == num and sd * sd == den:
                    sq = F(sn, sd)
                    qs = [(-rb + sq) / (2 * ra), (-rb - sq) / (2 * ra)]
        for q in qs:
            vals = [f[0] * p + f[1] * q + f[2] for f in (xi, eta, mu, nu)]
            if vals[0] ** 2 + vals[1] ** 2 != vals[3] or vals[2] ** 2 + vals[3] ** 2 != vals[1]:
                continue
            d = tuple(vals)
            if d != first and d not in out:
                out.append(d)
    return out


def v2_second_line(b0: int, x0: int, y0: int, u0: int, v0: int) -> IntegerLine:
    """The second rational line through a point of V_2, other than the first line.

    Returned in primitive integer form with positive b-slope.
    """
    if (u0, v0) == (0, 0) or (x0, y0) == (0, 0):
        raise ValueError("points on the lines (t,0,0,0,0) and (t,1,0,1,0) are excluded")
    if min(b0, x0, y0, u0, v0) < 0:
        raise ValueError("coordinates must be non-negative")
    pt = VarietyPoint(b0, ((x0, y0), (u0, v0)))
    if not pt.on_variety():
        raise ValueError(f"{(b0, x0, y0, u0, v0)} is not on V_2")
    dirs = _second_line_direction(b0, x0, y0, u0, v0, solve_xi_mu=True)
    if dirs is None:
        dirs = _second_line_direction(b0, x0, y0, u0, v0, solve_xi_mu=False)
    if not dirs:
        raise NoSecondLineError(f"no second rational line certified through {(b0, x0, y0, u0, v0)}")
    if len(dirs) > 1:
        log.warning("several rational second lines through %s; keeping the first", (b0, x0, y0, u0, v0))
    xi, eta, mu, nu = dirs[0]
    lam = reduce(lambda a, c: a * c // math.gcd(a, c), (f.denominator for f in dirs[0]), 1)
    line = IntegerLine(pt, lam, ((int(xi * lam), int(eta * lam)), (int(mu * lam), int(nu * lam))), V2_SECOND)
    line = primitive(line)
    if not line.on_variety():
        raise NoSecondLineError(f"solved direction is not on V_2 at {(b0, x0, y0, u0, v0)}")
    return line


def second_line_for_cycle(c: Cycle) -> IntegerLine:
    if c.length != 2:
        raise ValueError("second lines are only defined for 2-cycles")
    (x0, y0), (u0, v0) = VarietyPoint.from_cycle(c).pairs
    return v2_second_line(c.base, x0, y0, u0, v0)


def certifies_propagation(line: IntegerLine) -> bool:
    """Slope check 0 <= slopes <= lam: every t >= 0 then gives a propagating cycle point."""
    return line.lam > 0 and all(0 <= s <= line.lam for pair in line.slopes for s in pair) and line.point.is_cycle_point()


# --- coprimality of (c t + d)^2 + 1 ----------------------------------------------


def gcd_lemma_check(c: int, d: int) -> bool:
    """Whether the values (c x + d)^2 + 1 over the integers have no common prime factor."""
    return math.gcd(c, d * d + 1) == 1


def compose(c0: int, d0: int, c1: int, d1: int, x0: int | None = None, x1: int | None = None) -> tuple[int, int]:
    """Progression c0*c1*t + w through a common value w of c0 t + d0 and c1 t + d1.

    With ``x0, x1`` given, ``w = c0*x0 + d0`` (which must equal ``c1*x1 + d1``); otherwise
    ``w`` is the least common value that is >= max(d0, d1).
    Returns ``(modulus, w)``.
    """
    if x0 is not None and x1 is not None:
        w = c0 * x0 + d0
        if w != c1 * x1 + d1:
            raise ValueError(f"{c0}*{x0}+{d0} != {c1}*{x1}+{d1}")
    else:
        sol = crt_pair(d0 % c0, c0, d1 % c1, c1)
        if sol is None:
            raise ValueError(f"progressions {c0}t+{d0} and {c1}t+{d1} never meet")
        r, m = sol
        lo = max(d0, d1)
        w = r + m * max(0, -(-(lo - r) // m))
    if gcd_lemma_check(c0, d0) and gcd_lemma_check(c1, d1):
        assert math.gcd(c0 * c1, w * w + 1) == 1
    return c0 * c1, w
