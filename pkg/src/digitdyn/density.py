"""Arithmetic progressions of bases carrying propagating cycles, and exact density bounds."""
from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import reduce

from .arith import factorize, is_prime_power
from .core import Cycle, enumerate_cycles
from .lines import (
    IntegerLine,
    NoSecondLineError,
    PropagationError,
    certifies_propagation,
    first_line,
    propagate,
    reduce_line,
    second_line_for_cycle,
)

log = logging.getLogger(__name__)

FIRST_ONLY = "first-only"
BOTH_LINES = "first-and-v2-second"


@dataclass(frozen=True)
class ArithmeticProgression:
    """Bases b = start + modulus*t, t >= 0."""

    modulus: int
    start: int
    line: IntegerLine | None = field(default=None, compare=False)

    @property
    def residue(self) -> int:
        return self.start % self.modulus

    def __contains__(self, b: int) -> bool:
        return b >= self.start and (b - self.start) % self.modulus == 0

    @property
    def key(self) -> tuple[int, int]:
        return (self.modulus, self.residue)


@dataclass(frozen=True)
class Group:
    modulus: int
    residues: int
    members: tuple[ArithmeticProgression, ...]

    @property
    def density(self) -> Fraction:
        return Fraction(self.residues, self.modulus)


@dataclass(frozen=True)
class ProgressionFamily:
    ell: int
    max_base: int
    cycle_count: int
    progressions: tuple[ArithmeticProgression, ...]
    groups: tuple[Group, ...] = ()
    bound: Fraction | None = None

    @property
    def retained(self) -> tuple[ArithmeticProgression, ...]:
        return tuple(p for g in self.groups for p in g.members)


def floor_decimal(q: Fraction, places: int = 4) -> str:
    """Decimal rendering rounded down, so a printed lower bound stays a lower bound."""
    scale = 10**places
    k = math.floor(q * scale)
    return f"{k // scale}.{k % scale:0{places}d}"


def _census_chunk(args):
    lo, hi, ell = args
    out = []
    for b in range(lo, hi + 1):
        for c in enumerate_cycles(b).propagating(ell):
            if not c.trivial:
                out.append(c)
    return out


def propagating_cycles(ell: int, max_base: int, min_base: int = 2, jobs: int = 1) -> list[Cycle]:
    """Non-trivial propagating ell-cycles over all bases in [min_base, max_base], in (base, cycle) order."""
    chunks = [(lo, min(lo + 63, max_base), ell) for lo in range(min_base, max_base + 1, 64)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_census_chunk, chunks))
    else:
        parts = [_census_chunk(c) for c in chunks]
    cycles = [c for part in parts for c in part]
    return sorted(cycles, key=lambda c: (c.base, c.members))


def collect_progressions(
    ell: int,
    max_base: int,
    policy: str = FIRST_ONLY,
    *,
    min_base: int = 2,
    jobs: int = 1,
    cycles: list[Cycle] | None = None,
) -> ProgressionFamily:
    """One progression per reduced first line (and, for ell = 2 under BOTH_LINES, per certified second line)."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if policy not in (FIRST_ONLY, BOTH_LINES):
        raise ValueError(f"unknown line policy {policy!r}")
    if policy == BOTH_LINES and ell != 2:
        raise ValueError("second lines are only available for ell = 2")
    if cycles is None:
        cycles = propagating_cycles(ell, max_base, min_base, jobs)
    progs: dict[tuple[int, int], ArithmeticProgression] = {}

    def emit(line: IntegerLine):
        ap = ArithmeticProgression(line.lam, line.point.base, line)
        progs.setdefault(ap.key, ap)

    for c in cycles:
        emit(reduce_line(first_line(c)))
        if policy == BOTH_LINES:
            try:
                second = second_line_for_cycle(c)
            except NoSecondLineError as e:
                log.info("skipping second line of %s in base %d: %s", c, c.base, e)
                continue
            if certifies_propagation(second):
                emit(second)
            else:
                log.info("second line of %s in base %d fails the slope certificate", c, c.base)
    ordered = tuple(sorted(progs.values(), key=lambda p: (p.start, p.modulus, p.residue)))
    return ProgressionFamily(ell, max_base, len(cycles), ordered)


def _lift_count(progs, modulus: int) -> int:
    hit = bytearray(modulus)
    for p in progs:
        hit[p.residue :: p.modulus] = b"\x01" * len(range(p.residue, modulus, p.modulus))
    return sum(hit)


def prune_and_bound(family: ProgressionFamily, allow: tuple[int, ...] = ()) -> ProgressionFamily:
    """Keep prime-power moduli (and moduli dividing an allow-listed value) and bound the union density.

    Retained progressions are grouped so that group moduli are pairwise coprime: one group per
    prime, except that every prime of an allow-listed value goes to that value's group.
    Within a group residues are lifted to the group modulus and counted exactly.
    """
    owner: dict[int, int] = {}
    for a in allow:
        for p in factorize(a):
            if p in owner and owner[p] != a:
                raise ValueError(f"allow-listed moduli {owner[p]} and {a} share the prime {p}")
            owner[p] = a
    buckets: dict[object, list[ArithmeticProgression]] = {}
    for ap in family.progressions:
        m = ap.modulus
        if m == 1:
            key: object = ("all",)
        elif is_prime_power(m):
            p = next(iter(factorize(m)))
            key = ("allow", owner[p]) if p in owner else ("prime", p)
        else:
            hosts = [a for a in allow if a % m == 0]
            if not hosts:
                continue
            key = ("allow", hosts[0])
        buckets.setdefault(key, []).append(ap)
    groups = []
    for key in sorted(buckets, key=str):
        members = tuple(buckets[key])
        g_mod = reduce(lambda a, c: a * c // math.gcd(a, c), (p.modulus for p in members), 1)
        groups.append(Group(g_mod, _lift_count(members, g_mod), members))
    miss = Fraction(1)
    for g in groups:
        miss *= 1 - g.density
    return replace(family, groups=tuple(groups), bound=1 - miss)


def certify_progression(ap: ArithmeticProgression, ell: int, ts=(1, 2, 3)) -> bool:
    """Propagate the source line to each sampled t and check a propagating ell-cycle appears there."""
    if ap.line is None:
        raise ValueError("progression has no line provenance")
    for t in ts:
        try:
            c = propagate(ap.line, t)
        except PropagationError:
            return False
        if c.length != ell or c.base != ap.start + ap.modulus * t:
            return False
    return True


def doubling_progression(ell: int) -> ArithmeticProgression:
    """Progression b0 + t(b0^2+1)/2, b0 = 2^(2^(ell-1)) - 1, from the cycle cyc(2, 4, 16, ...)."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    b0 = 2 ** (2 ** (ell - 1)) - 1
    members = tuple(2 ** (2**k) for k in range(ell))
    line = reduce_line(first_line(Cycle(members, b0)))
    assert line.lam == (b0 * b0 + 1) // 2
    return ArithmeticProgression(line.lam, b0, line)


CSV_COLUMNS = ["ell", "N", "P", "retained_progressions", "bound_rational", "bound_decimal"]


def csv_row(family: ProgressionFamily) -> dict:
    return {
        "ell": family.ell,
        "N": family.max_base,
        "P": family.cycle_count,
        "retained_progressions": len(family.retained),
        "bound_rational": f"{family.bound.numerator}/{family.bound.denominator}",
        "bound_decimal": floor_decimal(family.bound),
    }


def to_csv(families) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for f in families:
        w.writerow(csv_row(f))
    return buf.getvalue()
