"""Digit-power-sum dynamics: base expansion, the map S, orbits and cycle censuses."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Union

import numba
import numpy as np

# Dense cache threshold, in entries of 4-byte cycle ids.
DEFAULT_DENSE_LIMIT = 2**31
_INT64_HEADROOM = 2**62


@dataclass(frozen=True)
class PowerMap:
    """phi(x) = x**m."""

    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"exponent must be >= 2, got {self.m}")

    def __call__(self, digit: int) -> int:
        return digit**self.m

    def table(self, b: int) -> list[int]:
        return [d**self.m for d in range(b)]

    def __str__(self):
        return f"x^{self.m}"


@dataclass(frozen=True)
class TableMap:
    """An arbitrary map {0, ..., b-1} -> Z>=0 given by its values."""

    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if len(self.values) < 2:
            raise ValueError("a digit table needs at least 2 entries")
        if any(v < 0 for v in self.values):
            raise ValueError("digit table values must be non-negative")

    @property
    def base_bound(self) -> int:
        return len(self.values)

    def __call__(self, digit: int) -> int:
        return self.values[digit]

    def table(self, b: int) -> list[int]:
        if b != self.base_bound:
            raise ValueError(f"digit table is declared for base {self.base_bound}, not {b}")
        return list(self.values)

    def __str__(self):
        return f"table{list(self.values)}"


DigitMap = Union[PowerMap, TableMap]


def as_map(phi: DigitMap | int) -> DigitMap:
    return PowerMap(phi) if isinstance(phi, int) else phi


@dataclass(frozen=True)
class BaseExpansion:
    base: int
    digits: tuple[int, ...]  # little-endian

    @property
    def value(self) -> int:
        n = 0
        for d in reversed(self.digits):
            n = n * self.base + d
        return n

    def __str__(self):
        return "[" + ",".join(map(str, self.digits)) + f"]@{self.base}"


def _check_base(b: int) -> None:
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")


def expand(n: int, b: int) -> BaseExpansion:
    _check_base(b)
    if n < 0:
        raise ValueError(f"cannot expand negative integer {n}")
    if n == 0:
        return BaseExpansion(b, (0,))
    digits = []
    while n:
        n, d = divmod(n, b)
        digits.append(d)
    return BaseExpansion(b, tuple(digits))


def step(n: int, b: int, phi: DigitMap | int = 2) -> int:
    phi = as_map(phi)
    if isinstance(phi, TableMap) and phi.base_bound != b:
        raise ValueError(f"digit table is declared for base {phi.base_bound}, not {b}")
    _check_base(b)
    if isinstance(phi, PowerMap):
        m, s = phi.m, 0
        while n:
            n, d = divmod(n, b)
            s += d**m
        return s
    values, s = phi.values, 0
    while n:
        n, d = divmod(n, b)
        s += values[d]
    return s


def stewart_bound(m: int, b: int) -> int:
    """Every cycle of S_{x^m,b} has a member <= (m-1) b^m - 1."""
    if m < 2 or b < 2:
        raise ValueError("need m >= 2 and b >= 2")
    return (m - 1) * b**m - 1


def is_propagating(members, b: int) -> bool:
    """Two digits at most, none divisible by b (meaningful for phi = x^2)."""
    bb = b * b
    return all(0 < n < bb and n % b for n in members)


@dataclass(frozen=True)
class Cycle:
    members: tuple[int, ...]
    base: int
    map: DigitMap = field(default=PowerMap(2))

    def __post_init__(self):
        mem = tuple(int(x) for x in self.members)
        if not mem:
            raise ValueError("empty cycle")
        i = mem.index(min(mem))
        object.__setattr__(self, "members", mem[i:] + mem[:i])

    @property
    def length(self) -> int:
        return len(self.members)

    def __len__(self):
        return len(self.members)

    @property
    def propagating(self) -> bool | None:
        if self.map != PowerMap(2):
            return None
        return is_propagating(self.members, self.base)

    @property
    def trivial(self) -> bool:
        return self.members == (1,)

    def verify(self) -> bool:
        """Check closure under S and distinctness by direct iteration."""
        mem = self.members
        if len(set(mem)) != len(mem):
            return False
        return all(step(mem[i], self.base, self.map) == mem[(i + 1) % len(mem)] for i in range(len(mem)))

    def sort_key(self):
        return (self.length, self.members[0])

    def __str__(self):
        return "cyc(" + ",".join(map(str, self.members)) + ")"


@dataclass(frozen=True)
class Orbit:
    start: int
    tail: tuple[int, ...]
    cycle: Cycle

    @property
    def distinct_count(self) -> int:
        return len(self.tail) + self.cycle.length


def orbit(n: int, b: int, phi: DigitMap | int = 2) -> Orbit:
    """Orbit of ``n``, split into the pre-periodic tail and its cycle. Exact for any size ``n``."""
    if n < 0:
        raise ValueError("orbit start must be non-negative")
    phi = as_map(phi)
    seen: dict[int, int] = {}
    path: list[int] = []
    x = n
    while x not in seen:
        seen[x] = len(path)
        path.append(x)
        x = step(x, b, phi)
    k = seen[x]
    return Orbit(n, tuple(path[:k]), Cycle(tuple(path[k:]), b, phi))


@dataclass(frozen=True)
class BaseClassification:
    base: int
    map: DigitMap
    cycles: tuple[Cycle, ...]
    scan_bound: int
    complete: bool
    early_exit: str | None = None

    @property
    def total(self) -> int:
        return len(self.cycles)

    @property
    def counts_by_length(self) -> dict[int, int]:
        return dict(sorted(Counter(c.length for c in self.cycles).items()))

    @property
    def max_length(self) -> int:
        return max(c.length for c in self.cycles)

    def propagating(self, length: int | None = None) -> list[Cycle]:
        return [c for c in self.cycles if c.propagating and (length is None or c.length == length)]

    def summary(self) -> dict:
        out = {
            "base": self.base,
            "map": str(self.map),
            "total": self.total,
            "counts_by_length": self.counts_by_length,
            "max_length": self.max_length,
            "scan_bound": self.scan_bound,
            "complete": self.complete,
        }
        if self.map == PowerMap(2):
            out["propagating_by_length"] = dict(sorted(Counter(c.length for c in self.propagating()).items()))
        if self.early_exit:
            out["early_exit"] = self.early_exit
        return out


class ResourceLimitError(MemoryError):
    """A census would exceed the configured memory budget."""

    def __init__(self, required_bytes: int, limit_bytes: int):
        self.required_bytes = required_bytes
        self.limit_bytes = limit_bytes
        super().__init__(
            f"census needs about {required_bytes / 2**30:.2f} GiB of cache, limit is {limit_bytes / 2**30:.2f} GiB"
        )


def dense_cache_bytes(scan_bound: int) -> int:
    return 4 * (scan_bound + 1)


@numba.njit(cache=True)
def _dense_scan(b, pw, bound, max_count, max_len):
    """Ascending scan of 1..bound with a dense id cache.

    Requires S(x) < x for every x > bound (true when bound >= the Stewart bound).
    Returns (flat cycle members, cycle end offsets, stop flag).
    """
    ids = np.zeros(bound + 1, dtype=np.int32)
    path = np.empty(1024, dtype=np.int64)
    flat = np.empty(1024, dtype=np.int64)
    ends = np.empty(64, dtype=np.int64)
    nflat = 0
    ncyc = 0
    stop = 0
    for n in range(1, bound + 1):
        if ids[n] != 0:
            continue
        npath = 0
        x = n
        cid = 0
        while True:
            if x <= bound:
                s = ids[x]
                if s > 0:
                    cid = s
                    break
                if s == -1:
                    c = x
                    start = nflat
                    while True:
                        if nflat == flat.shape[0]:
                            grown = np.empty(2 * nflat, dtype=np.int64)
                            grown[:nflat] = flat[:nflat]
                            flat = grown
                        flat[nflat] = c
                        nflat += 1
                        y = 0
                        while c:
                            y += pw[c % b]
                            c //= b
                        c = y
                        if c == x:
                            break
                    if ncyc == ends.shape[0]:
                        grown_e = np.empty(2 * ncyc, dtype=np.int64)
                        grown_e[:ncyc] = ends[:ncyc]
                        ends = grown_e
                    ends[ncyc] = nflat
                    ncyc += 1
                    cid = ncyc
                    if ncyc > max_count:
                        stop = 1
                    if nflat - start > max_len:
                        stop = 2
                    break
                ids[x] = -1
                if npath == path.shape[0]:
                    grown_p = np.empty(2 * npath, dtype=np.int64)
                    grown_p[:npath] = path[:npath]
                    path = grown_p
                path[npath] = x
                npath += 1
            y = 0
            while x:
                y += pw[x % b]
                x //= b
            x = y
        for i in range(npath):
            ids[path[i]] = cid
        if stop:
            break
    return flat[:nflat].copy(), ends[:ncyc].copy(), stop


def _sparse_scan(b, phi, bound, max_count, max_len):
    ids: dict[int, int] = {}
    cycles: list[tuple[int, ...]] = []
    stop = 0
    for n in range(1, bound + 1):
        if n in ids:
            continue
        pos: dict[int, int] = {}
        path: list[int] = []
        x = n
        while True:
            if x in ids:
                cid = ids[x]
                break
            if x in pos:
                cycles.append(tuple(path[pos[x]:]))
                cid = len(cycles)
                if len(cycles) > max_count:
                    stop = 1
                if len(cycles[-1]) > max_len:
                    stop = 2
                break
            pos[x] = len(path)
            path.append(x)
            x = step(x, b, phi)
        for p in path:
            ids[p] = cid
        if stop:
            break
    return cycles, stop


def enumerate_cycles(
    b: int,
    phi: DigitMap | int = 2,
    scan_bound: int | None = None,
    *,
    stop_above_count: int | None = None,
    stop_above_length: int | None = None,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
    mem_limit: int | None = None,
) -> BaseClassification:
    """Cycle census of S_{phi,b} from the orbits of 1..scan_bound.

    With a power map and the default bound (the Stewart bound) the census is complete.
    ``stop_above_count`` / ``stop_above_length`` abort the scan as soon as the number of
    cycles, or the length of a newly found cycle, exceeds the threshold; the returned
    classification is then partial and records why it stopped.
    """
    _check_base(b)
    phi = as_map(phi)
    stewart = stewart_bound(phi.m, b) if isinstance(phi, PowerMap) else None
    if scan_bound is None:
        if stewart is None:
            raise ValueError("a scan bound is required for table digit maps")
        scan_bound = stewart
    if scan_bound < 1:
        raise ValueError(f"scan bound must be >= 1, got {scan_bound}")
    max_count = stop_above_count if stop_above_count is not None else 2**62
    max_len = stop_above_length if stop_above_length is not None else 2**62
    table = phi.table(b)
    full = stewart is not None and scan_bound >= stewart
    fits = (len(expand(scan_bound, b).digits) + 2) * max(table) < _INT64_HEADROOM
    # the dense cache size is a lower bound for either path, so it guards both
    if mem_limit is not None and dense_cache_bytes(scan_bound) > mem_limit:
        raise ResourceLimitError(dense_cache_bytes(scan_bound), mem_limit)
    if full and fits and scan_bound + 1 <= dense_limit:
        flat, ends, stop = _dense_scan(b, np.array(table, dtype=np.int64), scan_bound, max_count, max_len)
        starts = [0, *ends[:-1].tolist()]
        raw = [tuple(flat[s:e].tolist()) for s, e in zip(starts, ends.tolist())]
    else:
        raw, stop = _sparse_scan(b, phi, scan_bound, max_count, max_len)
    cycles = tuple(sorted((Cycle(c, b, phi) for c in raw), key=Cycle.sort_key))
    reason = {0: None, 1: f"cycle count exceeds {max_count}", 2: f"cycle longer than {max_len}"}[stop]
    return BaseClassification(b, phi, cycles, scan_bound, complete=full and not stop, early_exit=reason)
