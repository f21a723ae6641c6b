"""Checkpointed base-range campaigns for L(x^m, i), M(x^2, d) and PB(l)."""
from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass
from pathlib import Path

from .arith import miller_rabin
from .core import PowerMap, ResourceLimitError, dense_cache_bytes, enumerate_cycles, stewart_bound
from .lines import IntegerLine, PropagationError, certifies_propagation, propagate, second_line_for_cycle
from .onecycle import count_1cycles

log = logging.getLogger(__name__)

KINDS = ("L", "M", "PB")
SHARD_SIZE = 64
DEFAULT_BUDGET = 10**10
DEFAULT_MEM_LIMIT = 2 * 2**30


class BudgetError(RuntimeError):
    pass


class CheckpointError(RuntimeError):
    pass


@dataclass(frozen=True)
class Campaign:
    kind: str
    param: int
    lo: int
    hi: int
    m: int = 2
    primality_prefilter: bool = True
    known_lines: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if not 2 <= self.lo <= self.hi:
            raise ValueError(f"invalid base range [{self.lo}, {self.hi}]")
        if self.param < 1:
            raise ValueError("campaign parameter must be >= 1")
        if self.kind in ("M", "PB") and self.m != 2:
            raise ValueError(f"{self.kind} campaigns are defined for x^2 only")

    def fingerprint(self) -> str:
        return hashlib.sha256(json.dumps(asdict(self), sort_keys=True).encode()).hexdigest()

    def shards(self) -> list[tuple[int, int]]:
        return [(a, min(a + SHARD_SIZE - 1, self.hi)) for a in range(self.lo, self.hi + 1, SHARD_SIZE)]


def estimated_steps(c: Campaign) -> int:
    return sum(stewart_bound(c.m, b) for b in range(c.lo, c.hi + 1))


def prefilter_primality(b: int) -> tuple[bool, bool]:
    """(b^2 + 1 is prime, verdict is deterministic)."""
    return miller_rabin(b * b + 1)


@dataclass(frozen=True)
class LineLibrary:
    lines: tuple[IntegerLine, ...]

    def __post_init__(self):
        for line in self.lines:
            b0 = line.point.base
            if math.gcd(b0 * b0 + 1, line.lam) != 1 or not line.on_variety():
                raise ValueError(f"invalid library line {line}")


def build_line_library(max_b0: int = 200) -> LineLibrary:
    """Certified second lines through propagating 2-cycles with gcd(b0^2 + 1, slope) = 1."""
    out = []
    for b0 in range(2, max_b0 + 1):
        for c in enumerate_cycles(b0).propagating(2):
            line = second_line_for_cycle(c)
            if certifies_propagation(line) and math.gcd(b0 * b0 + 1, line.lam) == 1:
                out.append(line)
    return LineLibrary(tuple(out))


def prefilter_known_lines(b: int, lib: LineLibrary):
    """A verified propagated 2-cycle in base b from a library line, or None."""
    for line in lib.lines:
        b0 = line.point.base
        if b >= b0 and (b - b0) % line.lam == 0:
            try:
                return propagate(line, (b - b0) // line.lam)
            except PropagationError:
                log.warning("library line %s failed to propagate to base %d", line, b)
    return None


def census_summary(b: int, m: int = 2, mem_limit: int | None = DEFAULT_MEM_LIMIT) -> dict:
    """Per-length cycle counts of the complete census; refuses censuses over the memory limit."""
    need = dense_cache_bytes(stewart_bound(m, b))
    if mem_limit is not None and need > mem_limit:
        raise ResourceLimitError(need, mem_limit)
    return enumerate_cycles(b, m, mem_limit=mem_limit).summary()


def _witness(cycles):
    return [{"length": c.length, "min": c.members[0]} for c in cycles]


def evaluate_base(c: Campaign, b: int, lib: LineLibrary | None = None, mem_limit: int | None = DEFAULT_MEM_LIMIT) -> dict:
    rec = {"b": b, "kind": c.kind, "param": c.param}
    ev: dict = {}
    if c.kind == "L":
        i = c.param
        if c.m == 2 and i <= 2 and c.primality_prefilter:
            prime, det = prefilter_primality(b)
            if not prime:
                ev = {"prefilter": "b^2+1 composite", "one_cycles": count_1cycles(b)}
                return {**rec, "verdict": "miss", "evidence": ev}
            if not det:
                ev["primality"] = "probabilistic"
        if lib is not None and c.m == 2:
            known = prefilter_known_lines(b, lib)
            if known is not None:
                ev["known_cycle"] = list(known.members)
                cl = enumerate_cycles(b, c.m, stop_above_count=i - 1, mem_limit=mem_limit)
                found = set(cl.cycles) | {known}
                if len(found) > i:
                    ev.update(cycles_found=len(found), witness=_witness(sorted(found, key=lambda x: x.sort_key())))
                    return {**rec, "verdict": "miss", "evidence": ev}
        cl = enumerate_cycles(b, c.m, stop_above_count=i, mem_limit=mem_limit)
        if cl.early_exit:
            ev.update(cycles_found=cl.total, witness=_witness(cl.cycles))
            return {**rec, "verdict": "miss", "evidence": ev}
        ev.update(total=cl.total, counts_by_length=cl.counts_by_length, cycles=_witness(cl.cycles))
        return {**rec, "verdict": "hit" if cl.total == i else "miss", "evidence": ev}
    if c.kind == "M":
        cl = enumerate_cycles(b, 2, stop_above_length=c.param, mem_limit=mem_limit)
        if cl.early_exit:
            long = [x for x in cl.cycles if x.length > c.param]
            return {**rec, "verdict": "miss", "evidence": {"witness": _witness(long[:1])}}
        ev = {"total": cl.total, "counts_by_length": cl.counts_by_length, "max_length": cl.max_length}
        return {**rec, "verdict": "hit", "evidence": ev}
    cl = enumerate_cycles(b, 2, mem_limit=mem_limit)
    props = [x for x in cl.propagating(c.param) if not x.trivial]
    ev = {"propagating": [list(x.members) for x in props]}
    return {**rec, "verdict": "hit" if props else "miss", "evidence": ev}


def _run_shard(args):
    c, lo, hi, lib, mem_limit = args
    return lo, hi, [evaluate_base(c, b, lib, mem_limit) for b in range(lo, hi + 1)]


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class Checkpoint:
    """Text checkpoint: a header line, then one hash-chained record per completed shard.

    Record line: ``<lo> <hi> <sha256(prev_hash + payload)> <payload json>``.
    """

    def __init__(self, path: str | os.PathLike, campaign: Campaign):
        self.path = Path(path)
        self.campaign = campaign
        self.records: dict[tuple[int, int], list[dict]] = {}
        self.lines: list[str] = []
        self.head = campaign.fingerprint()
        if self.path.exists():
            self._load()

    def _load(self):
        text = self.path.read_text().splitlines()
        if not text:
            raise CheckpointError("empty checkpoint file")
        header = text[0].split(" ", 2)
        if header[0] != "campaign" or len(header) != 3:
            raise CheckpointError("malformed checkpoint header")
        if header[1] != self.campaign.fingerprint():
            raise CheckpointError("checkpoint belongs to a different campaign: " + header[2])
        prev = header[1]
        for line in text[1:]:
            try:
                lo, hi, digest, payload = line.split(" ", 3)
            except ValueError:
                raise CheckpointError("malformed checkpoint record") from None
            if hashlib.sha256((prev + payload).encode()).hexdigest() != digest:
                raise CheckpointError(f"hash chain broken at shard {lo}-{hi}")
            self.records[(int(lo), int(hi))] = json.loads(payload)
            self.lines.append(line)
            prev = digest
        self.head = prev

    def add(self, lo: int, hi: int, results: list[dict]):
        payload = _dumps(results)
        digest = hashlib.sha256((self.head + payload).encode()).hexdigest()
        self.lines.append(f"{lo} {hi} {digest} {payload}")
        self.records[(lo, hi)] = results
        self.head = digest
        header = f"campaign {self.campaign.fingerprint()} {_dumps(asdict(self.campaign))}"
        tmp = self.path.with_name(self.path.name + ".tmp")
        tmp.write_text("\n".join([header, *self.lines]) + "\n")
        os.replace(tmp, self.path)


def run_campaign(
    c: Campaign,
    *,
    jobs: int = 1,
    checkpoint: str | os.PathLike | None = None,
    budget: int = DEFAULT_BUDGET,
    force: bool = False,
    library: LineLibrary | None = None,
    max_shards: int | None = None,
    mem_limit: int | None = DEFAULT_MEM_LIMIT,
) -> list[dict]:
    """Evaluate every base in the campaign range; results are sorted by base.

    ``max_shards`` stops after that many newly completed shards (used to simulate interruption).
    """
    if c.kind in ("L", "M") and not force:
        est = estimated_steps(c)
        if est > budget:
            raise BudgetError(f"estimated {est:.3g} census steps exceeds the budget {budget:.3g}; use force")
    if c.known_lines and library is None:
        library = build_line_library()
    lib = library if c.known_lines else None
    ck = Checkpoint(checkpoint, c) if checkpoint is not None else None
    done = dict(ck.records) if ck else {}
    todo = [s for s in c.shards() if s not in done]
    if max_shards is not None:
        todo = todo[:max_shards]
    tasks = [(c, lo, hi, lib, mem_limit) for lo, hi in todo]

    def record(lo, hi, res):
        done[(lo, hi)] = res
        if ck:
            ck.add(lo, hi, res)

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            for fut in as_completed([ex.submit(_run_shard, t) for t in tasks]):
                record(*fut.result())
    else:
        for t in tasks:
            record(*_run_shard(t))
    return sorted((r for res in done.values() for r in res), key=lambda r: r["b"])


def hits(results: list[dict]) -> list[int]:
    return [r["b"] for r in results if r["verdict"] == "hit"]


def to_jsonl(results: list[dict]) -> str:
    return "".join(_dumps(r) + "\n" for r in results)
