"""Command-line interface. Output is JSON lines by default, CSV with --csv."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import random
import sys
from fractions import Fraction

from . import core, density, families, lines, onecycle, search

log = logging.getLogger("digitdyn")


def _rational(q: Fraction) -> dict:
    return {"rational": f"{q.numerator}/{q.denominator}", "decimal": density.floor_decimal(q)}


def _cycle(c: core.Cycle) -> dict:
    out = {"length": c.length, "members": list(c.members), "digits": [str(core.expand(n, c.base)) for n in c.members]}
    if c.propagating is not None:
        out["propagating"] = c.propagating
    return out


def _csv_safe(v):
    return json.dumps(v, separators=(",", ":")) if isinstance(v, (list, dict)) else v


class Emitter:
    def __init__(self, args):
        self.fmt = "csv" if args.csv else "json"
        self.command = args.command
        self.params = {k: v for k, v in vars(args).items() if k not in ("func", "json", "csv") and v is not None}

    def emit(self, result, evidence=None, rows=None):
        if self.fmt == "csv":
            rows = rows if rows is not None else [result if isinstance(result, dict) else {"result": result}]
            if rows:
                w = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
                w.writeheader()
                for r in rows:
                    w.writerow({k: _csv_safe(v) for k, v in r.items()})
            return
        rec = {"command": self.command, "params": self.params, "result": result}
        if evidence is not None:
            rec["evidence"] = evidence
        print(json.dumps(rec, sort_keys=True, default=str))


def cmd_orbit(args, out):
    o = core.orbit(args.n, args.base, args.exp)
    res = {"start": str(o.start), "start_digits": str(core.expand(o.start, args.base)), "tail": [str(x) for x in o.tail],
           "cycle": _cycle(o.cycle), "distinct_count": o.distinct_count}
    out.emit(res, rows=[{"index": i, "value": str(x)} for i, x in enumerate([*o.tail, *o.cycle.members])])


def cmd_cycles(args, out):
    cl = core.enumerate_cycles(args.base, args.exp, args.scan_bound, mem_limit=args.mem_limit)
    if args.summary:
        s = cl.summary()
        out.emit(s, rows=[{"length": k, "count": v} for k, v in s["counts_by_length"].items()])
    else:
        res = {"summary": cl.summary(), "cycles": [_cycle(c) for c in cl.cycles]}
        out.emit(res, rows=[{"length": c.length, "min": c.members[0], "members": list(c.members)} for c in cl.cycles])


def cmd_onecycles(args, out):
    cs = onecycle.enumerate_1cycles(args.base)
    items = []
    for c in cs:
        item = {"n": c.n, "x": c.x, "y": c.y, "d": c.d}
        if not c.trivial:
            dec = onecycle.decompose_1cycle(c)
            item.update(dual=dec.dual_n, D=dec.dual_d, g=dec.g, g_dual=dec.g_dual, h=dec.h, h_dual=dec.h_dual)
        items.append(item)
    out.emit({"count": len(cs), "proper_divisors_of_b2p1": onecycle.count_1cycles(args.base), "cycles": items}, rows=items)


def _line_out(line: lines.IntegerLine, args, out, extra=None):
    d = line.to_dict()
    d["reduced"] = line.reduced
    d["text"] = str(line)
    if extra:
        d.update(extra)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            json.dump(line.to_dict(), fh)
    return d


def cmd_lines(args, out):
    if args.which == "first":
        members = tuple(int(x) for x in args.cycle.split(","))
        c = core.Cycle(members, args.base)
        if not c.verify():
            raise ValueError(f"{c} is not a cycle of S_(x^2,{args.base})")
        raw = lines.first_line(c)
        red = lines.reduce_line(raw)
        out.emit({"line": _line_out(red, args, out), "unreduced_lam": raw.lam})
    elif args.which == "v1":
        b0, x0, y0 = args.coords
        a, s = lines.v1_lines(b0, x0, y0)
        out.emit({"first": _line_out(a, argparse.Namespace(), out), "second": _line_out(s, args, out),
                  "d": onecycle.OneCycle(b0, x0, y0).d})
    else:
        b0, x0, y0, u0, v0 = args.coords
        line = lines.v2_second_line(b0, x0, y0, u0, v0)
        out.emit({"line": _line_out(line, args, out), "propagation_certified": lines.certifies_propagation(line)},
                 evidence={"D": str(lines.evaluate_D(b0, x0, y0, u0, v0))})


def cmd_propagate(args, out):
    with open(args.line) as fh:
        line = lines.IntegerLine.from_dict(json.load(fh))
    c = lines.propagate(line, args.t)
    out.emit({"base": c.base, "cycle": _cycle(c)}, evidence={"verified": True})


def cmd_density(args, out):
    policy = density.BOTH_LINES if args.second_lines else density.FIRST_ONLY
    fam = density.collect_progressions(args.ell, args.max_base, policy, jobs=args.jobs)
    fam = density.prune_and_bound(fam, tuple(args.allow or ()))
    ev = None
    if args.certify:
        rng = random.Random(args.seed)
        bad = [p.key for p in fam.retained
               if not density.certify_progression(p, args.ell, [rng.randrange(1, 10**6) for _ in range(args.certify)])]
        ev = {"certified": len(fam.retained) - len(bad), "failed": bad}
    row = density.csv_row(fam)
    res = {**row, "bound": _rational(fam.bound), "groups": len(fam.groups)}
    out.emit(res, evidence=ev, rows=[row])


def cmd_search(args, out):
    c = search.Campaign(args.kind, args.param, args.lo, args.hi, m=args.exp,
                        primality_prefilter=not args.no_prefilter, known_lines=args.known_lines)
    res = search.run_campaign(c, jobs=args.jobs, checkpoint=args.checkpoint, force=args.force,
                              budget=args.budget, mem_limit=args.mem_limit)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(search.to_jsonl(res))
    if out.fmt == "csv":
        out.emit(None, rows=[{k: r[k] for k in ("b", "kind", "param", "verdict")} for r in res])
    elif args.all:
        for r in res:
            print(json.dumps(r, sort_keys=True))
    else:
        out.emit({"hits": search.hits(res), "scanned": len(res)})


def cmd_families(args, out):
    if args.action == "list":
        specs = families.FAMILIES.values()
        out.emit([{"id": f.id, "params": list(f.params), "claim": f.claim, "description": f.description} for f in specs])
        return
    spec = families.FAMILIES[args.id]
    fixed = dict(kv.split("=") for kv in (args.fixed or []))
    free = [p for p in spec.params if p not in fixed]
    if len(free) != 1:
        raise ValueError(f"{spec.id} needs all but one of {spec.params} fixed via --fixed")
    lo = dict(zip(spec.params, spec.minimums))[free[0]]
    hi = args.max_param
    values = range(lo, hi + 1)
    if args.sample:
        rng = random.Random(args.seed)
        values = sorted(rng.sample(values, min(args.sample, len(values))))
    count = 0
    for v in values:
        params = [int(fixed[p]) if p in fixed else v for p in spec.params]
        count += len(families.instantiate_family(spec.id, *params))
    out.emit({"id": spec.id, "verified_instances": len(values), "verified_cycles": count, "free": free[0],
              "range": [lo, hi]})


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="digitdyn", description="Digit-power-sum dynamics toolkit.")
    fmt = ap.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON-lines output (default)")
    fmt.add_argument("--csv", action="store_true", help="CSV output")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized sampling")
    ap.add_argument("--mem-limit", type=int, default=search.DEFAULT_MEM_LIMIT, help="census cache limit in bytes")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", help="orbit of n under S_(x^m,b)")
    p.add_argument("n", type=int)
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--exp", type=int, default=2)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("cycles", help="cycle census of one base")
    p.add_argument("base", type=int)
    p.add_argument("--exp", type=int, default=2)
    p.add_argument("--scan-bound", type=int)
    p.add_argument("--summary", action="store_true")
    p.set_defaults(func=cmd_cycles)

    p = sub.add_parser("onecycles", help="1-cycles of S_(x^2,b) with duals and decompositions")
    p.add_argument("base", type=int)
    p.set_defaults(func=cmd_onecycles)

    p = sub.add_parser("lines", help="lines on the cycle varieties")
    lsub = p.add_subparsers(dest="which", required=True)
    q = lsub.add_parser("first", help="reduced first line through a cycle")
    q.add_argument("--base", type=int, required=True)
    q.add_argument("--cycle", required=True, help="comma-separated cycle members")
    q.add_argument("--out", help="write the line as JSON")
    q = lsub.add_parser("v1", help="the two lines on V_1 through (b0, x0, y0)")
    q.add_argument("coords", type=int, nargs=3, metavar=("B0", "X0", "Y0"))
    q.add_argument("--out")
    q = lsub.add_parser("v2", help="second line on V_2 through (b0, x0, y0, u0, v0)")
    q.add_argument("coords", type=int, nargs=5, metavar=("B0", "X0", "Y0", "U0", "V0"))
    q.add_argument("--out")
    p.set_defaults(func=cmd_lines)

    p = sub.add_parser("propagate", help="propagate a cycle along a saved line")
    p.add_argument("--line", required=True)
    p.add_argument("--t", type=int, required=True)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("density", help="lower density bound for PB(l)")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--max-base", type=int, required=True)
    p.add_argument("--second-lines", action="store_true")
    p.add_argument("--allow", type=int, action="append", help="extra composite modulus to keep (repeatable)")
    p.add_argument("--certify", type=int, default=0, help="check each retained progression at k random t")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("search", help="checkpointed L / M / PB campaign")
    p.add_argument("kind", choices=search.KINDS)
    p.add_argument("--param", type=int, required=True)
    p.add_argument("--from", dest="lo", type=int, required=True)
    p.add_argument("--to", dest="hi", type=int, required=True)
    p.add_argument("--exp", type=int, default=2)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--checkpoint")
    p.add_argument("--force", action="store_true")
    p.add_argument("--budget", type=int, default=search.DEFAULT_BUDGET)
    p.add_argument("--known-lines", action="store_true")
    p.add_argument("--no-prefilter", action="store_true")
    p.add_argument("--out", help="write all results as JSON lines")
    p.add_argument("--all", action="store_true", help="print every result record")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("families", help="parametric cycle families")
    fsub = p.add_subparsers(dest="action", required=True)
    fsub.add_parser("list")
    q = fsub.add_parser("verify")
    q.add_argument("--id", required=True, choices=sorted(families.FAMILIES))
    q.add_argument("--max-param", type=int, required=True)
    q.add_argument("--fixed", action="append", help="name=value for the other parameters")
    q.add_argument("--sample", type=int, help="verify a random sample of this size")
    p.set_defaults(func=cmd_families)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    out = Emitter(args)
    try:
        args.func(args, out)
    except (ValueError, ArithmeticError, AssertionError, MemoryError, RuntimeError, KeyError, OSError) as e:
        rec = {"command": args.command, "error": type(e).__name__, "message": str(e)}
        print(json.dumps(rec, sort_keys=True))
        print(f"digitdyn: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
