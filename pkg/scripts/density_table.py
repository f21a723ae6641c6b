"""Propagating-cycle counts and certified density bounds for PB(l), l = 1..5, plus the two-line l=2 bound."""
from __future__ import annotations

import argparse
import sys
import time

from digitdyn import density as D


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-base", type=int, default=500)
    ap.add_argument("--two-line-max-base", type=int, default=1000)
    ap.add_argument("--allow", type=int, action="append", default=None)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    allow = tuple(args.allow) if args.allow else (2 * 17**3,)

    fams = []
    for ell in range(1, 6):
        t0 = time.perf_counter()
        fam = D.prune_and_bound(D.collect_progressions(ell, args.max_base, jobs=args.jobs))
        fams.append(fam)
        print(f"l={ell}: |P|={fam.cycle_count} bound={D.floor_decimal(fam.bound)} ({time.perf_counter() - t0:.1f}s)",
              file=sys.stderr)
    for extra in ((), allow):
        fam = D.collect_progressions(2, args.two_line_max_base, D.BOTH_LINES, jobs=args.jobs)
        fam = D.prune_and_bound(fam, extra)
        fams.append(fam)
        print(f"l=2 both lines N={args.two_line_max_base} allow={extra}: bound={D.floor_decimal(fam.bound)}",
              file=sys.stderr)
    sys.stdout.write(D.to_csv(fams))


if __name__ == "__main__":
    main()
