"""Second lines on V_2 through every propagating 2-cycle with b0 <= N: solve, certify, tabulate."""
from __future__ import annotations

import argparse
import collections
import math

from digitdyn.core import enumerate_cycles
from digitdyn.lines import NoSecondLineError, certifies_propagation, second_line_for_cycle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-base", type=int, default=300)
    ap.add_argument("--show", type=int, default=10)
    args = ap.parse_args()
    tally = collections.Counter()
    shown = 0
    for b0 in range(2, args.max_base + 1):
        for c in enumerate_cycles(b0).propagating(2):
            try:
                line = second_line_for_cycle(c)
            except NoSecondLineError:
                tally["unsolved"] += 1
                continue
            tally["solved"] += 1
            cert = certifies_propagation(line)
            tally["certified"] += cert
            tally["coprime"] += cert and math.gcd(b0 * b0 + 1, line.lam) == 1
            if shown < args.show:
                print(f"{c}: {line}  certified={cert}")
                shown += 1
    print(dict(tally))


if __name__ == "__main__":
    main()
