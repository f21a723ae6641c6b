"""Desk-scale L / M campaigns with checkpoints; extend the ranges with --to and --force for longer runs."""
from __future__ import annotations

import argparse
import json
from pathlib import Path

from digitdyn import search as S

DEFAULTS = [
    ("L", 2, 2, 1000),   # {6, 10, 16, 20, 26, 40}
    ("L", 1, 2, 1000),   # {2, 4}
    ("M", 2, 2, 500),    # {2, 3, 4, 13, 18, 92}
    ("M", 10, 400, 2000),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs", help="directory for checkpoints and results")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--known-lines", action="store_true")
    ap.add_argument("--force", action="store_true")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(exist_ok=True)
    lib = S.build_line_library() if args.known_lines else None
    for kind, param, lo, hi in DEFAULTS:
        c = S.Campaign(kind, param, lo, hi, known_lines=args.known_lines)
        stem = f"{kind}{param}_{lo}_{hi}"
        res = S.run_campaign(c, jobs=args.jobs, checkpoint=out / f"{stem}.ckpt", force=args.force, library=lib)
        (out / f"{stem}.jsonl").write_text(S.to_jsonl(res))
        print(json.dumps({"kind": kind, "param": param, "range": [lo, hi], "hits": S.hits(res)}))


if __name__ == "__main__":
    main()
