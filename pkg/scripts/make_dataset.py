#!/usr/bin/env python3
"""Generate a synthetic sandbox plus a directory of session query files.

Usage: python scripts/make_dataset.py --out runs/demo --seed 7 --cities 8 --queries 20
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

from triplan import load_dataset, query_to_dict
from triplan.datagen import generate_dataset, generate_query


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--cities", type=int, default=8)
    parser.add_argument("--queries", type=int, default=20)
    parser.add_argument("--multi-turn", action="store_true",
                        help="append a budget-tightening second turn to half the queries")
    args = parser.parse_args()

    out = Path(args.out)
    manifest = generate_dataset(args.seed, args.cities, out / "sandbox")
    sb = load_dataset(out / "sandbox")
    rng = random.Random(args.seed)
    qdir = out / "queries"
    qdir.mkdir(parents=True, exist_ok=True)
    for i in range(args.queries):
        days = rng.choice([3, 3, 5, 7])
        q = generate_query(rng, sb, days=days, budget_scale=rng.choice([0.6, 1.0, 1.4]))
        if args.multi_turn and i % 2 == 0:
            payload = {"turns": [
                {"query": query_to_dict(q)},
                {"patches": [{"op": "modify", "field": "budget",
                              "value": round(q.budget * 0.85)}]},
            ]}
        else:
            payload = query_to_dict(q)
        (qdir / f"q{i:03d}.json").write_text(json.dumps(payload, indent=2))
    print(json.dumps({"sandbox": manifest["counts"], "queries": args.queries}, indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
