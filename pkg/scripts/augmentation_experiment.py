#!/usr/bin/env python3
"""Minimum augmentation per policy on the spaced corpus, next to the
closed-form guarantees for that corpus."""
import argparse
import csv
import math
import sys

from evcs.augmentation import (AugmentationMode, corpus_bound_inputs,
                               min_feasible_eps, theorem1_bound, theorem2_bound)
from evcs.corpus import generate, reference_spec_spaced
from evcs.schedulers import POLICIES


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--algs", default=",".join(sorted(POLICIES)))
    parser.add_argument("--out", default="-", help="CSV path, - for stdout")
    args = parser.parse_args()

    instances = generate(reference_spec_spaced())
    bound1 = theorem1_bound(corpus_bound_inputs(instances))
    bound2 = max(max(theorem2_bound(inst), 0.0) for inst in instances)
    rows = []
    for name in args.algs.split(","):
        for mode in AugmentationMode:
            eps = min_feasible_eps(instances, name, mode)
            rows.append({
                "algorithm": name,
                "mode": mode.value,
                "min_eps": eps if math.isfinite(eps) else "unbounded",
                "theorem1_bound": round(bound1, 4),
                "theorem2_bound_max": round(bound2, 4),
            })

    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    writer = csv.DictWriter(out, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)
    if out is not sys.stdout:
        out.close()
        print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
