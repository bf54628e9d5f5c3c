#!/usr/bin/env python3
"""Write the two shipped benchmark corpora to disk as .evcs files."""
import argparse
from pathlib import Path

from evcs.corpus import (generate, reference_spec, reference_spec_spaced,
                         write_instance)


def dump(spec, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    instances = generate(spec)
    for k, inst in enumerate(instances):
        write_instance(inst, out_dir / f"instance_{k:04d}.evcs")
    print(f"{out_dir}: {len(instances)} instances (seed {spec.seed})")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data", help="output root directory")
    args = parser.parse_args()
    root = Path(args.out)
    dump(reference_spec(), root / "reference")
    dump(reference_spec_spaced(), root / "spaced")


if __name__ == "__main__":
    main()
