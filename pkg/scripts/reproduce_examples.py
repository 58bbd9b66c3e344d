"""Recompute the six worked examples and print them next to their reference values."""

import argparse
import sys

from pirpattern.demo import render, run_examples


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rows = run_examples(seed=args.seed)
    print(render(rows))
    return 0 if all(r.ok for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
