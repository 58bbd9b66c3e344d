"""Solve LP1 and LP2 exactly on random patterns and confirm equal optima.

Patterns small enough for brute-force vertex enumeration are also checked
against that oracle. Prints a histogram of the optimal values.
"""

import argparse
import sys
import time
from collections import Counter

import numpy as np

from pirpattern.errors import TooLarge
from pirpattern.pattern import incidence, random_pattern
from pirpattern.ratlp import build_lp1, build_lp2, enumerate_vertices, fmt, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--m-max", type=int, default=10)
    ap.add_argument("--no-oracle", action="store_true")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    start = time.perf_counter()
    values = Counter()
    mismatches = oracle = 0
    for _ in range(args.count):
        p = random_pattern(rng, n_max=args.n_max, m_max=args.m_max)
        lp1, lp2 = build_lp1(incidence(p)), build_lp2(incidence(p))
        s1, s2 = solve(lp1), solve(lp2)
        values[s1.optimal_value] += 1
        ok = s1.optimal_value == s2.optimal_value
        if ok and not args.no_oracle:
            try:
                ok = max(lp1.value(v) for v in enumerate_vertices(lp1)) == s1.optimal_value
                ok = ok and min(lp2.value(v) for v in enumerate_vertices(lp2)) == s2.optimal_value
                oracle += 1
            except TooLarge:
                pass
        if not ok:
            mismatches += 1
            print(f"mismatch: {p} LP1={fmt(s1.optimal_value)} LP2={fmt(s2.optimal_value)}")
    elapsed = time.perf_counter() - start

    print(f"{args.count} patterns, {mismatches} mismatches, {oracle} checked by vertex enumeration, {elapsed:.1f}s")
    print("S*        count")
    for v, c in sorted(values.items()):
        print(f"{fmt(v):<9} {c}")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
