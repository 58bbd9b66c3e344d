"""Run the retrieval scheme on the special-case families and compare the
measured rate with the verified converse bound."""

import argparse
import sys

from pirpattern.converse import converse_bound
from pirpattern.pattern import generate
from pirpattern.ratlp import fmt
from pirpattern.scheme import synthesize
from pirpattern.sim import measured_rate, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=6)
    ap.add_argument("--k-max", type=int, default=3)
    ap.add_argument("--max-length", type=int, default=400, help="skip plans with a longer block")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'pattern':<22} {'K':>2} {'L':>6} {'q':>5} {'rate':>8} {'bound':>8}")
    bad = 0
    for n in range(1, args.n_max + 1):
        for t in range(1, n + 1):
            p = generate("t_colluding", n, t)
            for k in range(1, args.k_max + 1):
                plan = synthesize(p, k, 1, seed=args.seed)
                if plan.block_length > args.max_length:
                    continue
                tr = run(plan)
                bound, _ = converse_bound(p, k)
                rate = measured_rate(tr)
                flag = "" if tr.success and rate == bound else "  MISMATCH"
                bad += bool(flag)
                print(f"{f't_colluding({n},{t})':<22} {k:>2} {plan.block_length:>6} {plan.field:>5} "
                      f"{fmt(rate):>8} {fmt(bound):>8}{flag}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
