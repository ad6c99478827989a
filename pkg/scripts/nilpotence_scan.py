"""S-nilpotence orders of [g, e_j] for plus vertices g in a ball, modulo P(T)."""
import argparse
from collections import Counter

from modp_gl2.cind import CInd
from modp_gl2.gl2 import PLUS
from modp_gl2.quotient import quotient_make, s_nilpotence_order
from modp_gl2.weights import Weight


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--r", type=int, default=0)
    ap.add_argument("--poly", default="T")
    ap.add_argument("--N", type=int, default=8)
    ap.add_argument("--ball", type=int, default=2)
    ap.add_argument("--max-m", type=int, default=5)
    args = ap.parse_args()
    ctx = CInd(Weight(args.p, 1, (args.r,)), rmax=args.N + 6)
    pi = quotient_make(ctx, args.poly, [], N=args.N)
    orders = Counter()
    for v in ctx.ball_vertices(args.ball):
        if v[0] != PLUS:
            continue
        for j in range(ctx.D):
            m = s_nilpotence_order(pi, ctx.element(v, [int(i == j) for i in range(ctx.D)]), args.max_m)
            orders[m] += 1
            print(v, j, m)
    print("histogram (None = not nilpotent within max-m):", dict(orders))


if __name__ == "__main__":
    main()
