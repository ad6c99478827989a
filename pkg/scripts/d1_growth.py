"""Print dim D1 by radius for V(sigma, lambda) and cInd/P over a small weight grid.

    python scripts/d1_growth.py --p 3 --radii 2 3 4 5 --backend equal
"""
import argparse

from modp_gl2.cind import CInd
from modp_gl2.diagram import d1_growth
from modp_gl2.quotient import invariants_I1, quotient_make
from modp_gl2.weights import weight_grid


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--f", type=int, default=1)
    ap.add_argument("--backend", default="equal", choices=["equal", "mixed"])
    ap.add_argument("--radii", type=int, nargs="+", default=[2, 3, 4, 5])
    ap.add_argument("--poly", default=None, help="override P, e.g. T or T^2")
    args = ap.parse_args()
    top = max(args.radii)
    for sigma in weight_grid(args.p, args.f):
        ctx = CInd(sigma, backend=args.backend, rmax=top + 6)
        polys = [args.poly] if args.poly else ["T"] + [f"T-{lam}" for lam in range(1, args.p)]
        for P in polys:
            pi = quotient_make(ctx, P, [], N=top + 1)
            curve = d1_growth(pi, args.radii)
            i1 = [invariants_I1(pi, n).dim for n in args.radii]
            print(f"{sigma.text():>24}  {P:>6}  D1 {[d for _, d in curve]}  I1 {i1}")


if __name__ == "__main__":
    main()
