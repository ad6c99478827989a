"""Compare the kernel from normal forms with a breadth-first span closure."""
import argparse
import time

from modp_gl2.cind import CInd
from modp_gl2.quotient import kernel_oracle, quotient_make
from modp_gl2.weights import weight_grid


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--f", type=int, default=1)
    ap.add_argument("--backend", default="equal", choices=["equal", "mixed"])
    ap.add_argument("--N", type=int, default=3)
    ap.add_argument("--slacks", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--lam", type=int, default=1)
    ap.add_argument("--special", action="store_true")
    args = ap.parse_args()
    for sigma in weight_grid(args.p, args.f):
        if args.special and sigma.r_vec != (args.p - 1,) * args.f:
            continue
        ctx = CInd(sigma, backend=args.backend, rmax=args.N + 8)
        pi = quotient_make(ctx, [ctx.F.neg(args.lam), 1], ["special"] if args.special else [], N=args.N, slack=0)
        t = time.perf_counter()
        ref = pi.kernel_basis(args.N, 0).dim
        dims = [kernel_oracle(pi, args.N, s).dim for s in args.slacks]
        status = "ok" if all(d == ref for d in dims) else "MISMATCH"
        print(f"{sigma.text():>24}  normal form {ref}  oracle {dims}  {status}  {time.perf_counter() - t:.1f}s")


if __name__ == "__main__":
    main()
