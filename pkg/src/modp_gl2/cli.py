"""Command line front end: verification suites, element operations and reports."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

from . import linalg
from .cind import CInd, InducedElement, m_n_plus_basis, monomial_invariants, s_apply
from .diagram import d0_compute, d1_compute, level, make_diagram, presentation_spans, r0_generators
from .errors import ConfigError, ModpError
from .gl2 import (MINUS, PLUS, cartan_word, equal_mod_precision, g_mul, identity, iwahori_factor, k_coset,
                  make, parse, random_element, random_i1, random_k, reassemble, s_elem, upper)
from .linalg import SparseEchelon
from .localring import is_prime
from .quotient import fixed_subspace, invariants_I1, parse_poly, quotient_make, s_nilpotence_order
from .weights import Weight

SCHEMA_VERSION = 1
SUITES = ("decompositions", "hecke", "s-operator", "d1-dims", "invariants", "char-p-nilpotence", "presentation")


@dataclass
class Scenario:
    backend: str = "equal"
    p: int = 3
    f: int = 1
    r: str = "1"
    a: int = 0
    z: int = 1
    m: int | None = None
    poly: str = "T-1"
    rel: str = "none"
    radius: int = 4
    slack: int = 1
    samples: int = 200
    seed: int = 0

    def validate(self) -> None:
        if self.backend not in ("equal", "mixed"):
            raise ConfigError("backend must be 'equal' or 'mixed'")
        if not is_prime(self.p):
            raise ConfigError(f"p = {self.p} is not prime")
        if self.f < 1 or (self.backend == "mixed" and self.f != 1):
            raise ConfigError("mixed characteristic supports f = 1 only")
        if self.rel not in ("none", "special"):
            raise ConfigError("relation preset must be 'none' or 'special'")
        if self.radius < 1 or self.slack < 0 or self.samples < 0:
            raise ConfigError("radius >= 1, slack >= 0, samples >= 0 required")
        self.weight()

    def r_vec(self) -> tuple:
        try:
            r = tuple(int(x) for x in self.r.split(":"))
        except ValueError:
            raise ConfigError(f"bad exponent vector {self.r!r}") from None
        return r + (0,) * (self.f - len(r)) if len(r) < self.f else r

    def weight(self) -> Weight:
        return Weight(self.p, self.f, self.r_vec(), self.a, self.z, self.m)

    def cind(self) -> CInd:
        return CInd(self.weight(), backend=self.backend, rmax=self.radius + 4)

    def quotient(self, ctx: CInd | None = None):
        ctx = ctx or self.cind()
        rels = ["special"] if self.rel == "special" else []
        return quotient_make(ctx, self.poly, rels, N=self.radius + 1, slack=self.slack)


@dataclass
class Check:
    statement_id: str
    expected: object
    got: object
    passed: bool
    warning: str = ""

    def row(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def _check(sid: str, expected, got, ok: bool | None = None, warning: str = "") -> Check:
    return Check(sid, expected, got, bool(expected == got if ok is None else ok), warning)


# ---------------------------------------------------------------- suites


def suite_decompositions(sc: Scenario) -> list[Check]:
    ctx = sc.cind()
    R = ctx.ring
    rng = random.Random(sc.seed)
    bad_word = bad_iw = bad_k = 0
    for _ in range(sc.samples):
        g = random_element(R, rng)
        if not equal_mod_precision(reassemble(cartan_word(g)), g):
            bad_word += 1
        i = random_i1(R, rng)
        u, d, l = iwahori_factor(i)
        if not equal_mod_precision(g_mul(g_mul(u, d), l), i):
            bad_iw += 1
        k = random_k(R, rng)
        c = k_coset(k)
        back = c.i if not hasattr(c, "lam") else g_mul(make(R, (R.teich(c.lam), R.one(), R.one(), R.zero())), c.i)
        if not equal_mod_precision(back, k):
            bad_k += 1
    return [_check("decomposition.cartan-word", 0, bad_word), _check("decomposition.iwahori", 0, bad_iw),
            _check("decomposition.k-mod-i", 0, bad_k)]


def _random_vec(ctx: CInd, rng: random.Random, R: int = 2, terms: int = 3) -> dict:
    verts = ctx.ball_vertices(R)
    out: dict = {}
    for _ in range(terms):
        ctx.from_block(rng.choice(verts), [rng.randrange(ctx.F.q) for _ in range(ctx.D)], out)
    return out


def hecke_formula(ctx: CInd) -> dict:
    """Expected T[Id, v0]: sum of [g_lam, v0], plus (-1)^a [Pi, v0] when dim sigma = 1."""
    sig = ctx.fiber
    v0 = sig.v0()
    out: dict = {}
    for lam in range(ctx.q):
        ctx.from_block((PLUS, (lam,)), v0, out)
    if ctx.D == 1:
        c = 1 if sig.det_twist % 2 == 0 or ctx.F.p == 2 else ctx.F.neg(1)
        ctx.from_block((MINUS, ()), [c], out)
    return out


def suite_hecke(sc: Scenario) -> list[Check]:
    ctx = sc.cind()
    rng = random.Random(sc.seed)
    got = ctx.hecke(ctx.element((PLUS, ()), ctx.fiber.v0()))
    bad = 0
    for _ in range(sc.samples):
        g = random_element(ctx.ring, rng, max_len=2, digits=3)
        v = _random_vec(ctx, rng)
        if ctx.hecke(ctx.act(g, v)) != ctx.act(g, ctx.hecke(v)):
            bad += 1
    return [_check("hecke.value-at-v0", True, got == hecke_formula(ctx)), _check("hecke.equivariance", 0, bad)]


def s_identity_rhs(ctx: CInd, v: dict) -> dict:
    """Pi v + sum over lam != 0 of (w, lam^-1; 0, 1)(-lam^-1, 0; w, lam) v."""
    R, F = ctx.ring, ctx.ring.residue
    out = ctx.pi(v)
    for lam in range(1, ctx.q):
        li = F.inv(lam)
        g1 = make(R, (R.pi_power(1), R.teich(li), R.zero(), R.one()))
        g2 = make(R, (R.neg(R.teich(li)), R.zero(), R.pi_power(1), R.teich(lam)))
        linalg.sp_axpy(ctx.F, out, 1, ctx.act(g_mul(g1, g2), v))
    return out


def suite_s_operator(sc: Scenario) -> list[Check]:
    ctx = sc.cind()
    rng = random.Random(sc.seed)
    s = s_elem(ctx.ring)
    bad = sum(ctx.act(s, ctx.s_op(v)) != s_identity_rhs(ctx, v)
              for v in (_random_vec(ctx, rng) for _ in range(sc.samples)))
    return [_check("s-operator.sS-equals-Pi-plus-R", 0, bad)]


def suite_d1(sc: Scenario) -> list[Check]:
    pi = sc.quotient()
    res = d1_compute(pi, sc.radius)
    expected = 1 if sc.rel == "special" else 2
    out = [_check("d1.dim", expected, res.dim),
           _check("d1.stable", True, res.stable, warning="" if res.stable else "dimension still growing")]
    D0 = d0_compute(pi, res.basis, sc.radius)
    out.append(_check("d0.contains-d1", True, D0.basis.contains_space(res.basis)))
    return out


def suite_invariants(sc: Scenario) -> list[Check]:
    ctx = sc.cind()
    R = ctx.ring
    basis = R.residue.prime_basis()
    out = []
    nmax = min(sc.radius, 3)
    for n in range(nmax + 1):
        gens = [upper(R, R.mulpi(R.teich(mu), j)) for j in range(n + 1) for mu in basis]
        inv = monomial_invariants(ctx, list(ctx.grade_vertices(PLUS, n)), gens)
        Sn = s_apply(InducedElement(ctx, ctx.element((PLUS, ()), ctx.fiber.v0())), n).terms
        ok = len(inv) == 1 and SparseEchelon(ctx.F, inv).contains(Sn)
        out.append(_check(f"invariants.R{n}-plus-unipotent", 1, len(inv), ok))
    for n in range(min(nmax, 2) + 1):
        B = [b.terms for b in m_n_plus_basis(ctx, n)]
        gens = [upper(R, R.mulpi(R.teich(mu), j)) for j in range(n + 1) for mu in basis]
        soc = fixed_subspace(ctx.F, B, [(lambda v, g=g: ctx.act(g, v)) for g in gens])
        out.append(_check(f"invariants.M{n}-plus-socle", 1, len(soc)))
    if ctx.q <= 5:
        pi = sc.quotient(ctx)
        n = min(sc.radius, 3)
        d1 = d1_compute(pi, n).basis
        I1 = invariants_I1(pi, n)
        out.append(_check("invariants.d1-in-I1", True, I1.contains_space(d1)))
    return out


def suite_nilpotence(sc: Scenario) -> list[Check]:
    if sc.backend != "equal":
        raise ConfigError("the nilpotence suite runs in equal characteristic")
    ctx = sc.cind()
    pi = sc.quotient(ctx)
    worst = 0
    missing = 0
    for v in ctx.ball_vertices(2):
        if v[0] != PLUS:
            continue
        for j in range(ctx.D):
            w = [0] * ctx.D
            w[j] = 1
            m = s_nilpotence_order(pi, ctx.element(v, w), 5)
            if m is None:
                missing += 1
            else:
                worst = max(worst, m)
    return [_check("nilpotence.ball2-plus-order-le-5", 0, missing), _check("nilpotence.max-order", "<=5", worst, worst <= 5)]


def suite_presentation(sc: Scenario) -> list[Check]:
    pi = sc.quotient()
    D = make_diagram(pi, sc.radius)
    R = min(3, sc.radius) if pi.ctx.q <= 9 else 2
    A, B = presentation_spans(D, R)
    _, rels, X = r0_generators(pi, D.D0)
    return [_check("presentation.r0-span-equals-boundary-image", True, A.equals(B)),
            _check("presentation.r0-count", X.dim, len(rels))]


SUITE_FUNCS: dict[str, Callable[[Scenario], list[Check]]] = {
    "decompositions": suite_decompositions,
    "hecke": suite_hecke,
    "s-operator": suite_s_operator,
    "d1-dims": suite_d1,
    "invariants": suite_invariants,
    "char-p-nilpotence": suite_nilpotence,
    "presentation": suite_presentation,
}


def threads() -> int:
    raw = os.environ.get("MODP_GL2_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"MODP_GL2_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("MODP_GL2_THREADS must be positive")
    return n


def run_suite(name: str, sc: Scenario) -> list[dict]:
    sc.validate()
    names = list(SUITES) if name == "all" else [name]
    for n in names:
        if n not in SUITE_FUNCS:
            raise ConfigError(f"unknown suite {n!r}")
    if name == "all" and sc.backend != "equal":
        names.remove("char-p-nilpotence")
    with ThreadPoolExecutor(max_workers=threads()) as ex:
        results = list(ex.map(lambda n: SUITE_FUNCS[n](sc), names))
    rows = [c.row() for checks in results for c in checks]
    return sorted(rows, key=lambda r: r["statement_id"])


# ---------------------------------------------------------------- output


def emit(report, fmt: str = "json") -> str:
    rows = list(report)
    if fmt == "json":
        if not rows:
            return "[]"
        return json.dumps([{"schema": SCHEMA_VERSION, **r} for r in rows], indent=2, sort_keys=True, default=str)
    if fmt == "csv":
        buf = io.StringIO()
        cols = ["statement_id", "expected", "got", "pass", "warning"]
        if rows and "statement_id" not in rows[0]:
            cols = list(rows[0])
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow(r)
        return buf.getvalue()
    if fmt == "table":
        if not rows:
            return ""
        cols = list(rows[0])
        cells = [[str(r.get(c, "")) for c in cols] for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
        lines += ["  ".join(x.ljust(w) for x, w in zip(row, widths)) for row in cells]
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------- element subcommands


def parse_element(ctx: CInd, text: str | None) -> InducedElement:
    if not text:
        return InducedElement(ctx, ctx.element((PLUS, ()), ctx.fiber.v0()))
    out: dict = {}
    try:
        for t in json.loads(text):
            side = MINUS if str(t.get("side", "Plus")).lower() in ("minus", "1") else PLUS
            w = [ctx.F.from_int(int(x)) for x in t["vector"]]
            if len(w) != ctx.D:
                raise ConfigError("vector length differs from dim sigma")
            ctx.from_block((side, tuple(int(x) for x in t.get("b", []))), w, out)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad element: {exc}") from None
    return InducedElement(ctx, out)


def _basis_json(ctx: CInd, E: SparseEchelon) -> list:
    return [InducedElement(ctx, v).to_json() for v in E.full_reduce().basis()]


def cmd_cind(args, sc: Scenario) -> dict:
    ctx = sc.cind()
    f = parse_element(ctx, args.element)
    if args.op == "act":
        if not args.g:
            raise ConfigError("act needs --g")
        g = parse(ctx.ring, args.g)
        res = ctx.act(g, f.terms)
    elif args.op == "T":
        res = ctx.hecke(f.terms)
    else:
        res = ctx.s_op(f.terms)
    return {"element": InducedElement(ctx, res).to_json()}


def cmd_quotient(args, sc: Scenario) -> dict:
    pi = sc.quotient()
    pi.N = sc.radius
    return pi.report()


def cmd_diagram(args, sc: Scenario) -> dict:
    pi = sc.quotient()
    ctx = pi.ctx
    n = sc.radius
    if args.op == "d1":
        res = d1_compute(pi, n)
        growth = [(r, d1_compute(pi, r).dim) for r in range(max(pi.deg, 1), n + 1)]
        return {"dim": res.dim, "basis": _basis_json(ctx, res.basis), "stability_flag": res.stable,
                "growth": growth}
    d1 = d1_compute(pi, n)
    if args.op == "d0":
        res = d0_compute(pi, d1.basis, n)
        return {"dim": res.dim, "basis": _basis_json(ctx, res.basis), "stability_flag": res.stable,
                "growth": res.growth}
    if args.op == "level":
        f = parse_element(ctx, args.element)
        lv = level(pi, d1.basis, f.terms, bound=max(n - 2, 0))
        return {"level": None if lv == float("inf") else lv, "infinite_flag": lv == float("inf")}
    D = make_diagram(pi, n)
    _, rels, X = r0_generators(pi, D.D0)
    return {"dim": len(rels), "basis": [InducedElement(D.ind, r).to_json() for r in rels],
            "stability_flag": d1.stable, "growth": d1.growth}


# ---------------------------------------------------------------- entry point


def _scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=["equal", "mixed"], default="equal")
    p.add_argument("--sigma", help="weight descriptor, e.g. p=3,f=1,r=2,a=0,z=1")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--f", type=int, default=1)
    p.add_argument("--r", default="1")
    p.add_argument("--a", type=int, default=0)
    p.add_argument("--z", type=int, default=1)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--poly", default="T-1")
    p.add_argument("--rel", choices=["none", "special"], default="none")
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--slack", type=int, default=1)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "csv", "table"], default="json")
    p.add_argument("--out", default=None)


def scenario_from_args(args) -> Scenario:
    sc = Scenario(args.backend, args.p, args.f, args.r, args.a, args.z, args.m, args.poly, args.rel,
                  args.radius, args.slack, args.samples, args.seed)
    if args.sigma:
        fields = dict(part.split("=", 1) for part in args.sigma.replace(" ", "").split(",") if "=" in part)
        sc.p = int(fields.get("p", sc.p))
        sc.f = int(fields.get("f", sc.f))
        sc.r = fields.get("r", sc.r)
        sc.a = int(fields.get("a", sc.a))
        sc.z = int(fields.get("z", sc.z))
        if "m" in fields:
            sc.m = int(fields["m"])
    return sc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modp-gl2", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in SUITES + ("all",):
        _scenario_args(sub.add_parser(name, help=f"run the {name} suite"))
    pc = sub.add_parser("cind", help="act on an induced element")
    pc.add_argument("op", choices=["act", "T", "S"])
    pc.add_argument("--element", default=None, help='JSON list of {"side","b","vector"}')
    pc.add_argument("--g", default=None, help="matrix text [[a,b],[c,d]] * w^-e")
    _scenario_args(pc)
    pq = sub.add_parser("quotient", help="build a quotient and report kernel dimensions")
    pq.add_argument("op", choices=["make"])
    _scenario_args(pq)
    pd = sub.add_parser("diagram", help="canonical diagram data")
    pd.add_argument("op", choices=["d1", "d0", "level", "r0"])
    pd.add_argument("--element", default=None)
    _scenario_args(pd)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = scenario_from_args(args)
        sc.validate()
        parse_poly(sc.weight().F, sc.poly)
        if args.command == "cind":
            text, code = json.dumps(cmd_cind(args, sc), indent=2, sort_keys=True), 0
        elif args.command == "quotient":
            text, code = json.dumps(cmd_quotient(args, sc), indent=2, sort_keys=True), 0
        elif args.command == "diagram":
            text, code = json.dumps(cmd_diagram(args, sc), indent=2, sort_keys=True, default=str), 0
        else:
            rows = run_suite(args.command, sc)
            text = emit(rows, args.format)
            code = 0 if all(r["pass"] for r in rows) else 1
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ModpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
