"""Quotients pi = cInd / (P(T) + G-span of extra relations).

Classes in pi are represented by a canonical normal form: top-down reduction
modulo P(T)(cInd) (see ``cind.LeadingReducer``) followed by reduction modulo
the G-closure W of the normalized extra relations.  The explicit ball kernel
required by the construction contract is also available, together with an
independent breadth-first span closure used as an oracle.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import linalg
from .cind import CInd, InducedElement, LeadingReducer, radius_of
from .errors import ConfigError, DomainError, InstabilityError, RadiusError
from .gl2 import (MINUS, PLUS, GroupElement, coset_rep, g_mul, identity, iwahori_generators,
                  k1_generators, pi_elem, s_elem, vertex_matrix)
from .linalg import SparseEchelon, sp_axpy, sp_scale
from .localring import CoeffField

CLOSURE_CAP = 5000


def parse_poly(F: CoeffField, text: str) -> list[int]:
    """Coefficients (constant first) of a polynomial in T such as ``T^2-2*T+1``."""
    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise ConfigError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    terms = re.findall(r"([+-])([^+-]+)", s)
    if "".join(a + b for a, b in terms) != s:
        raise ConfigError(f"cannot parse polynomial {text!r}")
    coeffs: dict[int, int] = {}
    for sign, body in terms:
        m = re.fullmatch(r"(?:(\d+)\*?)?(T(?:\^(\d+))?)?", body)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise ConfigError(f"bad term {body!r}")
        c = int(m.group(1)) if m.group(1) else 1
        e = 0 if m.group(2) is None else int(m.group(3) or 1)
        c = F.from_int(c)
        if sign == "-":
            c = F.neg(c)
        coeffs[e] = F.add(coeffs.get(e, 0), c)
    deg = max(coeffs)
    return [coeffs.get(i, 0) for i in range(deg + 1)]


def poly_text(coeffs: Sequence[int]) -> str:
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        mono = "" if i == 0 else ("T" if i == 1 else f"T^{i}")
        parts.append(f"{c}*{mono}" if mono and c != 1 else (mono or str(c)))
    return "+".join(parts) or "0"


def special_relation(ctx: CInd) -> dict:
    """[Id, v0] + [Pi, v0]."""
    v0 = ctx.fiber.v0()
    out = ctx.element((PLUS, ()), v0)
    ctx.from_block((MINUS, ()), v0, out)
    return out


def group_generators(ctx: CInd, level: int) -> list[GroupElement]:
    """s, Pi and generators of I acting faithfully up to radius ``level``."""
    R = ctx.ring
    return [s_elem(R), pi_elem(R)] + iwahori_generators(R, level)


@dataclass
class QuotientSpace:
    ctx: CInd
    P: list
    extra_rels: list = field(default_factory=list)
    N: int = 5
    slack: int = 1

    def __post_init__(self):
        F = self.ctx.F
        P = list(self.P)
        while P and not P[-1]:
            P.pop()
        self.P = P
        deg = len(P) - 1
        if deg < 1 and not self.extra_rels:
            raise ConfigError("P must be nonconstant or extra relations nonempty")
        if deg == 0:
            raise ConfigError("nonzero constant P kills cInd")
        if self.N + max(deg, 0) + self.slack + 2 > self.ctx.ring.N:
            raise ConfigError("ball radius plus slack exceeds the working precision")
        self.nf = LeadingReducer(self.ctx, P) if deg >= 1 else None
        self._W: SparseEchelon | None = None

    @property
    def deg(self) -> int:
        return max(len(self.P) - 1, 0)

    @property
    def F(self):
        return self.ctx.F

    # ------------------------------------------------------------ reduction
    def normal_form(self, vec: dict) -> dict:
        return self.nf.reduce(vec) if self.nf is not None else dict(vec)

    @property
    def W(self) -> SparseEchelon:
        if self._W is None:
            self._W = self._relation_closure()
        return self._W

    def _relation_closure(self) -> SparseEchelon:
        ctx = self.ctx
        E = SparseEchelon(self.F)
        queue = []
        for rel in self.extra_rels:
            v = self.normal_form(rel)
            r = E.reduce(v)
            if r:
                E.add_reduced(r)
                queue.append(r)
        while queue:
            v = queue.pop()
            level = max(ctx.radius(v), 0) + 1
            for g in group_generators(ctx, level):
                w = E.reduce(self.normal_form(ctx.act(g, v)))
                if w:
                    E.add_reduced(w)
                    queue.append(w)
                    if E.dim > CLOSURE_CAP:
                        raise InstabilityError("relation closure did not stabilize")
        return E

    def reduce(self, vec: dict) -> dict:
        v = self.normal_form(vec)
        if self.extra_rels:
            v = self.W.reduce(v)
        return v

    def act(self, g: GroupElement, vec: dict) -> dict:
        return self.reduce(self.ctx.act(g, vec))

    def pi_act(self, vec: dict) -> dict:
        return self.reduce(self.ctx.pi(vec))

    def s_op(self, vec: dict) -> dict:
        return self.reduce(self.ctx.s_op(vec))

    def is_zero(self, vec: dict) -> bool:
        return not self.reduce(vec)

    # ------------------------------------------------------------ explicit ball kernel
    def kernel_basis(self, N: int | None = None, slack: int | None = None, check: bool = True) -> SparseEchelon:
        N = self.N if N is None else N
        slack = self.slack if slack is None else slack
        E = self._kernel_at(N + slack).restrict(self.ctx.radius_bound(N))
        if check:
            E2 = self._kernel_at(N + slack + 1).restrict(self.ctx.radius_bound(N))
            if E2.dim != E.dim:
                raise InstabilityError(f"kernel dimension {E.dim} vs {E2.dim} at slack {slack}, {slack + 1}")
        return E

    def _kernel_at(self, R: int) -> SparseEchelon:
        cache = self.__dict__.setdefault("_kcache", {})
        if R in cache:
            return cache[R]
        ctx = self.ctx
        E = SparseEchelon(self.F)
        k = self.deg
        if self.nf is not None:
            for v in ctx.ball_vertices(R - k):
                for j in range(ctx.D):
                    w = [0] * ctx.D
                    w[j] = 1
                    E.add(ctx.poly_T(self.P, ctx.element(v, w)))
        if self.extra_rels:
            Rg = ctx.ring
            reps = [identity(Rg)] + [coset_rep(Rg, lam) for lam in range(ctx.q)]
            for h in ctx.ball_vertices(R - 1):
                hm = vertex_matrix(Rg, h)
                for kk in reps:
                    g = g_mul(hm, kk)
                    for rel in self.extra_rels:
                        t = ctx.act(g, rel)
                        if ctx.radius(t) <= R:
                            E.add(t)
        cache[R] = E
        return E

    def kernel_dims_by_grade(self, N: int | None = None) -> dict:
        E = self.kernel_basis(N, check=False)
        out: dict = {}
        for piv in E.rows:
            r = self.ctx.key_radius(piv)
            out[r] = out.get(r, 0) + 1
        return dict(sorted(out.items()))

    def report(self) -> dict:
        ctx = self.ctx
        dims = self.kernel_dims_by_grade()
        ball = {r: len(ctx.sphere_vertices(r)) * ctx.D for r in range(self.N + 1)}
        return {"kernel_dim_by_grade": dims, "ball_dims": ball}


def quotient_make(ctx: CInd, P: Sequence[int] | str, extra_rels: Iterable = (), N: int = 5, slack: int = 1) -> QuotientSpace:
    if isinstance(P, str):
        P = parse_poly(ctx.F, P)
    rels = []
    for r in extra_rels:
        if r == "special":
            rels.append(special_relation(ctx))
        elif isinstance(r, InducedElement):
            rels.append(dict(r.terms))
        else:
            rels.append(dict(r))
    return QuotientSpace(ctx, list(P), rels, N, slack)


def reduce(pi: QuotientSpace, f) -> dict:
    vec = f.terms if isinstance(f, InducedElement) else f
    if pi.ctx.radius(vec) > pi.N:
        raise RadiusError("vector outside the ball of the quotient")
    return pi.reduce(vec)


# ---------------------------------------------------------------- oracle


def kernel_oracle(pi: QuotientSpace, N: int, slack: int) -> SparseEchelon:
    """Breadth-first span closure of the seeds P(T)[Id, e_j] and the extra relations
    under s, Pi and Iwahori generators, inside ball_{N+slack}, cut back to ball_N."""
    ctx = pi.ctx
    R = N + slack
    E = SparseEchelon(pi.F)
    seeds = []
    if pi.nf is not None:
        for j in range(ctx.D):
            w = [0] * ctx.D
            w[j] = 1
            seeds.append(ctx.poly_T(pi.P, ctx.element((PLUS, ()), w)))
    seeds += [dict(r) for r in pi.extra_rels]
    gens = group_generators(ctx, R)
    queue = []
    for s in seeds:
        if ctx.radius(s) <= R and E.add(s):
            queue.append(s)
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for g in gens:
            w = ctx.act(g, v)
            if ctx.radius(w) <= R and E.add(w):
                queue.append(w)
    return E.restrict(ctx.radius_bound(N))


# ---------------------------------------------------------------- subspaces of pi


def image_basis(pi: QuotientSpace, keys: Iterable[int]) -> SparseEchelon:
    E = SparseEchelon(pi.F)
    for k in keys:
        E.add(pi.reduce({k: 1}))
    return E


def closure(F, basis: Iterable[dict], ops: Sequence[Callable[[dict], dict]], cap: int = CLOSURE_CAP,
            start: SparseEchelon | None = None) -> SparseEchelon:
    """Smallest subspace containing ``basis`` and stable under the linear maps ``ops``."""
    E = start.copy() if start is not None else SparseEchelon(F)
    queue = []
    for v in basis:
        r = E.reduce(v)
        if r:
            E.add_reduced(r)
            queue.append(r)
    while queue:
        v = queue.pop()
        for op in ops:
            r = E.reduce(op(v))
            if r:
                E.add_reduced(r)
                queue.append(r)
                if E.dim > cap:
                    raise InstabilityError("closure exceeded its dimension cap")
    return E


def fixed_subspace(F, basis: list[dict], ops: Sequence[Callable[[dict], dict]]) -> list[dict]:
    """Vectors in span(basis) fixed by each op (ops map the span into the ambient)."""
    cur = [dict(b) for b in basis]
    o = linalg.ops(F)
    for op in ops:
        if not cur:
            break
        diffs = [linalg.sp_sub(F, op(b), b) for b in cur]
        keys = sorted({k for d in diffs for k in d})
        if not keys:
            continue
        idx = {k: i for i, k in enumerate(keys)}
        M = np.zeros((len(keys), len(cur)), dtype=np.int64)
        for j, d in enumerate(diffs):
            for k, c in d.items():
                M[idx[k], j] = c
        ns = linalg.nullspace(F, M)
        new = []
        for row in ns:
            v: dict = {}
            for j, c in enumerate(row):
                if c:
                    sp_axpy(F, v, int(c), cur[j])
            new.append(v)
        cur = new
    return cur


def invariants(pi: QuotientSpace, gens: Sequence[GroupElement], n: int) -> SparseEchelon:
    """Invariants of the group generated by ``gens`` inside the image of ball_n in pi."""
    if n > pi.N:
        raise RadiusError("radius beyond the quotient ball")
    ctx = pi.ctx
    V = image_basis(pi, ctx.ball_keys(n)).full_reduce()
    ops = [(lambda v, g=g: pi.act(g, v)) for g in gens]
    for v in V.rows.values():
        for op in ops[:1]:
            if ctx.radius(op(v)) > n:
                raise DomainError("subgroup does not stabilize the ball")
    fixed = fixed_subspace(pi.F, V.basis(), ops)
    return SparseEchelon(pi.F, fixed)


def invariants_I1(pi: QuotientSpace, n: int) -> SparseEchelon:
    return invariants(pi, iwahori_generators(pi.ctx.ring, n, pro_p=True), n)


def invariants_K1(pi: QuotientSpace, n: int) -> SparseEchelon:
    return invariants(pi, k1_generators(pi.ctx.ring, n), n)


def radical_p_group(F, ops: Sequence[Callable[[dict], dict]], x: dict):
    """(M_x, rad) with M_x the span of the orbit of x and rad = sum_h (h - 1) M_x."""
    M = closure(F, [x], ops)
    rad = SparseEchelon(F)
    for m in M.rows.values():
        for op in ops:
            rad.add(linalg.sp_sub(F, op(m), m))
    return M, rad


def i_pm_images(pi: QuotientSpace, n: int):
    ctx = pi.ctx
    keys = ctx.ball_keys(n)
    D = ctx.D
    plus = [k for k in keys if ctx.vertex_of(k // D)[0] == PLUS]
    minus = [k for k in keys if ctx.vertex_of(k // D)[0] == MINUS]
    return image_basis(pi, plus), image_basis(pi, minus)


def s_nilpotence_order(pi: QuotientSpace, f: dict, max_m: int) -> int | None:
    v = pi.reduce(f)
    if not v:
        return 0
    for m in range(1, max_m + 1):
        v = pi.s_op(v)
        if not v:
            return m
    return None
