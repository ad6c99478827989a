"""Canonical diagram (D0, D1, incl) of a quotient pi, level function and boundary map.

All subspaces of pi are ``SparseEchelon`` objects whose vectors are canonical
representatives (outputs of ``QuotientSpace.reduce``).  Canonical
representatives form a linear subspace of cInd, so echelon arithmetic on them
is arithmetic in pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .cind import CInd
from .errors import ConstructionError, DomainError, RadiusError
from .gl2 import (MINUS, PLUS, GroupElement, coset_rep, diag, g_inv, g_mul, identity, iwahori_generators,
                  k1_generators, make, pi_elem, s_elem, scalar_elem, vertex_matrix)
from .linalg import SparseEchelon
from .quotient import QuotientSpace, closure
from .weights import Fiber

INF = math.inf


def minus_part(ctx: CInd, vec: dict) -> dict:
    return ctx.split_pm(vec)[1]


def plus_part(ctx: CInd, vec: dict) -> dict:
    return ctx.split_pm(vec)[0]


def phi(pi: QuotientSpace, f: dict) -> dict:
    """Class of the minus part of f; on the kernel this lands in I+ cap I-."""
    return pi.reduce(minus_part(pi.ctx, f))


def i_closure(pi: QuotientSpace, vecs, level: int, start: SparseEchelon | None = None) -> SparseEchelon:
    gens = iwahori_generators(pi.ctx.ring, level)
    return closure(pi.F, vecs, [(lambda v, g=g: pi.act(g, v)) for g in gens], start=start)


def k_closure(pi: QuotientSpace, vecs, level: int) -> SparseEchelon:
    R = pi.ctx.ring
    gens = [s_elem(R)] + iwahori_generators(R, level)
    return closure(pi.F, vecs, [(lambda v, g=g: pi.act(g, v)) for g in gens])


# ---------------------------------------------------------------- D1


@dataclass
class SubspaceResult:
    basis: SparseEchelon
    stable: bool
    growth: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.basis.dim


def _orbit_reps(n: int):
    for m in range(n + 1):
        yield (PLUS, (0,) * m)
        if m:
            yield (MINUS, (0,) * (m - 1))


def _edge_elements(ctx: CInd, R: int):
    Rg = ctx.ring
    reps = [identity(Rg)] + [coset_rep(Rg, lam) for lam in range(ctx.q)]
    for h in ctx.ball_vertices(R):
        hm = vertex_matrix(Rg, h)
        for k in reps:
            yield g_mul(hm, k)


def _d1_orbit(pi: QuotientSpace, n: int) -> SparseEchelon:
    ctx = pi.ctx
    seeds = []
    k = pi.deg
    if pi.nf is not None:
        for y in _orbit_reps(n - k):
            for j in range(ctx.D):
                w = [0] * ctx.D
                w[j] = 1
                seeds.append(phi(pi, ctx.poly_T(pi.P, ctx.element(y, w))))
    if pi.extra_rels:
        for g in _edge_elements(ctx, n - 1):
            for rel in pi.extra_rels:
                t = ctx.act(g, rel)
                if ctx.radius(t) <= n:
                    seeds.append(phi(pi, t))
    return i_closure(pi, seeds, n + 1)


def _d1_literal(pi: QuotientSpace, n: int) -> SparseEchelon:
    K = pi.kernel_basis(n, check=False)
    E = SparseEchelon(pi.F)
    for row in K.rows.values():
        E.add(phi(pi, row))
    return E


def d1_compute(pi: QuotientSpace, n: int, route: str = "orbit") -> SubspaceResult:
    """D1 at ball radius n: the span of phi over the kernel inside ball_n."""
    if n < 1:
        raise RadiusError("d1 needs radius >= 1")
    fn = {"orbit": _d1_orbit, "literal": _d1_literal}.get(route)
    if fn is None:
        raise ValueError(f"unknown route {route!r}")
    cur = fn(pi, n).full_reduce()
    prev = fn(pi, n - 1) if n - 1 >= max(pi.deg, 1) else SparseEchelon(pi.F)
    stable = prev.dim == cur.dim
    return SubspaceResult(cur, stable, [(n - 1, prev.dim), (n, cur.dim)])


def d1_growth(pi: QuotientSpace, radii: Sequence[int], route: str = "orbit") -> list[tuple[int, int]]:
    fn = {"orbit": _d1_orbit, "literal": _d1_literal}[route]
    return [(n, fn(pi, n).dim) for n in radii]


def d0_compute(pi: QuotientSpace, D1: SparseEchelon, n: int) -> SubspaceResult:
    """<K . D1> inside the image of ball_n; ``stable`` is False if the closure left the ball."""
    E = k_closure(pi, D1.basis(), n + 1).full_reduce()
    ctx = pi.ctx
    inside = all(ctx.radius(v) <= n for v in E.rows.values())
    return SubspaceResult(E, inside, [(n, E.dim)])


# ---------------------------------------------------------------- I+ / I- membership and levels


def in_plus(pi: QuotientSpace, D1: SparseEchelon, v: dict) -> bool:
    return D1.contains(pi.reduce(minus_part(pi.ctx, v)))


def in_minus(pi: QuotientSpace, D1: SparseEchelon, v: dict) -> bool:
    return D1.contains(pi.reduce(plus_part(pi.ctx, v)))


class Filtration:
    """The increasing filtration I^{+,0} = D1 and I^{+,j} = I+ cap <K . Pi(I^{+,j-1})>."""

    def __init__(self, pi: QuotientSpace, D1: SparseEchelon, level: int):
        self.pi = pi
        self.D1 = D1
        self.level = level
        self.steps: list[SparseEchelon] = [D1]

    def step(self, j: int) -> SparseEchelon:
        pi = self.pi
        while len(self.steps) <= j:
            prev = self.steps[-1]
            Y = k_closure(pi, [pi.pi_act(v) for v in prev.basis()], self.level)
            basis = Y.basis()
            imgs = [self.D1.reduce(pi.reduce(minus_part(pi.ctx, b))) for b in basis]
            ker = _kernel_combos(pi.F, basis, imgs)
            E = SparseEchelon(pi.F, ker)
            self.steps.append(E.full_reduce())
        return self.steps[j]

    def plus_level(self, v: dict, bound: int) -> float:
        for j in range(bound + 1):
            if self.step(j).contains(v):
                return j
        return INF


def _kernel_combos(F, basis: list[dict], imgs: list[dict]) -> list[dict]:
    """Combinations sum c_i basis_i with sum c_i imgs_i = 0."""
    if not basis:
        return []
    keys = sorted({k for d in imgs for k in d})
    if not keys:
        return [dict(b) for b in basis]
    idx = {k: i for i, k in enumerate(keys)}
    M = np.zeros((len(keys), len(basis)), dtype=np.int64)
    for j, d in enumerate(imgs):
        for k, c in d.items():
            M[idx[k], j] = c
    out = []
    for row in linalg.nullspace(F, M):
        v: dict = {}
        for j, c in enumerate(row):
            if c:
                linalg.sp_axpy(F, v, int(c), basis[j])
        out.append(v)
    return out


def level(pi: QuotientSpace, D1: SparseEchelon, v: dict, bound: int = 3,
          filtration: Filtration | None = None) -> float:
    """Level of the class of v, or ``INF`` when not attained by ``bound``."""
    filt = filtration or Filtration(pi, D1, pi.N + 1)
    v = pi.reduce(v)
    if not v or D1.contains(v):
        return 0
    ctx = pi.ctx
    if in_plus(pi, D1, v):
        return filt.plus_level(v, bound)
    if in_minus(pi, D1, v):
        return filt.plus_level(pi.pi_act(v), bound)
    vp, vm = ctx.split_pm(v)
    return max(level(pi, D1, vp, bound, filt), level(pi, D1, vm, bound, filt))


# ---------------------------------------------------------------- diagram and boundary


def delta_minus1(g: GroupElement) -> int:
    """(-1)^{val det g} as +1 / -1."""
    return -1 if g.det_val() % 2 else 1


class SubrepFiber(Fiber):
    """A KZ-stable subspace W of pi, trivial on K1, viewed as a fiber for induction."""

    def __init__(self, pi: QuotientSpace, W: SparseEchelon, check_level: int | None = None):
        self.pi = pi
        self.W = W.full_reduce()
        self.pivots = self.W.pivots()
        self.vectors = [self.W.rows[k] for k in self.pivots]
        self.dim = len(self.vectors)
        self.F = pi.F
        self._cache: dict = {}
        ctx = pi.ctx
        lev = check_level if check_level is not None else max([ctx.radius(v) for v in self.vectors] + [0]) + 1
        for g in k1_generators(ctx.ring, lev):
            for b in self.vectors:
                if pi.act(g, b) != b:
                    raise DomainError("K1 does not act trivially on the subspace")

    def coords(self, u: dict) -> list[int]:
        if not self.W.contains(u):
            raise DomainError("vector not in the subspace")
        return [u.get(k, 0) for k in self.pivots]

    def vector(self, coords: Sequence[int]) -> dict:
        out: dict = {}
        for c, b in zip(coords, self.vectors):
            linalg.sp_axpy(self.F, out, int(c), b)
        return out

    def lift(self, kbar: tuple, centre: int) -> GroupElement:
        R = self.pi.ctx.ring
        k = make(R, tuple(R.teich(x) for x in kbar))
        return g_mul(scalar_elem(R, centre), k) if centre else k

    def matrix(self, kbar: tuple, centre: int = 0) -> np.ndarray:
        key = (tuple(kbar), centre)
        M = self._cache.get(key)
        if M is None:
            g = self.lift(kbar, centre)
            M = np.zeros((self.dim, self.dim), dtype=np.int64)
            for j, b in enumerate(self.vectors):
                M[:, j] = self.coords(self.pi.act(g, b))
            self._cache[key] = M
        return M


@dataclass
class Diagram:
    pi: QuotientSpace
    D0: SparseEchelon
    D1: SparseEchelon
    radius: int

    def __post_init__(self):
        if not self.D0.contains_space(self.D1):
            raise ConstructionError("D1 is not contained in D0")
        self.fiber = SubrepFiber(self.pi, self.D0)
        self.ind = CInd(self.fiber, ring=self.pi.ctx.ring)

    @property
    def delta(self):
        return delta_minus1

    def pi_stable(self) -> bool:
        return all(self.D1.contains(self.pi.pi_act(v)) for v in self.D1.basis())

    def to_pi(self, vec: dict) -> dict:
        """The G-map cInd(D0) -> pi, [g, x] -> g x."""
        ind, pi = self.ind, self.pi
        out: dict = {}
        for vk, w in ind.blocks(vec).items():
            x = self.fiber.vector(w)
            g = vertex_matrix(pi.ctx.ring, ind.vertex_of(vk))
            linalg.sp_axpy(pi.F, out, 1, pi.ctx.act(g, x))
        return pi.reduce(out)


def make_diagram(pi: QuotientSpace, n: int) -> Diagram:
    D1 = d1_compute(pi, n).basis
    D0 = d0_compute(pi, D1, n).basis
    return Diagram(pi, D0, D1, n)


def edge_relation(D: Diagram, x: dict) -> dict:
    """[Id, x] - [Pi, Pi^{-1} x] in cInd(D0), for x in D0 cap Pi(D0)."""
    pi, ind, fib = D.pi, D.ind, D.fiber
    Rg = pi.ctx.ring
    y = pi.act(g_inv(pi_elem(Rg)), x)
    out = ind.element((PLUS, ()), fib.coords(x))
    neg = [pi.F.neg(c) for c in fib.coords(y)]
    ind.from_block((MINUS, ()), neg, out)
    return out


def boundary_apply(D: Diagram, x: dict, g: GroupElement | None = None) -> dict:
    if not D.D1.contains(x):
        raise DomainError("boundary map is defined on D1")
    out = edge_relation(D, x)
    return D.ind.act(g, out) if g is not None else out


def r0_generators(pi: QuotientSpace, W: SparseEchelon) -> tuple[Diagram | None, list[dict], SparseEchelon]:
    """Edge relations [diag(w,1), x] - [Id, diag(w,1) x] over x in W cap diag(w^-1,1) W.

    Returns the ambient induction (as a Diagram with D0 = D1 = W), the relations
    and the intersection space.
    """
    ctx = pi.ctx
    Rg = ctx.ring
    lev = max([ctx.radius(v) for v in W.rows.values()] + [0]) + 1
    for g in [s_elem(Rg), scalar_elem(Rg, 1)] + iwahori_generators(Rg, lev):
        for b in W.basis():
            if not W.contains(pi.act(g, b)):
                raise DomainError("W is not KZ-stable")
    w_up = diag(Rg, Rg.pi_power(1), Rg.one())
    w_dn = g_inv(w_up)
    X = W.intersect(SparseEchelon(pi.F, [pi.act(w_dn, b) for b in W.basis()])).full_reduce()
    Xpi = W.intersect(SparseEchelon(pi.F, [pi.pi_act(b) for b in W.basis()]))
    if X.dim != Xpi.dim:
        raise ConstructionError("W cap diag(w^-1,1)W differs from W cap Pi(W)")
    if not W.dim:
        return None, [], X
    D = Diagram(pi, W, W, 0)
    ind, fib = D.ind, D.fiber
    rels = []
    for x in X.basis():
        r = ind.act(w_up, ind.element((PLUS, ()), fib.coords(x)))
        neg = [pi.F.neg(c) for c in fib.coords(pi.act(w_up, x))]
        ind.from_block((PLUS, ()), neg, r)
        # s diag(w,1) = Pi, so diag(w^-1,1) . r is the edge relation of x itself
        if ind.act(w_dn, r) != _edge_relation_in(D, x):
            raise ConstructionError("translated edge relation mismatch")
        rels.append(r)
    return D, rels, X


def _edge_relation_in(D: Diagram, y: dict) -> dict:
    pi, ind, fib = D.pi, D.ind, D.fiber
    z = pi.act(g_inv(pi_elem(pi.ctx.ring)), y)
    out = ind.element((PLUS, ()), fib.coords(y))
    ind.from_block((MINUS, ()), [pi.F.neg(c) for c in fib.coords(z)], out)
    return out


def translate_span(D: Diagram, rels: Sequence[dict], R: int) -> SparseEchelon:
    """span of G-translates of edge-supported relations, cut to ball_R (computed in ball_{R+1})."""
    ind = D.ind
    E = SparseEchelon(D.pi.F)
    for g in _edge_elements(ind, R):
        for r in rels:
            t = ind.act(g, r)
            if ind.radius(t) <= R + 1:
                E.add(t)
    return E.restrict(ind.radius_bound(R))


def presentation_spans(D: Diagram, R: int) -> tuple[SparseEchelon, SparseEchelon]:
    """(span of G-translates of R0(D0), span of the image of the boundary map), both in ball_R."""
    pi = D.pi
    Xpi = D.D0.intersect(SparseEchelon(pi.F, [pi.pi_act(b) for b in D.D0.basis()]))
    A = translate_span(D, [edge_relation(D, x) for x in Xpi.basis()], R)
    B = translate_span(D, [boundary_apply(D, x) for x in D.D1.basis()], R)
    return A, B
