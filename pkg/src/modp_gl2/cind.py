"""Compact induction cInd_{KZ}^G sigma on the tree, truncated to balls.

Elements are sparse vectors ``dict[int, int]``.  A coordinate key packs a
vertex and a fiber index::

    key = ((radius * 2 + side) * Q + digit_code) * dim + j

where ``digit_code`` reads the digits in base q with the first digit most
significant and Q = q**RMAX.  Keys therefore sort by radius first, which makes
"max key" a leading-term order compatible with the growth of T.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from . import linalg
from .errors import ConstructionError, DomainError, PrecisionError, RadiusError
from .gl2 import (MINUS, PLUS, GroupElement, _mul2, g_mul, make, vertex_decompose,
                  vertex_matrix)
from .linalg import SparseEchelon, sp_axpy, sp_scale
from .localring import LocalRing
from .weights import Fiber, Weight

RMAX = 48
CACHE_CAP = 2_000_000


class VertexRep(NamedTuple):
    side: int
    digits: tuple

    @property
    def n(self) -> int:
        return len(self.digits)

    @property
    def radius(self) -> int:
        return len(self.digits) + self.side


def radius_of(vertex) -> int:
    return len(vertex[1]) + vertex[0]


def parent(vertex):
    """Neighbour one step closer to the origin (None at the origin)."""
    side, digits = vertex
    if digits:
        return (side, digits[:-1])
    return (PLUS, ()) if side else None


def ancestor(vertex, d: int):
    side, digits = vertex
    n = len(digits)
    if d <= n:
        return (side, digits[: n - d])
    if side and d == n + 1:
        return (PLUS, ())
    return None


def _sparse_cols(M: np.ndarray) -> list[list[tuple[int, int]]]:
    D = M.shape[0]
    return [[(i, int(M[i, j])) for i in range(D) if M[i, j]] for j in range(M.shape[1])]


class CInd:
    """Context: fiber, local ring, key encoding and the G-action on sparse vectors."""

    def __init__(self, fiber: Fiber, ring: LocalRing | None = None, backend: str = "equal",
                 rmax: int = 10, N: int | None = None):
        self.fiber = fiber
        self.F = fiber.F
        if ring is None:
            p, f = _pf(fiber)
            ring = LocalRing(backend, p, f, N if N is not None else rmax + 10)
        self.ring = ring
        self.q = ring.q
        self.D = fiber.dim
        self.rmax = rmax
        self.Q = self.q**RMAX
        self._vk_cache: dict = {}
        self._vertex_cache: dict = {}
        self._act_cache: dict = {}
        self._op_kind: dict = {}
        self._cols_cache: dict = {}
        self._is_weight = isinstance(fiber, Weight)
        if self._is_weight:
            self._init_hecke()

    # ------------------------------------------------------------ encoding
    def vkey(self, vertex) -> int:
        k = self._vk_cache.get(vertex)
        if k is None:
            side, digits = vertex
            code = 0
            q = self.q
            for d in digits:
                code = code * q + d
            k = (len(digits) + side) * 2 + side
            k = k * self.Q + code
            self._vk_cache[vertex] = k
            self._vertex_cache[k] = vertex
        return k

    def vertex_of(self, vk: int):
        v = self._vertex_cache.get(vk)
        if v is None:
            rs, code = divmod(vk, self.Q)
            r, side = divmod(rs, 2)
            n = r - side
            ds = []
            for _ in range(n):
                code, d = divmod(code, self.q)
                ds.append(d)
            v = (side, tuple(reversed(ds)))
            self._vertex_cache[vk] = v
            self._vk_cache[v] = vk
        return v

    def key(self, vertex, j: int) -> int:
        return self.vkey(vertex) * self.D + j

    def split_key(self, key: int):
        vk, j = divmod(key, self.D)
        return self.vertex_of(vk), j

    def radius_bound(self, R: int) -> int:
        """Smallest key of radius R + 1: keys below it are exactly ball_R."""
        return (R + 1) * 2 * self.Q * self.D

    def key_radius(self, key: int) -> int:
        return key // (2 * self.Q * self.D)

    def blocks(self, vec: dict) -> dict:
        D = self.D
        out: dict = {}
        for key, c in vec.items():
            vk, j = divmod(key, D)
            b = out.get(vk)
            if b is None:
                b = out[vk] = [0] * D
            b[j] = c
        return out

    def from_block(self, vertex, w: Sequence[int], out: dict | None = None) -> dict:
        out = {} if out is None else out
        base = self.vkey(vertex) * self.D
        F = self.F
        for j, c in enumerate(w):
            if c:
                k = base + j
                y = F.add(out.get(k, 0), c)
                if y:
                    out[k] = y
                else:
                    out.pop(k, None)
        return out

    def element(self, vertex, w: Sequence[int]) -> dict:
        return self.from_block(vertex, w)

    def radius(self, vec: dict) -> int:
        if not vec:
            return -1
        return self.key_radius(max(vec))

    # ------------------------------------------------------------ enumeration
    def grade_vertices(self, side: int, n: int) -> Iterable[tuple]:
        for ds in itertools.product(range(self.q), repeat=n):
            yield (side, ds)

    def sphere_vertices(self, r: int) -> list[tuple]:
        out = list(self.grade_vertices(PLUS, r))
        if r >= 1:
            out += list(self.grade_vertices(MINUS, r - 1))
        return out

    def ball_vertices(self, R: int) -> list[tuple]:
        out = []
        for r in range(R + 1):
            out += self.sphere_vertices(r)
        return out

    def ball_keys(self, R: int) -> list[int]:
        return sorted(self.key(v, j) for v in self.ball_vertices(R) for j in range(self.D))

    def grade_keys(self, side: int, n: int) -> list[int]:
        return sorted(self.key(v, j) for v in self.grade_vertices(side, n) for j in range(self.D))

    # ------------------------------------------------------------ fiber
    def _cols(self, kbar: tuple, centre: int):
        key = (kbar, centre)
        c = self._cols_cache.get(key)
        if c is None:
            c = self._cols_cache[key] = _sparse_cols(self.fiber.matrix(kbar, centre))
        return c

    def matvec(self, cols, w: Sequence[int]) -> list[int]:
        F = self.F
        out = [0] * self.D
        if F.m == 1:
            p = F.p
            for j, c in enumerate(w):
                if c:
                    for i, x in cols[j]:
                        out[i] = (out[i] + c * x) % p
        else:
            mul, add = F.mul, F.add
            for j, c in enumerate(w):
                if c:
                    for i, x in cols[j]:
                        out[i] = add(out[i], mul(c, x))
        return out

    def fiber_apply(self, kbar: tuple, centre: int, w: Sequence[int]) -> list[int]:
        if centre == 0 and kbar == (1, 0, 0, 1):
            return list(w)
        return self.matvec(self._cols(kbar, centre), w)

    # ------------------------------------------------------------ group action
    def _kind(self, g: GroupElement):
        kind = self._op_kind.get(g.key)
        if kind is not None:
            return kind
        R = self.ring
        a, b, c, d = g.mat
        one, zero = R.one(), R.zero()
        if g.shift == 0 and a == one and d == one and c == zero:
            nz = tuple((i, x) for i, x in enumerate(b) if x) if R.equal else ()
            kind = ("upper", b, nz)
        elif g.shift == 0 and a == zero and b == one and d == zero and c == R.pi_power(1):
            kind = ("pi",)
        elif (g.shift == 0 and a == R.pi_power(1) and c == zero and d == one
              and R.val(R.sub(b, R.teich(R.reduce(b))), g.prec) >= g.prec):
            kind = ("glam", R.reduce(b))
        else:
            kind = ("generic",)
        if len(self._op_kind) > 10000:
            self._op_kind.clear()
        self._op_kind[g.key] = kind
        return kind

    def act_vertex(self, g: GroupElement, vertex):
        """(vertex', kbar, centre) with g * h = h' * w^centre * k, k reducing to kbar."""
        kind = self._kind(g)
        side, digits = vertex
        if kind[0] == "pi":
            return ((1 - side, digits), (1, 0, 0, 1), side)
        if kind[0] == "glam" and side == PLUS:
            return ((PLUS, (kind[1],) + digits), (1, 0, 0, 1), 0)
        if kind[0] == "upper" and side == PLUS:
            return self._upper_on_plus(kind[1], digits, kind[2])
        ck = (g.key, vertex)
        res = self._act_cache.get(ck)
        if res is None:
            h = vertex_matrix(self.ring, vertex)
            dec = vertex_decompose(g_mul(g, h))
            res = (dec.vertex, dec.kbar, dec.centre)
            if len(self._act_cache) > CACHE_CAP:
                self._act_cache.clear()
            self._act_cache[ck] = res
        return res

    def _upper_on_plus(self, x, digits, nz=()):
        R = self.ring
        n = len(digits)
        if R.equal:
            # Teichmueller digits add without carries in equal characteristic
            F = R.residue
            nd = list(digits)
            top = 0
            for i, e in nz:
                if i < n:
                    nd[i] = F.add(nd[i], e)
                elif i == n:
                    top = e
                else:
                    break
            return ((PLUS, tuple(nd)), (1, top, 0, 1), 0)
        y = R.add(R.from_digits(digits), x)
        ds = R.digits(y, n + 1)
        return ((PLUS, ds[:n]), (1, ds[n], 0, 1), 0)

    def act(self, g: GroupElement, vec: dict) -> dict:
        out: dict = {}
        for vk, w in self.blocks(vec).items():
            v2, kbar, centre = self.act_vertex(g, self.vertex_of(vk))
            self.from_block(v2, self.fiber_apply(kbar, centre, w), out)
        return out

    def pi(self, vec: dict) -> dict:
        out: dict = {}
        for vk, w in self.blocks(vec).items():
            side, digits = self.vertex_of(vk)
            if side:
                w = self.fiber_apply((1, 0, 0, 1), 1, w)
            self.from_block((1 - side, digits), w, out)
        return out

    def s_op(self, vec: dict) -> dict:
        """S = sum over lambda of g_lambda."""
        out: dict = {}
        R = self.ring
        for vk, w in self.blocks(vec).items():
            v = self.vertex_of(vk)
            if v[0] == PLUS:
                for lam in range(self.q):
                    self.from_block((PLUS, (lam,) + v[1]), w, out)
            else:
                for lam in range(self.q):
                    g = self.glam(lam)
                    v2, kbar, centre = self.act_vertex(g, v)
                    self.from_block(v2, self.fiber_apply(kbar, centre, w), out)
        return out

    def glam(self, lam: int) -> GroupElement:
        c = self.__dict__.setdefault("_glam", {})
        g = c.get(lam)
        if g is None:
            R = self.ring
            g = c[lam] = make(R, (R.pi_power(1), R.teich(lam), R.zero(), R.one()))
        return g

    # ------------------------------------------------------------ Hecke operator
    def _init_hecke(self):
        sig: Weight = self.fiber
        F = sig.F
        o = linalg.ops(F)
        U = sig.U
        s = sig.matrix((0, 1, 1, 0))
        self._U_cols = _sparse_cols(U)
        self._A_cols = []
        sUs = o.matmul(o.matmul(s, U), s)
        for lam in range(self.q):
            u = sig.matrix((1, sig.residue.neg(lam), 0, 1))
            self._A_cols.append(_sparse_cols(o.matmul(sUs, u)))

    def hecke(self, vec: dict) -> dict:
        if not self._is_weight:
            raise DomainError("T is defined on inductions of weights")
        out: dict = {}
        for vk, w in self.blocks(vec).items():
            side, digits = self.vertex_of(vk)
            for lam in range(self.q):
                self.from_block((side, digits + (lam,)), self.matvec(self._A_cols[lam], w), out)
            uw = self.matvec(self._U_cols, w)
            if not any(uw):
                continue
            if digits:
                t = digits[-1]
                self.from_block((side, digits[:-1]), self.fiber_apply((1, t, 0, 1), 1, uw), out)
            elif side == PLUS:
                self.from_block((MINUS, ()), self.fiber_apply((0, 1, 1, 0), 0, uw), out)
            else:
                self.from_block((PLUS, ()), self.fiber_apply((0, 1, 1, 0), 1, uw), out)
        return out

    def poly_T(self, coeffs: Sequence[int], vec: dict) -> dict:
        """P(T) vec for P = sum coeffs[i] T^i."""
        F = self.F
        out: dict = {}
        cur = dict(vec)
        for i, c in enumerate(coeffs):
            if i:
                cur = self.hecke(cur)
            if c:
                sp_axpy(F, out, c, cur)
        return out

    def split_pm(self, vec: dict):
        plus, minus = {}, {}
        D = self.D
        for k, c in vec.items():
            vk = k // D
            rs = vk // self.Q
            (minus if rs % 2 else plus)[k] = c
        return plus, minus

    def restrict(self, vec: dict, pred: Callable[[tuple], bool]) -> dict:
        D = self.D
        return {k: c for k, c in vec.items() if pred(self.vertex_of(k // D))}


def _pf(fiber):
    if isinstance(fiber, Weight):
        return fiber.p, fiber.f
    return fiber.p, fiber.f


# ---------------------------------------------------------------- leading-term reduction


class LeadingReducer:
    """Reduction modulo P(T)(span of [z, e_j] : z allowed), built lazily.

    For each allowed z the rows P(T)[z, e_j] are echelonized locally; their
    pivots sit on the sphere of radius |z| + deg P below z.  Rows from different
    z have disjoint pivot sets, so the union is a semi-echelon basis and the
    top-down reduction is canonical.
    """

    def __init__(self, ctx: CInd, coeffs: Sequence[int], allowed: Callable[[tuple], bool] | None = None):
        self.ctx = ctx
        coeffs = list(coeffs)
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self.coeffs = coeffs
        self.deg = len(coeffs) - 1
        self.allowed = allowed or (lambda v: True)
        self.ech = SparseEchelon(ctx.F)
        self.done: set = set()

    def _process(self, z) -> None:
        self.done.add(z)
        if not self.allowed(z):
            return
        ctx = self.ctx
        local = SparseEchelon(ctx.F)
        for j in range(ctx.D):
            row = ctx.poly_T(self.coeffs, ctx.element(z, _unit(ctx.D, j)))
            if not local.add(row):
                raise ConstructionError("P(T) is not injective on a vertex block")
        top = radius_of(z) + self.deg
        for piv, row in local.rows.items():
            if ctx.key_radius(piv) != top:
                raise ConstructionError("leading term of P(T) left the top sphere")
            self.ech.rows[piv] = row

    def reduce(self, vec: dict) -> dict:
        if self.deg < 1:
            if self.deg == 0:
                return {}
            return dict(vec)
        ctx = self.ctx
        D = ctx.D
        ech = self.ech
        rows = ech.rows
        v = dict(vec)
        heap = [-k for k in v]
        heapq.heapify(heap)
        F = ctx.F
        seen_vk = set()
        while heap:
            k = -heapq.heappop(heap)
            c = v.get(k)
            if not c:
                continue
            if k not in rows:
                vk = k // D
                if vk in seen_vk:
                    continue
                seen_vk.add(vk)
                z = ancestor(ctx.vertex_of(vk), self.deg)
                if z is None or z in self.done:
                    continue
                self._process(z)
                if k not in rows:
                    continue
            row = rows[k]
            cc = F.neg(c)
            for kk, x in row.items():
                old = v.get(kk)
                if old is None:
                    v[kk] = F.mul(cc, x)
                    heapq.heappush(heap, -kk)
                else:
                    y = F.add(old, F.mul(cc, x))
                    if y:
                        v[kk] = y
                    else:
                        del v[kk]
        return v

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)


def _unit(D: int, j: int) -> list[int]:
    w = [0] * D
    w[j] = 1
    return w


# ---------------------------------------------------------------- public element type


@dataclass(frozen=True, eq=False)
class InducedElement:
    ctx: CInd
    terms: dict

    def __eq__(self, other) -> bool:
        return isinstance(other, InducedElement) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "InducedElement") -> "InducedElement":
        return InducedElement(self.ctx, linalg.sp_add(self.ctx.F, self.terms, other.terms))

    def __sub__(self, other: "InducedElement") -> "InducedElement":
        return InducedElement(self.ctx, linalg.sp_sub(self.ctx.F, self.terms, other.terms))

    def scale(self, c: int) -> "InducedElement":
        return InducedElement(self.ctx, sp_scale(self.ctx.F, c, self.terms))

    @property
    def radius(self) -> int:
        return self.ctx.radius(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def by_vertex(self) -> dict:
        """VertexRep -> coefficient tuple, in key order."""
        out = {}
        for vk, w in sorted(self.ctx.blocks(self.terms).items()):
            side, digits = self.ctx.vertex_of(vk)
            out[VertexRep(side, digits)] = tuple(w)
        return out

    def to_json(self) -> list:
        return [{"side": "Minus" if v.side else "Plus", "n": v.n, "b": list(v.digits), "vector": list(w)}
                for v, w in self.by_vertex().items()]


def wrap(ctx: CInd, vec: dict) -> InducedElement:
    return InducedElement(ctx, vec)


def inject(ctx: CInd, g: GroupElement, v: Sequence[int]) -> InducedElement:
    """Canonical form of [g, v]."""
    dec = vertex_decompose(g)
    return InducedElement(ctx, ctx.element(dec.vertex, ctx.fiber_apply(dec.kbar, dec.centre, list(v))))


def g_act(g: GroupElement, fun: InducedElement) -> InducedElement:
    return InducedElement(fun.ctx, fun.ctx.act(g, fun.terms))


def hecke_T(fun: InducedElement) -> InducedElement:
    return InducedElement(fun.ctx, fun.ctx.hecke(fun.terms))


def s_apply(fun: InducedElement, times: int = 1) -> InducedElement:
    v = fun.terms
    for _ in range(times):
        v = fun.ctx.s_op(v)
    return InducedElement(fun.ctx, v)


def split_I_pm(fun: InducedElement):
    plus, minus = fun.ctx.split_pm(fun.terms)
    return InducedElement(fun.ctx, plus), InducedElement(fun.ctx, minus)


def grade_of(ctx: CInd, vec: dict):
    grades = {(v[0], len(v[1])) for v in (ctx.vertex_of(vk) for vk in ctx.blocks(vec))}
    return grades


def T_plus_minus(fun: InducedElement):
    """Split T on a single R_n^- (n >= 1) into its R_{n+1}^- and R_{n-1}^- parts."""
    ctx = fun.ctx
    grades = grade_of(ctx, fun.terms)
    if len(grades) != 1:
        if not grades:
            return fun, fun
        raise DomainError("T_plus_minus needs support in a single R_n^-")
    side, n = grades.pop()
    if side != MINUS or n < 1:
        raise DomainError("T_plus_minus needs support in R_n^- with n >= 1")
    t = ctx.hecke(fun.terms)
    up = ctx.restrict(t, lambda v: v[0] == MINUS and len(v[1]) == n + 1)
    down = ctx.restrict(t, lambda v: v[0] == MINUS and len(v[1]) == n - 1)
    if len(up) + len(down) != len(t):
        raise ConstructionError("T left R_{n+1}^- + R_{n-1}^-")
    return InducedElement(ctx, up), InducedElement(ctx, down)


def phi_sigma(fun: InducedElement, pi) -> dict:
    """Class in pi of the minus part of fun."""
    _, minus = fun.ctx.split_pm(fun.terms)
    return pi.reduce(minus)


def x0_extract(f_minus: InducedElement) -> InducedElement:
    """The x_0 component of Pi(f^-) = y + sum_mu ([mu],1;1,0) x_mu."""
    ctx = f_minus.ctx
    out: dict = {}
    for vk, w in ctx.blocks(f_minus.terms).items():
        side, digits = ctx.vertex_of(vk)
        if side != MINUS:
            raise DomainError("x0_extract needs an element of I^-")
        if digits and digits[0] == 0:
            ctx.from_block((MINUS, digits[1:]), ctx.fiber_apply((1, 0, 0, 1), 1, w), out)
    return InducedElement(ctx, out)


def x_mu_extract(f_minus: InducedElement, mu: int) -> InducedElement:
    ctx = f_minus.ctx
    out: dict = {}
    for vk, w in ctx.blocks(f_minus.terms).items():
        side, digits = ctx.vertex_of(vk)
        if digits and digits[0] == mu:
            ctx.from_block((MINUS, digits[1:]), ctx.fiber_apply((1, 0, 0, 1), 1, w), out)
    return InducedElement(ctx, out)


def m_n_plus_basis(ctx: CInd, n: int) -> list[InducedElement]:
    v0 = ctx.fiber.v0()
    return [InducedElement(ctx, ctx.element(v, v0)) for v in ctx.grade_vertices(PLUS, n)]


# ---------------------------------------------------------------- correction of the minus part


def poly_root(F, coeffs: Sequence[int]):
    """A root of the polynomial in the coefficient field, or None."""
    for x in range(F.q):
        acc = 0
        for c in reversed(coeffs):
            acc = F.add(F.mul(acc, x), c)
        if acc == 0:
            return x
    return None


def poly_divide_linear(F, coeffs: Sequence[int], lam: int) -> list[int]:
    """Quotient of P by (T - lam) (synthetic division)."""
    n = len(coeffs) - 1
    out = [0] * n
    acc = 0
    for i in range(n, 0, -1):
        acc = F.add(F.mul(acc, lam), coeffs[i])
        out[i - 1] = acc
    return out


class MinusInverse:
    """Right inverse of T^- : R_{n+1}^- -> R_n^- built from the children of each vertex."""

    def __init__(self, ctx: CInd):
        self.ctx = ctx
        D = ctx.D
        F = ctx.F
        # images of [child_t, e_j] under T^- at the parent, as columns
        cols, labels = [], []
        for t in range(ctx.q):
            for j in range(D):
                w = _unit(D, j)
                uw = ctx.matvec(ctx._U_cols, w)
                img = ctx.fiber_apply((1, t, 0, 1), 1, uw)
                if any(img):
                    cols.append(img)
                    labels.append((t, j))
        M = np.array(cols, dtype=np.int64).T if cols else np.zeros((D, 0), dtype=np.int64)
        self.sol = []
        for j in range(D):
            x = linalg.solve(F, M, np.array(_unit(D, j)))
            if x is None:
                raise ConstructionError("T^- is not surjective on a vertex block")
            self.sol.append([(labels[i], int(c)) for i, c in enumerate(x) if c])

    def solve(self, vec: dict) -> dict:
        """h supported one grade higher (on Minus children) with T^-(h) = vec."""
        ctx = self.ctx
        F = ctx.F
        out: dict = {}
        for vk, w in ctx.blocks(vec).items():
            side, digits = ctx.vertex_of(vk)
            if side != MINUS:
                raise DomainError("MinusInverse works on I^-")
            for j, c in enumerate(w):
                if c:
                    for (t, jj), x in self.sol[j]:
                        k = ctx.key((MINUS, digits + (t,)), jj)
                        y = F.add(out.get(k, 0), F.mul(c, x))
                        if y:
                            out[k] = y
                        else:
                            out.pop(k, None)
        return out


def _min_grade(ctx: CInd, vec: dict) -> int:
    return min(len(ctx.vertex_of(vk)[1]) for vk in ctx.blocks(vec))


def pt_correction(f: InducedElement, coeffs: Sequence[int], k: int | None = None) -> InducedElement:
    """f' in sum_{n >= k+1} R_n^- with f + f' in P(T)(sum_{n >= k+1} R_n^-)."""
    ctx = f.ctx
    F = ctx.F
    if not f.terms:
        return f
    if any(ctx.vertex_of(vk)[0] != MINUS for vk in ctx.blocks(f.terms)):
        raise DomainError("pt_correction needs an element of I^-")
    if k is None:
        k = _min_grade(ctx, f.terms)
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    if len(coeffs) < 2:
        raise DomainError("pt_correction needs deg P >= 1")
    inv = ctx.__dict__.get("_minus_inverse")
    if inv is None:
        inv = ctx.__dict__["_minus_inverse"] = MinusInverse(ctx)
    fp, _h = _pt_rec(ctx, inv, f.terms, coeffs)
    return InducedElement(ctx, fp)


def _pt_rec(ctx: CInd, inv: MinusInverse, f: dict, coeffs: list[int]):
    """Returns (f', h) with f + f' = P(T) h."""
    F = ctx.F
    lead_inv = F.inv(coeffs[-1])
    monic = [F.mul(lead_inv, c) for c in coeffs]
    lam = poly_root(F, monic)
    if lam is None:
        raise DomainError("P has no root in the coefficient field; enlarge m")
    h = inv.solve(f)
    th = ctx.hecke(h)
    # (T - lam) h = f + f1 with f1 = T^+ h - lam h
    f1 = linalg.sp_sub(F, th, f)
    sp_axpy(F, f1, F.neg(lam), h)
    if len(monic) == 2:
        fp = f1
        h_tot = h
    else:
        p1 = poly_divide_linear(F, monic, lam)
        hp, h2 = _pt_rec(ctx, inv, h, p1)
        # P(T) h2 = (T - lam)(h + hp) = f + f1 + (T - lam) hp
        fp = dict(f1)
        sp_axpy(F, fp, 1, ctx.hecke(hp))
        sp_axpy(F, fp, F.neg(lam), hp)
        h_tot = h2
    # rescale for a non-monic P: P = c * monic
    c = coeffs[-1]
    if c != 1:
        h_tot = sp_scale(F, lead_inv, h_tot)
    return fp, h_tot


def in_p_image_minus(ctx: CInd, coeffs: Sequence[int], vec: dict, k: int) -> bool:
    """Membership of vec in P(T)(sum_{n >= k} R_n^-), by leading-term reduction."""
    red = LeadingReducer(ctx, coeffs, allowed=lambda z: z[0] == MINUS and len(z[1]) >= k)
    return red.contains(vec)


# ---------------------------------------------------------------- matrices on graded pieces


def operator_matrix(ctx: CInd, op: Callable[[dict], dict], src_keys: Sequence[int], dst_keys: Sequence[int]) -> np.ndarray:
    idx = {k: i for i, k in enumerate(dst_keys)}
    M = np.zeros((len(dst_keys), len(src_keys)), dtype=np.int64)
    for col, key in enumerate(src_keys):
        for k, c in op({key: 1}).items():
            if k not in idx:
                raise RadiusError("operator image leaves the target coordinates")
            M[idx[k], col] = c
    return M


# ---------------------------------------------------------------- orbit-stabilizer invariants


def monomial_invariants(ctx: CInd, vertices: Sequence[tuple], gens: Sequence[GroupElement],
                        kbar_filter: Callable | None = None) -> list[dict]:
    """Invariants of the group generated by ``gens`` on the span of [x, w], x in ``vertices``.

    Each orbit is traversed once, transports are tracked as elements
    (kbar, centre) of GL2(F_q) x Z, and the invariants of an orbit are the
    fixed vectors of its Schreier generators transported along the orbit.
    Raises RadiusError if a generator maps a vertex outside ``vertices``.
    """
    Fr = ctx.ring.residue
    vset = set(vertices)
    seen: dict = {}
    out: list[dict] = []
    o = linalg.ops(ctx.F)
    D = ctx.D
    for rep in vertices:
        if rep in seen:
            continue
        transport = {rep: ((1, 0, 0, 1), 0)}
        seen[rep] = rep
        order = [rep]
        stab: set = set()
        i = 0
        while i < len(order):
            x = order[i]
            i += 1
            kx, cx = transport[x]
            for g in gens:
                y, kb, c = ctx.act_vertex(g, x)
                if y not in vset:
                    raise RadiusError("generator leaves the vertex set")
                if kb[0] == 1 and kb[2] == 0 and kb[3] == 1 and kx[0] == 1 and kx[2] == 0 and kx[3] == 1:
                    ky = (1, Fr.add(kb[1], kx[1]), 0, 1)
                else:
                    ky = _mul2(Fr, kb, kx)
                cy = c + cx
                t = transport.get(y)
                if t is None:
                    transport[y] = (ky, cy)
                    seen[y] = rep
                    order.append(y)
                elif t != (ky, cy):
                    kt, ct = t
                    if kt[0] == 1 and kt[2] == 0 and kt[3] == 1 and ky[0] == 1 and ky[2] == 0 and ky[3] == 1:
                        stab.add(((1, Fr.sub(ky[1], kt[1]), 0, 1), cy - ct))
                    else:
                        stab.add((_mul2(Fr, _inv2(Fr, kt), ky), cy - ct))
        # fixed vectors of the stabilizer on the fiber
        if stab:
            eye = np.eye(D, dtype=np.int64)
            blocks = [o.sub(ctx.fiber.matrix(kb, c), eye) for kb, c in sorted(stab)]
            fixed = linalg.nullspace(ctx.F, np.concatenate(blocks, axis=0))
        else:
            fixed = np.eye(D, dtype=np.int64)
        for w in fixed:
            w = [int(x) for x in w]
            vec: dict = {}
            for x in order:
                kx, cx = transport[x]
                ctx.from_block(x, ctx.fiber_apply(kx, cx, w), vec)
            out.append(vec)
    return out


def _inv2(F, k):
    a, b, c, d = k
    det = F.sub(F.mul(a, d), F.mul(b, c))
    di = F.inv(det)
    return (F.mul(d, di), F.neg(F.mul(b, di)), F.neg(F.mul(c, di)), F.mul(a, di))
