"""GL2(F) at finite precision: group law, subgroup membership and decompositions.

A ``GroupElement`` stores an integral matrix ``mat`` (raw ring values) together
with ``shift`` so that the element is ``w^-shift * mat``.  The matrix is kept
normalized: its minimal entry valuation is 0 and entries are truncated to the
number of reliable digits ``prec``.

Vertices of the tree G/KZ are written ``(side, digits)`` with side 0 for
``(w^n, b; 0, 1)`` and side 1 for ``Pi * (w^n, b; 0, 1)``; ``digits`` are the
Teichmuller digits of b, low digit first, and n = len(digits).
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ConfigError, DomainError, PrecisionError
from .localring import LocalRing

PLUS, MINUS = 0, 1
SUBGROUP_TAGS = ("K", "Z", "KZ", "I", "I1", "Kn", "In", "IZ", "Pplus", "H", "U_plus_O", "U_minus_p")


@dataclass(frozen=True)
class GroupElement:
    ring: LocalRing
    mat: tuple
    shift: int
    prec: int

    @property
    def key(self):
        return (self.mat, self.shift, self.prec)

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupElement) and equal_mod_precision(self, other)

    def __hash__(self) -> int:
        return hash((self.mat, self.shift))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return g_mul(self, other)

    def det_val(self) -> int:
        R = self.ring
        a, b, c, d = self.mat
        return R.val(R.sub(R.mul(a, d), R.mul(b, c)), self.prec) - 2 * self.shift

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"GroupElement({to_text(self)}, prec={self.prec})"


def make(ring: LocalRing, mat, shift: int = 0, prec: int | None = None) -> GroupElement:
    """Normalize and wrap a raw integral matrix representing w^-shift * mat."""
    prec = ring.N if prec is None else min(prec, ring.N)
    mat = tuple(ring.truncate(x, prec) for x in mat)
    v = min(ring.val(x, prec) for x in mat)
    if v >= prec:
        raise PrecisionError("matrix vanishes at working precision")
    if v:
        mat = tuple(ring.divpi(x, v) for x in mat)
        shift -= v
        prec -= v
    return GroupElement(ring, mat, shift, prec)


def from_ints(ring: LocalRing, a, b, c, d, shift: int = 0) -> GroupElement:
    conv = lambda x: ring.from_int(x) if isinstance(x, int) else x
    return make(ring, (conv(a), conv(b), conv(c), conv(d)), shift)


def identity(ring: LocalRing) -> GroupElement:
    o, z = ring.one(), ring.zero()
    return GroupElement(ring, (o, z, z, o), 0, ring.N)


def pi_elem(ring: LocalRing) -> GroupElement:
    o, z = ring.one(), ring.zero()
    return make(ring, (z, o, ring.pi_power(1), z))


def s_elem(ring: LocalRing) -> GroupElement:
    o, z = ring.one(), ring.zero()
    return make(ring, (z, o, o, z))


def g_lambda(ring: LocalRing, lam: int) -> GroupElement:
    o, z = ring.one(), ring.zero()
    return make(ring, (ring.pi_power(1), ring.teich(lam), z, o))


def diag(ring: LocalRing, a, d) -> GroupElement:
    z = ring.zero()
    return make(ring, (a, z, z, d))


def upper(ring: LocalRing, x) -> GroupElement:
    o, z = ring.one(), ring.zero()
    return make(ring, (o, x, z, o))


def lower(ring: LocalRing, x) -> GroupElement:
    o, z = ring.one(), ring.zero()
    return make(ring, (o, z, x, o))


def scalar_elem(ring: LocalRing, k: int) -> GroupElement:
    """The central element w^k."""
    return make(ring, (ring.one(), ring.zero(), ring.zero(), ring.one()), -k)


def vertex_matrix(ring: LocalRing, vertex) -> GroupElement:
    side, digits = vertex
    n = len(digits)
    if n >= ring.N:
        raise PrecisionError(f"vertex of radius {n} needs precision > {n}")
    h = make(ring, (ring.pi_power(n), ring.from_digits(digits), ring.zero(), ring.one()))
    return g_mul(pi_elem(ring), h) if side else h


def g_mul(x: GroupElement, y: GroupElement) -> GroupElement:
    R = x.ring
    if R != y.ring:
        raise ConfigError("group elements over different rings")
    a, b, c, d = x.mat
    e, f, g, h = y.mat
    mul, add = R.mul, R.add
    mat = (add(mul(a, e), mul(b, g)), add(mul(a, f), mul(b, h)),
           add(mul(c, e), mul(d, g)), add(mul(c, f), mul(d, h)))
    return make(R, mat, x.shift + y.shift, min(x.prec, y.prec))


def g_inv(x: GroupElement) -> GroupElement:
    R = x.ring
    a, b, c, d = x.mat
    det = R.sub(R.mul(a, d), R.mul(b, c))
    dv = R.val(det, x.prec)
    if dv >= x.prec:
        raise PrecisionError("determinant not certifiably invertible")
    u = R.inv(R.truncate(R.divpi(det, dv), x.prec - dv))
    adj = (d, R.neg(b), R.neg(c), a)
    return make(R, tuple(R.mul(u, t) for t in adj), dv - x.shift, x.prec - dv)


def g_pow(x: GroupElement, k: int) -> GroupElement:
    out = identity(x.ring)
    base = x if k >= 0 else g_inv(x)
    for _ in range(abs(k)):
        out = g_mul(out, base)
    return out


def equal_mod_precision(x: GroupElement, y: GroupElement) -> bool:
    if x.shift != y.shift:
        return False
    R = x.ring
    p = min(x.prec, y.prec)
    return all(R.truncate(s, p) == R.truncate(t, p) for s, t in zip(x.mat, y.mat))


def reduction(x: GroupElement) -> tuple[int, int, int, int]:
    """Entries of the normalized matrix mod w (meaningful on KZ)."""
    return tuple(x.ring.reduce(t) for t in x.mat)


# ---------------------------------------------------------------- membership


@dataclass(frozen=True)
class SubgroupSpec:
    tag: str
    level: int = 0

    def __post_init__(self):
        if self.tag not in SUBGROUP_TAGS:
            raise ConfigError(f"unknown subgroup tag {self.tag!r}")


def member(g: GroupElement, spec: SubgroupSpec | str) -> bool:
    if isinstance(spec, str):
        spec = SubgroupSpec(spec)
    R = g.ring
    if spec.level >= g.prec:
        raise PrecisionError("congruence level not below precision")
    a, b, c, d = g.mat
    val = lambda x: R.val(x, g.prec)
    one = R.one()
    in_kz = g.det_val() + 2 * g.shift == 0
    in_k = in_kz and g.shift == 0
    tag, n = spec.tag, spec.level
    if tag == "KZ":
        return in_kz
    if tag == "K":
        return in_k
    if tag == "Z":
        return val(b) >= g.prec and val(c) >= g.prec and val(R.sub(a, d)) >= g.prec
    if tag == "IZ":
        return in_kz and val(c) >= 1
    if tag == "I":
        return in_k and val(c) >= 1
    if tag == "I1":
        return in_k and val(c) >= 1 and val(R.sub(a, one)) >= 1 and val(R.sub(d, one)) >= 1
    if tag == "Kn":
        return in_k and min(val(R.sub(a, one)), val(b), val(c), val(R.sub(d, one))) >= n
    if tag == "In":
        return (in_k and val(R.sub(a, one)) >= n and val(R.sub(d, one)) >= n
                and val(b) >= n - 1 and val(c) >= n)
    if tag == "H":
        teich = lambda x: R.teich(R.reduce(x)) == R.truncate(x, g.prec) or R.truncate(R.teich(R.reduce(x)), g.prec) == x
        return in_k and val(b) >= g.prec and val(c) >= g.prec and teich(a) and teich(d)
    if tag == "U_plus_O":
        return in_k and val(c) >= g.prec and val(R.sub(a, one)) >= g.prec and val(R.sub(d, one)) >= g.prec
    if tag == "U_minus_p":
        return in_k and val(b) >= g.prec and val(c) >= 1 and val(R.sub(a, one)) >= g.prec and val(R.sub(d, one)) >= g.prec
    if tag == "Pplus":
        # (O - {0}, O; 0, 1) as an exact matrix: w^-shift * d must equal 1
        if val(c) < g.prec:
            return False
        if g.shift > 0:
            return False
        scale = R.pi_power(-g.shift)
        dd = R.mul(d, scale)
        return (R.truncate(dd, g.prec) == R.truncate(one, g.prec) and val(a) < g.prec)
    raise ConfigError(tag)  # pragma: no cover


# ---------------------------------------------------------------- decompositions


class VertexDecomp(NamedTuple):
    """g = h * w^centre * k0 with h the vertex matrix and k0 in K reducing to kbar."""

    vertex: tuple
    kbar: tuple
    centre: int


def _mul2(F, x, y):
    """Product of 2x2 matrices over the residue field (flat 4-tuples)."""
    a, b, c, d = x
    e, f, g, h = y
    mul, add = F.mul, F.add
    return (add(mul(a, e), mul(b, g)), add(mul(a, f), mul(b, h)),
            add(mul(c, e), mul(d, g)), add(mul(c, f), mul(d, h)))


def _plus_decomp(R: LocalRing, mat, prec: int):
    """Try to write mat = (w^n, b; 0, 1) * w^beta * k0.  Returns None off the Plus side."""
    F = R.residue
    A, B, C, D = mat
    vC, vD = R.val(C, prec), R.val(D, prec)
    if min(vC, vD) >= prec:
        raise PrecisionError("bottom row vanishes at working precision")
    swapped = vC < vD
    if swapped:
        A, B, C, D = B, A, D, C
        vC, vD = vD, vC
    work = prec - vD
    ud = R.truncate(R.divpi(D, vD), work)
    ud_inv = R.inv(ud)
    t = R.truncate(R.mul(R.divpi(C, vD), ud_inv), work) if vC < prec else R.zero()
    det = R.sub(R.mul(A, D), R.mul(B, C))
    dv = R.val(det, prec)
    if dv >= prec:
        raise PrecisionError("determinant not certifiable")
    alpha = dv - vD
    ua = R.truncate(R.mul(R.divpi(det, dv), ud_inv), work)
    beta = vD
    n = alpha - beta
    Y = R.truncate(R.mul(B, ud_inv), work)
    vY = R.val(Y, work)
    if n < 0:
        return None
    if vY < beta:
        return None
    if work <= beta and vY >= work:
        raise PrecisionError("coset parameter undetermined at working precision")
    y = R.divpi(Y, beta)
    known = work - beta
    if n + 1 > known:
        raise PrecisionError(f"need {n + 1} digits, have {known}")
    digits = R.digits(y, n + 1)
    ubar_a, ubar_d = R.reduce(ua), R.reduce(ud)
    k2 = (ubar_a, F.mul(ubar_d, digits[n]), 0, ubar_d)
    kbar = _mul2(F, k2, (1, 0, R.reduce(t), 1))
    if swapped:
        kbar = _mul2(F, kbar, (0, 1, 1, 0))
    return digits[:n], kbar, beta


def vertex_decompose(g: GroupElement) -> VertexDecomp:
    """Locate the vertex g.KZ and the KZ-part of g relative to the vertex matrix."""
    R = g.ring
    res = _plus_decomp(R, g.mat, g.prec)
    if res is not None:
        digits, kbar, beta = res
        return VertexDecomp((PLUS, digits), kbar, beta - g.shift)
    A, B, C, D = g.mat
    pm = (C, D, R.mulpi(A, 1), R.mulpi(B, 1))
    res = _plus_decomp(R, pm, g.prec)
    if res is None:
        raise PrecisionError("element lies on neither side at working precision")
    digits, kbar, beta = res
    return VertexDecomp((MINUS, digits), kbar, beta - 1 - g.shift)


def vertex_radius(vertex) -> int:
    return len(vertex[1]) + vertex[0]


@dataclass(frozen=True)
class CosetWord:
    """(Pi if side)*g_{digits[0]}*...*g_{digits[-1]}*tail, tail in KZ.

    ``digits`` lists (lambda_n, ..., lambda_1); lambda_n is the lowest digit of
    the upper-right entry and the leftmost factor.
    """

    side: int
    digits: tuple
    tail: GroupElement

    @property
    def length(self) -> int:
        return len(self.digits) + self.side


def cartan_word(g: GroupElement) -> CosetWord:
    dec = vertex_decompose(g)
    h = vertex_matrix(g.ring, dec.vertex)
    tail = g_mul(g_inv(h), g)
    if not member(tail, "KZ"):
        raise PrecisionError("tail left KZ at working precision")
    return CosetWord(dec.vertex[0], dec.vertex[1], tail)


def reassemble(word: CosetWord) -> GroupElement:
    R = word.tail.ring
    out = pi_elem(R) if word.side else identity(R)
    for lam in word.digits:
        out = g_mul(out, g_lambda(R, lam))
    return g_mul(out, word.tail)


def length(g: GroupElement) -> int:
    return vertex_radius(vertex_decompose(g).vertex)


def iwahori_factor(g: GroupElement):
    """g = (1,x;0,1) * diag(u1,u2) * (1,0;y,1) for g in I1."""
    if not member(g, "I1"):
        raise DomainError("iwahori_factor needs an element of I1")
    R = g.ring
    a, b, c, d = g.mat
    dinv = R.inv(d)
    x = R.mul(b, dinv)
    y = R.mul(c, dinv)
    det = R.sub(R.mul(a, d), R.mul(b, c))
    u1 = R.mul(det, dinv)
    p = g.prec
    return (make(R, (R.one(), x, R.zero(), R.one()), 0, p),
            make(R, (u1, R.zero(), R.zero(), d), 0, p),
            make(R, (R.one(), R.zero(), y, R.one()), 0, p))


def coset_rep(ring: LocalRing, lam: int) -> GroupElement:
    """([lam], 1; 1, 0)."""
    return make(ring, (ring.teich(lam), ring.one(), ring.one(), ring.zero()))


@dataclass(frozen=True)
class InI:
    i: GroupElement


@dataclass(frozen=True)
class Translated:
    lam: int
    i: GroupElement


def k_coset(k: GroupElement):
    """K = I  or  ([lam],1;1,0) I."""
    if not member(k, "K"):
        raise DomainError("k_coset needs an element of K")
    R = k.ring
    a, b, c, d = k.mat
    if R.val(c, k.prec) >= 1:
        return InI(k)
    F = R.residue
    lam = F.mul(R.reduce(a), F.inv(R.reduce(c)))
    tl = R.teich(lam)
    i = make(R, (c, d, R.sub(a, R.mul(tl, c)), R.sub(b, R.mul(tl, d))), 0, k.prec)
    return Translated(lam, i)


def ip_rewrite(i: GroupElement, n: int, x):
    """Rewrite i*(w^n, x; 0, 1) = (w^n, x'; 0, 1)*i' with i, i' in IZ."""
    if not member(i, "IZ"):
        raise DomainError("ip_rewrite needs an element of IZ")
    R = i.ring
    h = make(R, (R.pi_power(n), x, R.zero(), R.one()))
    gi = g_mul(i, h)
    dec = vertex_decompose(gi)
    side, digits = dec.vertex
    if side != PLUS or len(digits) != n:
        raise PrecisionError("IZ moved the vertex off its sphere")  # pragma: no cover
    h2 = vertex_matrix(R, dec.vertex)
    i2 = g_mul(g_inv(h2), gi)
    return R.from_digits(digits), i2


# ---------------------------------------------------------------- generators


def iwahori_generators(ring: LocalRing, level: int, pro_p: bool = False) -> list[GroupElement]:
    """Topological generators of I (or I1) modulo a subgroup acting trivially at depth ``level``."""
    F = ring.residue
    basis = F.prime_basis()
    gens = []
    if not pro_p:
        zeta = F.generator()
        gens += [diag(ring, ring.teich(zeta), ring.one()), diag(ring, ring.one(), ring.teich(zeta))]
    for j in range(0, level + 1):
        for mu in basis:
            gens.append(upper(ring, ring.mulpi(ring.teich(mu), j)))
    for j in range(1, level + 2):
        for mu in basis:
            gens.append(lower(ring, ring.mulpi(ring.teich(mu), j)))
            one = ring.one()
            gens.append(diag(ring, ring.add(one, ring.mulpi(ring.teich(mu), j)), one))
            gens.append(diag(ring, one, ring.add(one, ring.mulpi(ring.teich(mu), j))))
    return gens


def k1_generators(ring: LocalRing, level: int) -> list[GroupElement]:
    F = ring.residue
    one = ring.one()
    gens = []
    for j in range(1, level + 2):
        for mu in F.prime_basis():
            t = ring.mulpi(ring.teich(mu), j)
            gens += [upper(ring, t), lower(ring, t), diag(ring, ring.add(one, t), one),
                     diag(ring, one, ring.add(one, t))]
    return gens


# ---------------------------------------------------------------- random elements


def random_unit(ring: LocalRing, rng: random.Random, digits: int):
    ds = [rng.randrange(1, ring.q)] + [rng.randrange(ring.q) for _ in range(digits - 1)]
    return ring.from_digits(ds)


def random_integral(ring: LocalRing, rng: random.Random, digits: int):
    return ring.from_digits([rng.randrange(ring.q) for _ in range(digits)])


def random_k(ring: LocalRing, rng: random.Random, digits: int = 4) -> GroupElement:
    while True:
        m = tuple(random_integral(ring, rng, digits) for _ in range(4))
        a, b, c, d = m
        if ring.is_unit(ring.sub(ring.mul(a, d), ring.mul(b, c))):
            return make(ring, m)


def random_element(ring: LocalRing, rng: random.Random, max_len: int = 4, digits: int = 4) -> GroupElement:
    """k1 * diag(w^a, w^b) * k2 with |a - b| <= max_len, plus a random centre."""
    a = rng.randrange(0, max_len + 1)
    e = rng.randrange(-2, 3)
    t = make(ring, (ring.pi_power(a), ring.zero(), ring.zero(), ring.one()), e)
    return g_mul(g_mul(random_k(ring, rng, digits), t), random_k(ring, rng, digits))


def random_i1(ring: LocalRing, rng: random.Random, digits: int = 4) -> GroupElement:
    one = ring.one()
    a = ring.add(one, ring.mulpi(random_integral(ring, rng, digits), 1))
    d = ring.add(one, ring.mulpi(random_integral(ring, rng, digits), 1))
    b = random_integral(ring, rng, digits)
    c = ring.mulpi(random_integral(ring, rng, digits), 1)
    return make(ring, (a, b, c, d))


# ---------------------------------------------------------------- text format


def to_text(g: GroupElement) -> str:
    R = g.ring
    a, b, c, d = (R.to_text(x) for x in g.mat)
    return f"[[{a},{b}],[{c},{d}]] * w^{-g.shift}"


_TEXT = re.compile(r"^\[\[(.*),(.*)\],\[(.*),(.*)\]\](?:\*w\^(-?\d+))?$")


def parse(ring: LocalRing, text: str) -> GroupElement:
    m = _TEXT.match(text.replace(" ", ""))
    if not m:
        raise ConfigError(f"cannot parse matrix {text!r}")
    entries = tuple(ring.parse(t) for t in m.groups()[:4])
    power = int(m.group(5)) if m.group(5) else 0
    return make(ring, entries, -power)
