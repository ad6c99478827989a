"""Irreducible KZ-representations trivial on K1 and the Hecke kernel endomorphism U.

A weight is the tensor product over j < f of Sym^{r_j} precomposed with the
j-th power of Frobenius, twisted by det^a, with w acting by the central value.
Basis vectors are exponent tuples (i_0, ..., i_{f-1}) standing for
x^{i_0} y^{r_0 - i_0} (x) ... ; they are ordered with exponents descending, so
index 0 is x^r (x) ... (x) x^r, the I1-fixed vector v0.

The action is the row substitution x -> a x + c y, y -> b x + d y.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg
from .errors import ConfigError, ConstructionError, DomainError
from .gl2 import GroupElement, member, reduction
from .localring import CoeffField, coeff_field, embedding


def _binom_row(F: CoeffField, n: int) -> list[int]:
    row = [1]
    for _ in range(n):
        row = [F.add(a, b) for a, b in zip([0] + row, row + [0])]
    return row


@dataclass(frozen=True)
class WeightVector:
    coeffs: tuple

    def as_dict(self, labels) -> dict:
        return {labels[i]: c for i, c in enumerate(self.coeffs) if c}


class Fiber:
    """Interface for a finite-dimensional KZ-representation trivial on K1."""

    dim: int
    F: CoeffField

    def matrix(self, kbar: tuple, centre: int = 0) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def apply(self, kbar: tuple, centre: int, vec: list) -> list:
        M = self._mat_cache_lookup(kbar, centre)
        F = self.F
        out = [0] * self.dim
        if F.m == 1:
            p = F.p
            for j, c in enumerate(vec):
                if c:
                    col = M[j]
                    for i, x in enumerate(col):
                        if x:
                            out[i] = (out[i] + c * x) % p
        else:
            for j, c in enumerate(vec):
                if c:
                    col = M[j]
                    for i, x in enumerate(col):
                        if x:
                            out[i] = F.add(out[i], F.mul(c, x))
        return out

    def _mat_cache_lookup(self, kbar, centre):
        key = (kbar, centre)
        cache = self.__dict__.setdefault("_col_cache", {})
        cols = cache.get(key)
        if cols is None:
            M = self.matrix(kbar, centre)
            cols = [[int(x) for x in M[:, j]] for j in range(self.dim)]
            cache[key] = cols
        return cols


@dataclass(frozen=True, eq=False)
class Weight(Fiber):
    p: int
    f: int
    r_vec: tuple
    det_twist: int = 0
    central_value: int = 1
    m: int | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.r_vec) != self.f:
            raise ConfigError("r_vec must have length f")
        if any(not 0 <= r <= self.p - 1 for r in self.r_vec):
            raise ConfigError("each r_j must lie in [0, p-1]")
        q = self.p**self.f
        if not 0 <= self.det_twist < max(q - 1, 1):
            raise ConfigError(f"det twist must lie in [0, q-2]")
        m = self.f if self.m is None else self.m
        if m % self.f:
            raise ConfigError("coefficient degree m must be a multiple of f")
        object.__setattr__(self, "m", m)
        if self.central_value % self.F.q == 0:
            raise ConfigError("central value must be nonzero")

    def __eq__(self, other) -> bool:
        return isinstance(other, Weight) and self.descriptor == other.descriptor

    def __hash__(self) -> int:
        return hash(self.descriptor)

    @property
    def descriptor(self) -> tuple:
        return (self.p, self.f, self.r_vec, self.det_twist, self.central_value, self.m)

    @property
    def q(self) -> int:
        return self.p**self.f

    @cached_property
    def F(self) -> CoeffField:
        return coeff_field(self.p, self.m)

    @cached_property
    def residue(self) -> CoeffField:
        return coeff_field(self.p, self.f)

    @cached_property
    def emb(self) -> tuple:
        return embedding(self.residue, self.F)

    @cached_property
    def basis(self) -> list[tuple]:
        ranges = [range(r, -1, -1) for r in self.r_vec]
        return list(itertools.product(*ranges))

    @cached_property
    def index(self) -> dict:
        return {b: i for i, b in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def labels(self) -> list[str]:
        out = []
        for b in self.basis:
            parts = [f"x^{i}y^{r - i}" for i, r in zip(b, self.r_vec)]
            out.append("(x)".join(parts))
        return out

    def _sym_matrix(self, j: int, kbar: tuple) -> list[list[int]]:
        """Matrix (rows: output x-exponent, cols: input x-exponent) of the j-th factor."""
        F, E = self.F, self.emb
        Fr = self.residue
        a, b, c, d = (E[Fr.frob(t, j)] for t in kbar)
        r = self.r_vec[j]
        binoms = [_binom_row(F, n) for n in range(r + 1)]
        out = [[0] * (r + 1) for _ in range(r + 1)]
        for i in range(r + 1):
            # (a x + c y)^i (b x + d y)^(r-i), coefficients indexed by x-exponent
            p1 = [F.mul(binoms[i][t], F.mul(F.pow(a, t), F.pow(c, i - t))) for t in range(i + 1)]
            k = r - i
            p2 = [F.mul(binoms[k][t], F.mul(F.pow(b, t), F.pow(d, k - t))) for t in range(k + 1)]
            prod = [0] * (r + 1)
            for s, x in enumerate(p1):
                if x:
                    for t, y in enumerate(p2):
                        if y:
                            prod[s + t] = F.add(prod[s + t], F.mul(x, y))
            for e in range(r + 1):
                out[e][i] = prod[e]
        return out

    def matrix(self, kbar: tuple, centre: int = 0) -> np.ndarray:
        """sigma(w^centre * k) for k reducing to kbar, as a dense matrix (column = image)."""
        key = (tuple(kbar), centre)
        M = self._cache.get(key)
        if M is not None:
            return M
        F, Fr = self.F, self.residue
        a, b, c, d = kbar
        det = Fr.sub(Fr.mul(a, d), Fr.mul(b, c))
        if det == 0:
            raise DomainError("kbar is not invertible")
        factors = [self._sym_matrix(j, tuple(kbar)) for j in range(self.f)]
        scal = F.mul(self.emb[Fr.pow(det, self.det_twist)], F.pow(self.central_value, centre % (F.q - 1)) if F.q > 2 else 1)
        D = self.dim
        M = np.zeros((D, D), dtype=np.int64)
        r = self.r_vec
        for col, bcol in enumerate(self.basis):
            for row, brow in enumerate(self.basis):
                x = scal
                for j in range(self.f):
                    x = F.mul(x, factors[j][brow[j]][bcol[j]])
                    if not x:
                        break
                M[row, col] = x
        self._cache[key] = M
        return M

    def act(self, k: GroupElement, v: WeightVector) -> WeightVector:
        if not member(k, "KZ"):
            raise DomainError("weight action needs an element of KZ")
        out = self.apply(reduction(k), -k.shift, list(v.coeffs))
        return WeightVector(tuple(out))

    def v0(self) -> list[int]:
        return [1] + [0] * (self.dim - 1)

    def unit(self, i: int) -> list[int]:
        v = [0] * self.dim
        v[i] = 1
        return v

    @cached_property
    def U(self) -> np.ndarray:
        return hecke_endo(self)

    def U_apply(self, vec: list) -> list:
        U = self.U
        F = self.F
        out = [0] * self.dim
        for i in range(self.dim):
            s = 0
            for j, c in enumerate(vec):
                if c and U[i, j]:
                    s = F.add(s, F.mul(int(U[i, j]), c))
            out[i] = s
        return out

    def text(self) -> str:
        r = ":".join(str(x) for x in self.r_vec)
        return f"p={self.p},f={self.f},r={r},a={self.det_twist},z={self.central_value}"


def make_weight(p: int, f: int, r, a: int = 0, z: int = 1, m: int | None = None) -> Weight:
    r_vec = (r,) if isinstance(r, int) else tuple(r)
    return Weight(p, f, r_vec, a, z, m)


def parse_weight(text: str) -> Weight:
    """Parse a descriptor such as ``p=3,f=1,r=2,a=0,z=1`` (``r=1:0`` when f = 2)."""
    fields = {}
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        m = re.fullmatch(r"([a-z]+)=([0-9:]+)", part)
        if not m:
            raise ConfigError(f"bad weight field {part!r}")
        fields[m.group(1)] = m.group(2)
    try:
        p = int(fields["p"])
        f = int(fields.get("f", "1"))
        r = tuple(int(x) for x in fields.get("r", "0").split(":"))
        if len(r) == 1 and f > 1:
            r = r + (0,) * (f - 1)
        return Weight(p, f, r, int(fields.get("a", "0")), int(fields.get("z", "1")),
                      int(fields["m"]) if "m" in fields else None)
    except KeyError as exc:
        raise ConfigError(f"weight descriptor missing {exc}") from None


def weight_act(sigma: Weight, k: GroupElement, v: WeightVector) -> WeightVector:
    return sigma.act(k, v)


def unipotent_generators(sigma: Weight) -> list[tuple]:
    """Reductions of generators of I1 / K1 (upper unipotents over an F_p-basis)."""
    return [(1, mu, 0, 1) for mu in sigma.residue.prime_basis()]


def i1_line(sigma: Weight) -> WeightVector:
    F = sigma.F
    o = linalg.ops(F)
    D = sigma.dim
    blocks = []
    eye = np.eye(D, dtype=np.int64)
    for kb in unipotent_generators(sigma):
        blocks.append(o.sub(sigma.matrix(kb), eye))
    ns = linalg.nullspace(F, np.concatenate(blocks, axis=0))
    if ns.shape[0] != 1:
        raise ConstructionError(f"I1-invariants of {sigma.text()} have dimension {ns.shape[0]}")
    v = [int(x) for x in ns[0]]
    lead = next(c for c in v if c)
    inv = F.inv(lead)
    return WeightVector(tuple(F.mul(inv, c) for c in v))


def hecke_endo(sigma: Weight, scalar: int = 1) -> np.ndarray:
    """U = tensor of the projectors onto y^{r_j}, times ``scalar``; validated on v0."""
    F = sigma.F
    D = sigma.dim
    U = np.zeros((D, D), dtype=np.int64)
    top = sigma.index[tuple(0 for _ in sigma.r_vec)]
    U[top, top] = scalar % F.p if F.m == 1 else scalar
    _validate_hecke(sigma, U)
    return U


def _validate_hecke(sigma: Weight, U: np.ndarray) -> None:
    """The g_lambda terms of T[1, v0] must carry exactly v0, and U v0 = 0 when dim >= 2."""
    F = sigma.F
    o = linalg.ops(F)
    v0 = np.array(sigma.v0(), dtype=np.int64)
    s = sigma.matrix((0, 1, 1, 0))
    for lam in range(sigma.q):
        u = sigma.matrix((1, sigma.residue.neg(lam), 0, 1))
        A = o.matmul(o.matmul(o.matmul(s, U), s), u)
        w = o.matmul(A, v0.reshape(-1, 1)).ravel()
        if sigma.dim >= 2 and not np.array_equal(w, v0):
            raise ConstructionError("g_lambda coefficient of T[1, v0] is not v0")
    if sigma.dim >= 2 and o.matmul(U, v0.reshape(-1, 1)).any():
        raise ConstructionError("U does not annihilate v0")


def hecke_compatible(sigma: Weight, kbar_pairs) -> bool:
    """Check sigma(k1) U = U sigma(k2) whenever diag(1,w)^-1 k2 diag(1,w) = k1 (both integral).

    ``kbar_pairs`` lists reductions (k1bar, k2bar) of such pairs.
    """
    o = linalg.ops(sigma.F)
    U = sigma.U
    for k1, k2 in kbar_pairs:
        left = o.matmul(sigma.matrix(k1), U)
        right = o.matmul(U, sigma.matrix(k2))
        if not np.array_equal(left, right):
            return False
    return True


def k_translates_span(sigma: Weight) -> int:
    v0 = np.array(sigma.v0(), dtype=np.int64).reshape(-1, 1)
    o = linalg.ops(sigma.F)
    vecs = [o.matmul(sigma.matrix((lam, 1, 1, 0)), v0).ravel() for lam in range(sigma.q)]
    return linalg.rank(sigma.F, np.array(vecs))


def weight_grid(p: int, f: int, sample: int | None = None) -> list[Weight]:
    """All r-vectors for (p, f) with a = 0, z = 1; optionally an evenly spaced sample."""
    rs = list(itertools.product(range(p), repeat=f))
    if sample is not None and len(rs) > sample:
        step = len(rs) / sample
        rs = [rs[int(i * step)] for i in range(sample)]
        if (p - 1,) * f not in rs:
            rs[-1] = (p - 1,) * f
    return [Weight(p, f, r) for r in rs]
