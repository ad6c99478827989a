"""Exact linear algebra over GF(p^m): dense numpy elimination and sparse echelon bases.

Dense matrices are numpy int64 arrays of field codes; arithmetic goes through
the field's flat tables.  Sparse vectors are ``dict[int, int]`` keyed by a
totally ordered coordinate index; the pivot of a row is its largest key.
"""
from __future__ import annotations

import heapq
from typing import Iterable

import numpy as np

from .localring import CoeffField

TABLE_CAP = 256


class FieldOps:
    """Vectorized arithmetic for a CoeffField."""

    def __init__(self, F: CoeffField):
        if F.q > TABLE_CAP and F.m > 1:
            raise ValueError(f"dense tables limited to q <= {TABLE_CAP}")
        self.F = F
        self.p, self.q = F.p, F.q
        self.prime = F.m == 1
        if not self.prime:
            q = F.q
            idx = np.arange(q)
            self.mul_t = np.array([F.mul(a, b) for a in range(q) for b in range(q)], dtype=np.int64)
            self.add_t = np.array([F.add(a, b) for a in range(q) for b in range(q)], dtype=np.int64)
            self.neg_t = np.array([F.neg(int(a)) for a in idx], dtype=np.int64)
        self.inv_list = [0] + [F.inv(a) for a in range(1, F.q)]

    def add(self, A, B):
        if self.prime:
            return (A + B) % self.p
        if self.p == 2:
            return A ^ B
        return self.add_t[A * self.q + B]

    def neg(self, A):
        if self.prime:
            return (-A) % self.p
        return self.neg_t[A]

    def sub(self, A, B):
        return self.add(A, self.neg(B))

    def mul(self, A, B):
        if self.prime:
            return (A * B) % self.p
        return self.mul_t[A * self.q + B]

    def matmul(self, A, B):
        """Matrix product A @ B."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if self.prime:
            p = self.p
            if A.shape[1] * (p - 1) ** 2 < 2**62:
                return (A @ B) % p
            out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
            for k in range(A.shape[1]):
                out = (out + np.outer(A[:, k], B[k, :])) % p
            return out
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for k in range(A.shape[1]):
            out = self.add(out, self.mul(A[:, k][:, None], B[k, :][None, :]))
        return out


_OPS: dict = {}


def ops(F: CoeffField) -> FieldOps:
    o = _OPS.get(F)
    if o is None:
        o = _OPS[F] = FieldOps(F)
    return o


def rref(F: CoeffField, M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    o = ops(F)
    A = np.array(M, dtype=np.int64, copy=True)
    if A.ndim != 2 or A.size == 0:
        return A.reshape(A.shape[0] if A.ndim == 2 else 0, -1), []
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = o.inv_list[int(A[r, c])]
        A[r] = o.mul(A[r], inv)
        col = A[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            A[nzr] = o.sub(A[nzr], o.mul(col[nzr][:, None], A[r][None, :]))
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(F: CoeffField, M) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def nullspace(F: CoeffField, M) -> np.ndarray:
    """Basis (rows) of {v : M v = 0}."""
    M = np.asarray(M, dtype=np.int64)
    cols = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    R, piv = rref(F, M)
    o = ops(F)
    free = [c for c in range(cols) if c not in set(piv)]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for t, fc in enumerate(free):
        out[t, fc] = 1
        for i, pc in enumerate(piv):
            out[t, pc] = int(o.neg(np.int64(R[i, fc])))
    return out


def span_basis(F: CoeffField, vecs) -> np.ndarray:
    vecs = np.asarray(vecs, dtype=np.int64)
    if vecs.size == 0:
        return vecs.reshape(0, vecs.shape[1] if vecs.ndim == 2 else 0)
    return rref(F, vecs)[0]


def solve(F: CoeffField, M, b):
    """One solution x of M x = b, or None."""
    M = np.asarray(M, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    aug = np.concatenate([M, b], axis=1)
    R, piv = rref(F, aug)
    cols = M.shape[1]
    if piv and piv[-1] == cols:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(piv):
        x[pc] = R[i, cols]
    return x


# ---------------------------------------------------------------- sparse


def sp_axpy(F: CoeffField, v: dict, c: int, w: dict) -> dict:
    """v + c*w in place."""
    if not c:
        return v
    if F.m == 1:
        p = F.p
        for k, x in w.items():
            y = (v.get(k, 0) + c * x) % p
            if y:
                v[k] = y
            else:
                v.pop(k, None)
        return v
    mul, add = F.mul, F.add
    for k, x in w.items():
        y = add(v.get(k, 0), mul(c, x))
        if y:
            v[k] = y
        else:
            v.pop(k, None)
    return v


def sp_scale(F: CoeffField, c: int, v: dict) -> dict:
    if not c:
        return {}
    if F.m == 1:
        p = F.p
        return {k: x * c % p for k, x in v.items()}
    return {k: F.mul(c, x) for k, x in v.items()}


def sp_add(F: CoeffField, v: dict, w: dict) -> dict:
    return sp_axpy(F, dict(v), 1, w)


def sp_sub(F: CoeffField, v: dict, w: dict) -> dict:
    return sp_axpy(F, dict(v), F.neg(1), w)


def sp_sum(F: CoeffField, vs: Iterable[dict]) -> dict:
    out: dict = {}
    for v in vs:
        sp_axpy(F, out, 1, v)
    return out


class SparseEchelon:
    """Semi-echelon basis of sparse vectors with pivot = largest key, monic at the pivot.

    ``reduce`` returns the unique representative free of pivot keys, so two
    vectors are congruent modulo the span iff their reductions agree.
    """

    def __init__(self, F: CoeffField, rows: Iterable[dict] = ()):
        self.F = F
        self.rows: dict[int, dict] = {}
        for r in rows:
            self.add(r)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def copy(self) -> "SparseEchelon":
        e = SparseEchelon(self.F)
        e.rows = dict(self.rows)
        return e

    def reduce(self, v: dict) -> dict:
        rows = self.rows
        if not rows:
            return dict(v)
        v = dict(v)
        heap = [-k for k in v if k in rows]
        if not heap:
            return v
        heapq.heapify(heap)
        F = self.F
        p = F.p
        prime = F.m == 1
        neg, mul, add = F.neg, F.mul, F.add
        while heap:
            k = -heapq.heappop(heap)
            c = v.get(k)
            if not c:
                continue
            row = rows[k]
            if prime:
                c = p - c
                for kk, x in row.items():
                    old = v.get(kk)
                    if old is None:
                        v[kk] = c * x % p
                        if kk in rows:
                            heapq.heappush(heap, -kk)
                    else:
                        y = (old + c * x) % p
                        if y:
                            v[kk] = y
                        else:
                            del v[kk]
            else:
                c = neg(c)
                for kk, x in row.items():
                    old = v.get(kk)
                    if old is None:
                        v[kk] = mul(c, x)
                        if kk in rows:
                            heapq.heappush(heap, -kk)
                    else:
                        y = add(old, mul(c, x))
                        if y:
                            v[kk] = y
                        else:
                            del v[kk]
        return v

    def add(self, v: dict) -> bool:
        r = self.reduce(v)
        if not r:
            return False
        piv = max(r)
        c = r[piv]
        if c != 1:
            r = sp_scale(self.F, self.F.inv(c), r)
        self.rows[piv] = r
        return True

    def add_reduced(self, r: dict) -> None:
        """Insert a vector already reduced against this basis (nonzero)."""
        piv = max(r)
        c = r[piv]
        if c != 1:
            r = sp_scale(self.F, self.F.inv(c), r)
        self.rows[piv] = r

    def contains(self, v: dict) -> bool:
        return not self.reduce(v)

    def contains_space(self, other: "SparseEchelon") -> bool:
        return all(self.contains(r) for r in other.rows.values())

    def basis(self) -> list[dict]:
        return [self.rows[k] for k in sorted(self.rows)]

    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def restrict(self, bound: int) -> "SparseEchelon":
        """Rows whose pivot is below ``bound``; with a radius-first key order this is the
        intersection of the span with the coordinates below ``bound``."""
        e = SparseEchelon(self.F)
        e.rows = {k: r for k, r in self.rows.items() if k < bound}
        return e

    def full_reduce(self) -> "SparseEchelon":
        """Fully reduced form (each row free of the other pivots): a canonical basis.

        A row never contains keys above its pivot, so one ascending sweep suffices.
        """
        e = SparseEchelon(self.F)
        for k in sorted(self.rows):
            r = dict(self.rows[k])
            del r[k]
            red = e.reduce(r)
            red[k] = 1
            e.rows[k] = red
        return e

    def intersect(self, other: "SparseEchelon") -> "SparseEchelon":
        """Intersection of two spans, from the dependencies of self modulo other."""
        F = self.F
        # vectors of self reduced by other; dependencies give the intersection
        out = SparseEchelon(F)
        # track v -> (residue, v) by tagging with a disjoint key range
        tagged: list[tuple[dict, dict]] = []
        for r in self.basis():
            tagged.append((other.reduce(r), r))
        # Gaussian elimination on residues carrying the originals
        piv: dict[int, tuple[dict, dict]] = {}
        for res, orig in tagged:
            res, orig = dict(res), dict(orig)
            while res:
                k = max(res)
                if k not in piv:
                    break
                pres, porig = piv[k]
                c = F.neg(F.mul(res[k], F.inv(pres[k])))
                sp_axpy(F, res, c, pres)
                sp_axpy(F, orig, c, porig)
            if res:
                piv[max(res)] = (res, orig)
            elif orig:
                out.add(orig)
        return out

    def sum(self, other: "SparseEchelon") -> "SparseEchelon":
        e = self.copy()
        for r in other.rows.values():
            e.add(r)
        return e

    def equals(self, other: "SparseEchelon") -> bool:
        return self.dim == other.dim and self.contains_space(other)
