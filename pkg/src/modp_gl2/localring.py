"""Finite fields and the truncated local ring O/w^N with its Teichmuller section.

Two backends are supported for O:

* ``equal``: F_q[[w]] truncated at w^N, elements are tuples of N residue codes.
* ``mixed``: Z_p truncated at p^N (only q = p), elements are ints in [0, p^N).

Residue and coefficient field elements are encoded as ints 0..q-1 whose base-p
digits are the coefficients of a polynomial in a fixed primitive generator.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import ConfigError, NonUnitError, PrecisionError

FIELD_DEGREE_CAP = 12
FIELD_ORDER_CAP = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class CoeffField:
    """The finite field F_{p^m} with table-driven arithmetic.

    The defining polynomial is the lexicographically first monic primitive
    polynomial of degree m, so the class of x generates the unit group and
    multiplication goes through exp/log tables.
    """

    def __init__(self, p: int, m: int = 1, cap: int = FIELD_DEGREE_CAP):
        if not is_prime(p):
            raise ConfigError(f"p={p} is not prime")
        if not 1 <= m <= cap:
            raise ConfigError(f"extension degree m={m} outside [1, {cap}]")
        q = p**m
        if q > FIELD_ORDER_CAP:
            raise ConfigError(f"field order {q} exceeds table cap {FIELD_ORDER_CAP}")
        self.p, self.m, self.q = p, m, q
        self.modulus, self._exp = self._find_primitive()
        self._log = [0] * q
        for i, a in enumerate(self._exp):
            self._log[a] = i
        self._add = None
        if p > 2 and m > 1:
            self._add = [self._digit_add(a, b) for a in range(q) for b in range(q)]
        self._neg = [self._digit_neg(a) for a in range(q)]

    # construction helpers
    def _digits(self, a: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.m):
            out.append(a % p)
            a //= p
        return out

    def _undigits(self, ds: Sequence[int]) -> int:
        a = 0
        for d in reversed(ds):
            a = a * self.p + d
        return a

    def _digit_add(self, a: int, b: int) -> int:
        p = self.p
        return self._undigits([(x + y) % p for x, y in zip(self._digits(a), self._digits(b))])

    def _digit_neg(self, a: int) -> int:
        return self._undigits([(-x) % self.p for x in self._digits(a)])

    def _times_x(self, ds: list[int], mod: Sequence[int]) -> list[int]:
        p, m = self.p, self.m
        top = ds[-1]
        out = [0] + ds[:-1]
        if top:
            out = [(out[i] - top * mod[i]) % p for i in range(m)]
        return out

    def _find_primitive(self):
        p, m, q = self.p, self.m, self.q
        if m == 1:
            for g in range(1, p):
                seen, x = set(), 1
                for _ in range(p - 1):
                    seen.add(x)
                    x = x * g % p
                if len(seen) == p - 1:
                    return (p - g, 1), [pow(g, i, p) for i in range(p - 1)]
        for code in range(p**m):
            mod = self._digits(code) if m > 1 else [code]
            mod = list(mod) + [1]
            exp, ds = [], [1] + [0] * (m - 1)
            ok = True
            for i in range(q - 1):
                a = self._undigits(ds)
                if i > 0 and a == 1:
                    ok = False
                    break
                exp.append(a)
                ds = self._times_x(ds, mod)
            if ok and self._undigits(ds) == 1 and len(set(exp)) == q - 1:
                return tuple(mod), exp
        raise ConfigError(f"no primitive polynomial found for p={p}, m={m}")

    # arithmetic
    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self._add[a * self.q + b]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in finite field")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e > 0 else 1
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def frob(self, a: int, j: int = 1) -> int:
        return self.pow(a, self.p**j)

    def from_int(self, n: int) -> int:
        return n % self.p

    def generator(self) -> int:
        return self._exp[1] if self.q > 2 else 1

    def elements(self) -> range:
        return range(self.q)

    def prime_basis(self) -> list[int]:
        """An F_p-basis of the field: 1, x, ..., x^(m-1)."""
        return [self.p**i for i in range(self.m)]

    def sum(self, xs: Iterable[int]) -> int:
        s = 0
        for x in xs:
            s = self.add(s, x)
        return s

    def __repr__(self) -> str:
        return f"CoeffField(p={self.p}, m={self.m})"

    def __eq__(self, other) -> bool:
        return isinstance(other, CoeffField) and (self.p, self.m) == (other.p, other.m)

    def __hash__(self) -> int:
        return hash((self.p, self.m))


@lru_cache(maxsize=None)
def coeff_field(p: int, m: int = 1) -> CoeffField:
    return CoeffField(p, m)


@lru_cache(maxsize=None)
def embedding(src: CoeffField, dst: CoeffField) -> tuple[int, ...]:
    """Table of a field embedding F_{p^f} -> F_{p^m} (requires f | m)."""
    if src.p != dst.p or dst.m % src.m:
        raise ConfigError(f"cannot embed {src} into {dst}")
    if src == dst:
        return tuple(range(src.q))
    # image of the generator: a root of src.modulus among elements of order | q_src - 1
    mod = src.modulus
    step = (dst.q - 1) // (src.q - 1)
    for k in range(src.q - 1):
        cand = dst.pow(dst.generator(), step * k) if src.q > 2 else 1
        val = 0
        for c in reversed(mod):
            val = dst.add(dst.mul(val, cand), dst.from_int(c))
        if val == 0:
            break
    else:  # pragma: no cover - a primitive polynomial always splits in the extension
        raise ConfigError("embedding root not found")
    table = [0] * src.q
    for i, a in enumerate(src._exp):
        table[a] = dst.pow(cand, i)
    return tuple(table)


class LocalRing:
    """Context for O/w^N: backend, residue field F_q and precision N."""

    def __init__(self, backend: str, p: int, f: int = 1, N: int = 12):
        if backend not in ("equal", "mixed"):
            raise ConfigError(f"unknown backend {backend!r}")
        if backend == "mixed" and f != 1:
            raise ConfigError("mixed characteristic backend supports only q = p (f = 1)")
        if N < 1:
            raise ConfigError("precision N must be >= 1")
        self.backend, self.p, self.f, self.N = backend, p, f, N
        self.residue = coeff_field(p, f)
        self.q = self.residue.q
        self.equal = backend == "equal"
        if self.equal:
            self._zero = (0,) * N
        else:
            self.modulus = p**N
            self._teich = [self._mixed_teich(lam) for lam in range(p)]

    def __repr__(self) -> str:
        return f"LocalRing({self.backend!r}, p={self.p}, f={self.f}, N={self.N})"

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalRing) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def key(self):
        return (self.backend, self.p, self.f, self.N)

    def with_precision(self, N: int) -> "LocalRing":
        return LocalRing(self.backend, self.p, self.f, N)

    def _mixed_teich(self, lam: int) -> int:
        x = lam % self.p
        mod = self.modulus
        while True:
            y = pow(x, self.p, mod)
            if y == x:
                return x
            x = y

    # raw constructors
    def zero(self):
        return self._zero if self.equal else 0

    def one(self):
        return (1,) + (0,) * (self.N - 1) if self.equal else 1 % self.modulus

    def pi_power(self, k: int):
        if k >= self.N:
            return self.zero()
        if self.equal:
            return (0,) * k + (1,) + (0,) * (self.N - k - 1)
        return self.p**k % self.modulus

    def teich(self, lam: int):
        if self.equal:
            return (lam,) + (0,) * (self.N - 1)
        return self._teich[lam % self.p]

    def from_int(self, n: int):
        if self.equal:
            return (n % self.p,) + (0,) * (self.N - 1)
        return n % self.modulus

    def from_digits(self, ds: Sequence[int]):
        """sum_i [d_i] w^i for Teichmuller digits d_i."""
        if self.equal:
            ds = tuple(ds)[: self.N]
            return ds + (0,) * (self.N - len(ds))
        x, pk = 0, 1
        for d in ds:
            x += self._teich[d] * pk
            pk *= self.p
        return x % self.modulus

    # raw arithmetic
    def add(self, a, b):
        if not self.equal:
            return (a + b) % self.modulus
        F = self.residue
        if F.m == 1:
            p = self.p
            return tuple((x + y) % p for x, y in zip(a, b))
        return tuple(F.add(x, y) for x, y in zip(a, b))

    def neg(self, a):
        if not self.equal:
            return (-a) % self.modulus
        F = self.residue
        return tuple(F.neg(x) for x in a)

    def sub(self, a, b):
        if not self.equal:
            return (a - b) % self.modulus
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if not self.equal:
            return a * b % self.modulus
        N = self.N
        F = self.residue
        if F.m == 1:
            p = self.p
            out = [0] * N
            for i, x in enumerate(a):
                if x:
                    for j in range(N - i):
                        y = b[j]
                        if y:
                            out[i + j] += x * y
            return tuple(c % p for c in out)
        # inlined log/exp and addition tables; this is the hot loop of every group product
        out = [0] * N
        exp, log, q, q1 = F._exp, F._log, F.q, F.q - 1
        addt = F._add
        lb = [log[y] if y else -1 for y in b]
        for i, x in enumerate(a):
            if x:
                lx = log[x]
                for j in range(N - i):
                    ly = lb[j]
                    if ly >= 0:
                        v = exp[(lx + ly) % q1]
                        o = out[i + j]
                        out[i + j] = (o ^ v) if addt is None else addt[o * q + v]
        return tuple(out)

    def scale(self, c: int, a):
        """Multiply by the Teichmuller lift of a residue element."""
        return self.mul(self.teich(c), a)

    def val(self, a, cap: int | None = None) -> int:
        cap = self.N if cap is None else min(cap, self.N)
        if self.equal:
            for i in range(cap):
                if a[i]:
                    return i
            return cap
        if a == 0:
            return cap
        v = 0
        p = self.p
        while a % p == 0 and v < cap:
            a //= p
            v += 1
        return v

    def reduce(self, a) -> int:
        return a[0] if self.equal else a % self.p

    def is_unit(self, a) -> bool:
        return self.reduce(a) != 0

    def inv(self, a):
        if not self.is_unit(a):
            raise NonUnitError("inverse of a non-unit")
        if not self.equal:
            return pow(a, -1, self.modulus)
        F = self.residue
        N = self.N
        i0 = F.inv(a[0])
        out = [i0] + [0] * (N - 1)
        for k in range(1, N):
            s = 0
            for i in range(1, k + 1):
                if a[i] and out[k - i]:
                    s = F.add(s, F.mul(a[i], out[k - i]))
            out[k] = F.neg(F.mul(i0, s))
        return tuple(out)

    def divpi(self, a, v: int):
        """Exact division by w^v; the top v digits become unknown and are zeroed."""
        if v == 0:
            return a
        if self.equal:
            if any(a[:v]):
                raise PrecisionError("divpi of a non-multiple")
            return a[v:] + (0,) * v
        pv = self.p**v
        if a % pv:
            raise PrecisionError("divpi of a non-multiple")
        return a // pv

    def mulpi(self, a, v: int):
        if v == 0:
            return a
        if self.equal:
            return ((0,) * v + a)[: self.N]
        return a * self.p**v % self.modulus

    def truncate(self, a, n: int):
        """a mod w^n (n <= N)."""
        if n >= self.N:
            return a
        if n <= 0:
            return self.zero()
        if self.equal:
            return a[:n] + (0,) * (self.N - n)
        return a % self.p**n

    def digits(self, a, n: int) -> tuple[int, ...]:
        """First n Teichmuller digits of a."""
        if n > self.N:
            raise PrecisionError(f"need {n} digits at precision {self.N}")
        if self.equal:
            return tuple(a[:n])
        out = []
        p = self.p
        x = a
        for _ in range(n):
            d = x % p
            out.append(d)
            x = (x - self._teich[d]) // p
        return tuple(out)

    def residue_to_text(self, c: int) -> str:
        return str(c)

    def to_text(self, a) -> str:
        if not self.equal:
            return str(a)
        terms = []
        for i, c in enumerate(a):
            if c:
                if i == 0:
                    terms.append(str(c))
                elif i == 1:
                    terms.append(f"{c}*w")
                else:
                    terms.append(f"{c}*w^{i}")
        return "+".join(terms) if terms else "0"

    def parse(self, text: str):
        text = text.replace(" ", "")
        if not self.equal:
            return int(text) % self.modulus
        out = [0] * self.N
        if text in ("", "0"):
            return tuple(out)
        for term in text.split("+"):
            if "*" in term:
                c, w = term.split("*")
                k = 1 if w == "w" else int(w.split("^")[1])
            elif term.startswith("w"):
                c, k = "1", (1 if term == "w" else int(term.split("^")[1]))
            else:
                c, k = term, 0
            if k < self.N:
                out[k] = self.residue.add(out[k], int(c) % self.q)
        return tuple(out)


@dataclass(frozen=True)
class LocalScalar:
    """An element of O/w^N tied to its ring context."""

    ring: LocalRing = field(compare=False)
    value: object

    def _check(self, other: "LocalScalar"):
        if self.ring != other.ring:
            raise ConfigError("backend or precision mismatch")

    def __add__(self, other):
        self._check(other)
        return LocalScalar(self.ring, self.ring.add(self.value, other.value))

    def __sub__(self, other):
        self._check(other)
        return LocalScalar(self.ring, self.ring.sub(self.value, other.value))

    def __neg__(self):
        return LocalScalar(self.ring, self.ring.neg(self.value))

    def __mul__(self, other):
        self._check(other)
        return LocalScalar(self.ring, self.ring.mul(self.value, other.value))

    def inv(self) -> "LocalScalar":
        return LocalScalar(self.ring, self.ring.inv(self.value))

    def valuation(self) -> int:
        return self.ring.val(self.value)

    def reduce(self) -> int:
        return self.ring.reduce(self.value)

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.value)

    def __str__(self) -> str:
        return self.ring.to_text(self.value)

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalScalar) and self.ring == other.ring and self.value == other.value

    def __hash__(self) -> int:
        return hash((self.ring.key(), self.value))


def scalar(ring: LocalRing, value) -> LocalScalar:
    if isinstance(value, str):
        return LocalScalar(ring, ring.parse(value))
    if isinstance(value, int):
        return LocalScalar(ring, ring.from_int(value))
    return LocalScalar(ring, value)


def teichmuller(ring: LocalRing, lam: int) -> LocalScalar:
    if not 0 <= lam < ring.q:
        raise ConfigError(f"{lam} is not a residue field element for q={ring.q}")
    return LocalScalar(ring, ring.teich(lam))


def scalar_arith(a: LocalScalar, b: LocalScalar | None, op: str):
    """Dispatch for add, mul, inv, valuation and reduce."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inv()
    if op == "valuation":
        return a.valuation()
    if op == "reduce":
        return a.reduce()
    raise ConfigError(f"unknown scalar op {op!r}")
