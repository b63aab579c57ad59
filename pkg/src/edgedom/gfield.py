"""Arithmetic in GF(p^h).

Elements are plain integers ``0 <= x < q``: the base-``p`` digits of ``x``
are the coefficients of ``x`` in the polynomial basis ``1, t, ..., t^(h-1)``
where ``t`` is a root of the field modulus (digit ``i`` multiplies ``t^i``).
Integer order therefore coincides with lexicographic order of the
coefficient vector read from the highest degree down.

For ``q <= 2**16`` exp/log tables accelerate multiplication; the tables are
generated from the slow polynomial path, so both give identical results.
"""

from __future__ import annotations

from functools import cached_property, lru_cache

import numpy as np
from sympy import factorint, isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p

from .errors import EvenCharacteristic, NonDivisor, NonPrimeCharacteristic, OrderOverflow

MAX_ORDER = 2**32
LOG_TABLE_LIMIT = 2**16


def _smallest_irreducible(p: int, h: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree ``h``.

    Returned low-to-high, leading 1 included.
    """
    for code in range(p**h):
        low = [(code // p**i) % p for i in range(h)]
        if gf_irreducible_p([1] + low[::-1], p, ZZ):
            return tuple(low) + (1,)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FiniteField:
    """The field GF(p^h) with a deterministic modulus and primitive element."""

    def __init__(self, p: int, h: int = 1):
        p, h = int(p), int(h)
        if not isprime(p):
            raise NonPrimeCharacteristic(f"characteristic {p} is not prime")
        if h < 1:
            raise NonPrimeCharacteristic(f"extension degree must be >= 1, got {h}")
        if p**h > MAX_ORDER:
            raise OrderOverflow(f"q = {p}^{h} exceeds 2^32")
        self.p = p
        self.h = h
        self.q = p**h
        self.modulus = _smallest_irreducible(p, h)
        self._powers = [p**i for i in range(h + 1)]
        self._mod_bits = sum(1 << i for i, c in enumerate(self.modulus) if c) if p == 2 else 0
        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        self.omega = self._find_primitive()
        if self.q <= 4096:
            self._build_tables()

    def __repr__(self):
        return f"GF({self.p}^{self.h})" if self.h > 1 else f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.h) == (other.p, other.h)

    def __hash__(self):
        return hash((self.p, self.h))

    def __call__(self, x) -> "FieldElement":
        if isinstance(x, (list, tuple)):
            return FieldElement(self, self.from_coeffs(x))
        return FieldElement(self, int(x) % self.q if self.h == 1 else int(x))

    # ------------------------------------------------------------------
    # coordinates

    def coeffs(self, x: int) -> tuple[int, ...]:
        p = self.p
        return tuple((x // self._powers[i]) % p for i in range(self.h))

    def from_coeffs(self, c) -> int:
        if len(c) != self.h:
            raise ValueError(f"expected {self.h} coefficients, got {len(c)}")
        return sum((int(ci) % self.p) * self._powers[i] for i, ci in enumerate(c))

    @cached_property
    def _omega_basis_inverse(self) -> np.ndarray:
        p, h = self.p, self.h
        cols = []
        w = 1
        for _ in range(h):
            cols.append(self.coeffs(w))
            w = self.mul(w, self.omega)
        basis = np.array(cols, dtype=np.int64).T  # column i = omega^i
        return _inverse_mod_p(basis, p)

    def omega_coords(self, x: int) -> tuple[int, ...]:
        """Coordinates of ``x`` in the basis ``1, omega, ..., omega^(h-1)``."""
        c = np.array(self.coeffs(x), dtype=np.int64)
        return tuple(int(t) for t in (self._omega_basis_inverse @ c) % self.p)

    def from_omega_coords(self, c) -> int:
        x, w = 0, 1
        for ci in c:
            x = self.add(x, self.mul(int(ci) % self.p, w))
            w = self.mul(w, self.omega)
        return x

    # ------------------------------------------------------------------
    # scalar arithmetic

    def add(self, a: int, b: int) -> int:
        p = self.p
        if self.h == 1:
            return (a + b) % p
        if p == 2:
            return a ^ b
        out = 0
        for pi in self._powers[:-1]:
            out += (((a // pi) + (b // pi)) % p) * pi
        return out

    def neg(self, a: int) -> int:
        p = self.p
        if self.h == 1:
            return (-a) % p
        if p == 2:
            return a
        out = 0
        for pi in self._powers[:-1]:
            out += ((-(a // pi)) % p) * pi
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._log is not None:
            return self._exp[self._log[a] + self._log[b]]
        return self._mul_poly(a, b)

    def _mul_poly(self, a: int, b: int) -> int:
        p, h = self.p, self.h
        if h == 1:
            return (a * b) % p
        if p == 2:
            prod = 0
            while b:
                if b & 1:
                    prod ^= a
                a <<= 1
                b >>= 1
            for d in range(prod.bit_length() - 1, h - 1, -1):
                if prod >> d & 1:
                    prod ^= self._mod_bits << (d - h)
            return prod
        da, db = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * h - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        for d in range(2 * h - 2, h - 1, -1):
            c = prod[d] % p
            if c:
                for i in range(h):
                    prod[d - h + i] -= c * self.modulus[i]
            prod[d] = 0
        return sum((prod[i] % p) * self._powers[i] for i in range(h))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        if a == 0:
            return 1 if e == 0 else 0
        if self._log is not None:
            return self._exp[(self._log[a] * e) % (self.q - 1)]
        result = 1
        while e:
            if e & 1:
                result = self._mul_poly(result, a)
            a = self._mul_poly(a, a)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self._log is not None:
            return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def frobenius(self, a: int, d: int = 1) -> int:
        return self.pow(a, self.p**d)

    # ------------------------------------------------------------------
    # multiplicative structure

    @cached_property
    def _group_primes(self) -> tuple[int, ...]:
        return tuple(sorted(factorint(self.q - 1))) if self.q > 2 else ()

    def order(self, a: int) -> int:
        """Multiplicative order of a non-zero element."""
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative order")
        n = self.q - 1
        for ell in self._group_primes:
            while n % ell == 0 and self.pow(a, n // ell) == 1:
                n //= ell
        return n

    def _find_primitive(self) -> int:
        n = self.q - 1
        for a in range(1, self.q):
            if all(self.pow(a, n // ell) != 1 for ell in self._group_primes):
                return a
        raise AssertionError("no primitive element")  # pragma: no cover

    def _build_tables(self):
        n = self.q - 1
        exp = [0] * (2 * n)
        log = [0] * self.q
        x = 1
        for i in range(n):
            exp[i] = exp[i + n] = x
            log[x] = i
            x = self._mul_poly(x, self.omega)
        self._exp, self._log = exp, log
        self._exp_np = np.array(exp + [0], dtype=np.int64)
        self._log_np = np.array(log, dtype=np.int64)

    def ensure_tables(self) -> bool:
        if self._log is None and self.q <= LOG_TABLE_LIMIT:
            self._build_tables()
        return self._log is not None

    def quadratic_character(self, x: int) -> int:
        if self.p == 2:
            raise EvenCharacteristic("quadratic character needs odd q")
        if x == 0:
            return 0
        return 1 if self.pow(x, (self.q - 1) // 2) == 1 else -1

    def root_of_unity(self, m: int) -> int:
        if m < 1 or (self.q - 1) % m:
            raise NonDivisor(f"{m} does not divide q - 1 = {self.q - 1}")
        return self.pow(self.omega, (self.q - 1) // m)

    def subfield(self, d: int) -> tuple[int, ...]:
        """Elements of the subfield GF(p^d), i.e. the fixed points of x -> x^(p^d)."""
        return _subfield(self, d)

    # ------------------------------------------------------------------
    # vectorised arithmetic on integer arrays

    def vadd(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        p = self.p
        if self.h == 1:
            return (a + b) % p
        if p == 2:
            return a ^ b
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for pi in self._powers[:-1]:
            out += (((a // pi) + (b // pi)) % p) * pi
        return out

    def vneg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.h == 1:
            return (-a) % self.p
        if self.p == 2:
            return a.copy()
        out = np.zeros_like(a)
        for pi in self._powers[:-1]:
            out += ((-(a // pi)) % self.p) * pi
        return out

    def vmul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.h == 1:
            return (a * b) % self.p
        if self.ensure_tables():
            zero = (a == 0) | (b == 0)
            idx = self._log_np[a] + self._log_np[b]
            return np.where(zero, 0, self._exp_np[idx])
        return np.frompyfunc(self.mul, 2, 1)(a, b).astype(np.int64)

    def vpow(self, a, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.ensure_tables():
            n = self.q - 1
            out = self._exp_np[(self._log_np[a] * (e % n)) % n]
            return np.where(a == 0, 1 if e == 0 else 0, out)
        return np.frompyfunc(lambda x: self.pow(x, e), 1, 1)(a).astype(np.int64)


@lru_cache(maxsize=None)
def _subfield(F: FiniteField, d: int) -> tuple[int, ...]:
    if d < 1 or F.h % d:
        raise NonDivisor(f"subfield degree {d} does not divide {F.h}")
    m = F.p**d - 1
    g = F.pow(F.omega, (F.q - 1) // m)
    elems = {0}
    x = 1
    for _ in range(m):
        elems.add(x)
        x = F.mul(x, g)
    return tuple(sorted(elems))


@lru_cache(maxsize=None)
def field_create(p: int, h: int = 1) -> FiniteField:
    """Cached constructor; fields are immutable so sharing is safe."""
    return FiniteField(p, h)


def field_of_order(q: int) -> FiniteField:
    f = factorint(q)
    if len(f) != 1:
        raise NonPrimeCharacteristic(f"{q} is not a prime power")
    (p, h), = f.items()
    return field_create(p, h)


def quadratic_character(F: FiniteField, x) -> int:
    return F.quadratic_character(int(x))


def root_of_unity(F: FiniteField, m: int) -> int:
    return F.root_of_unity(m)


def _inverse_mod_p(m: np.ndarray, p: int) -> np.ndarray:
    n = m.shape[0]
    a = np.concatenate([m % p, np.eye(n, dtype=np.int64)], axis=1)
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r, col] % p)
        a[[col, piv]] = a[[piv, col]]
        a[col] = (a[col] * pow(int(a[col, col]), -1, p)) % p
        for r in range(n):
            if r != col and a[r, col]:
                a[r] = (a[r] - a[r, col] * a[col]) % p
    return a[:, n:]


class FieldElement:
    """Operator-friendly wrapper around an integer-encoded field element."""

    __slots__ = ("field", "value")

    def __init__(self, field: FiniteField, value: int):
        self.field = field
        self.value = value

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.coeffs(self.value)

    def _wrap(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other.value
        return self.field(other).value

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._wrap(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._wrap(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._wrap(other), self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._wrap(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.value, self._wrap(other)))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.h, self.value))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.field!r}({self.value})"
