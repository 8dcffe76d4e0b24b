"""Arithmetic in GF(q), q = p^k an odd prime power.

Elements are polynomials over GF(p) reduced modulo a fixed irreducible
polynomial of degree k.  Internally every element is identified with an
integer *code* in ``range(q)``: the rank of its coefficient vector
(c_0, c_1, ..., c_{k-1}) in lexicographic order, so code 0 is the zero
element and, for prime fields, the code is the residue itself.

The bulk geometry routines work directly on codes through the lookup
tables ``add_table``, ``mul_table``, ``neg_table`` and ``inv_table``;
:class:`FieldElement` is the user-facing wrapper.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Sequence

import numpy as np

# Little-endian coefficient lists, leading coefficient last.
DEFAULT_MODULI = {
    9: (1, 0, 1),          # x^2 + 1
    25: (3, 0, 1),         # x^2 - 2
    49: (1, 0, 1),         # x^2 + 1
    81: (2, 1, 0, 0, 1),   # x^4 + x + 2
    121: (1, 0, 1),        # x^2 + 1
    169: (11, 0, 1),       # x^2 - 2
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, k) with q = p**k, or raise ValueError."""
    for p in range(2, q + 1):
        if q % p == 0:
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            if r != 1 or not is_prime(p):
                break
            return p, k
    raise ValueError(f"{q} is not a prime power")


def _poly_mod(a: list[int], m: Sequence[int], p: int) -> list[int]:
    # m is monic
    a = list(a)
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return a[:dm] + [0] * (dm - len(a[:dm]))


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..k//2."""
    k = len(modulus) - 1
    if k < 1 or modulus[-1] % p != 1:
        return False
    for d in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            divisor = list(low) + [1]
            if not any(_poly_mod(list(modulus), divisor, p)[:d]):
                return False
    return True


class FieldError(ValueError):
    pass


class GF:
    """The field GF(p^k).

    >>> F = GF(5)
    >>> F(3) + F(4)
    GF(5)(2)
    """

    def __init__(self, p: int, k: int = 1, modulus: Sequence[int] | None = None):
        if not is_prime(p) or p == 2:
            raise FieldError(f"characteristic must be an odd prime, got {p}")
        if k < 1:
            raise FieldError(f"extension degree must be >= 1, got {k}")
        self.p = p
        self.k = k
        self.q = p**k
        if k == 1:
            modulus = (0, 1)
        elif modulus is None:
            if self.q not in DEFAULT_MODULI:
                raise FieldError(
                    f"no built-in modulus for q={self.q}; pass one explicitly"
                )
            modulus = DEFAULT_MODULI[self.q]
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1:
            raise FieldError(f"modulus must have degree {k}")
        if k > 1 and not is_irreducible(modulus, p):
            raise FieldError(f"modulus {modulus} is reducible over GF({p})")
        self.modulus = modulus
        self._build_tables()
        # the fixed non-square s: first non-square in element order
        self.nonsquare = next(e for e in self if not e.is_square())
        if self.nonsquare ** ((self.q - 1) // 2) != -self.one:
            raise FieldError("Euler criterion failed; modulus is not irreducible")

    @classmethod
    def of_order(cls, q: int, modulus: Sequence[int] | None = None) -> "GF":
        p, k = factor_prime_power(q)
        return cls(p, k, modulus)

    # -- codes <-> coefficient vectors ----------------------------------------

    def coeffs(self, code: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.k):
            code, c = divmod(code, self.p)
            out.append(c)
        return tuple(reversed(out))

    def code(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.k:
            raise ValueError(f"too many coefficients for GF({self.q})")
        coeffs = list(coeffs) + [0] * (self.k - len(coeffs))
        code = 0
        for c in coeffs:
            code = code * self.p + int(c) % self.p
        return code

    def _build_tables(self) -> None:
        p, k, q = self.p, self.k, self.q
        vecs = [self.coeffs(c) for c in range(q)]
        codes = {v: i for i, v in enumerate(vecs)}
        add = np.empty((q, q), dtype=np.int64)
        mul = np.empty((q, q), dtype=np.int64)
        for i, a in enumerate(vecs):
            for j in range(i, q):
                b = vecs[j]
                s = codes[tuple((x + y) % p for x, y in zip(a, b))]
                prod = [0] * (2 * k - 1)
                for u, x in enumerate(a):
                    if x:
                        for v, y in enumerate(b):
                            prod[u + v] += x * y
                m = codes[tuple(_poly_mod([c % p for c in prod], self.modulus, p))]
                add[i, j] = add[j, i] = s
                mul[i, j] = mul[j, i] = m
        self.add_table = add
        self.mul_table = mul
        self.neg_table = np.argmin(add, axis=1).astype(np.int64)
        self.sub_table = add[:, self.neg_table]
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = self._pow_code(a, q - 2)
        self.inv_table = inv
        for t in (add, mul, self.neg_table, self.sub_table, inv):
            t.setflags(write=False)

    def _pow_code(self, a: int, n: int) -> int:
        result, base = self.one_code, a
        while n:
            if n & 1:
                result = int(self.mul_table[result, base])
            base = int(self.mul_table[base, base])
            n >>= 1
        return result

    @cached_property
    def square_table(self) -> np.ndarray:
        """is_square by code, computed by exponentiation once per element."""
        e = (self.q - 1) // 2
        one = self.one_code
        t = np.array([a == 0 or self._pow_code(a, e) == one for a in range(self.q)])
        t.setflags(write=False)
        return t

    @cached_property
    def sqrt_table(self) -> np.ndarray:
        """Canonical square root by code, -1 where none exists."""
        t = np.full(self.q, -1, dtype=np.int64)
        for r in range(self.q - 1, -1, -1):
            t[self.mul_table[r, r]] = r
        t.setflags(write=False)
        return t

    # -- element-level API ----------------------------------------------------

    def __call__(self, value: "int | Sequence[int] | FieldElement") -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, (int, np.integer)):
            # integers embed through the prime subfield
            return FieldElement(self, self.code([int(value) % self.p] + [0] * (self.k - 1))
                                if self.k > 1 else int(value) % self.p)
        return FieldElement(self, self.code(value))

    def from_code(self, code: int) -> "FieldElement":
        if not 0 <= code < self.q:
            raise ValueError(f"code {code} out of range for GF({self.q})")
        return FieldElement(self, int(code))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, self.code([1]))

    @cached_property
    def one_code(self) -> int:
        return self.code([1])

    def __iter__(self):
        return (FieldElement(self, c) for c in range(self.q))

    def enumerate(self) -> list["FieldElement"]:
        return list(self)

    def __len__(self) -> int:
        return self.q

    def primitive_element(self) -> "FieldElement":
        """First element, in the fixed order, of multiplicative order q - 1."""
        n = self.q - 1
        primes = [r for r in range(2, n + 1) if n % r == 0 and is_prime(r)]
        for e in self:
            if e.code and all(e ** (n // r) != self.one for r in primes):
                return e
        raise FieldError("no primitive element")  # unreachable for a field

    def is_square(self, a: "FieldElement") -> bool:
        return self(a).is_square()

    def sqrt(self, a: "FieldElement") -> "FieldElement | None":
        return self(a).sqrt()

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and (self.p, self.k, self.modulus) == (
            other.p, other.k, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))

    def __repr__(self) -> str:
        if self.k == 1:
            return f"GF({self.q})"
        return f"GF({self.q}, modulus={list(self.modulus)})"

    # -- vectorised helpers over code arrays ------------------------------------

    def dot(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Row-wise bilinear sum over the last axis of two code arrays."""
        a, b = np.broadcast_arrays(a, b)
        prods = self.mul_table[a, b]
        acc = prods[..., 0]
        for j in range(1, prods.shape[-1]):
            acc = self.add_table[acc, prods[..., j]]
        return acc


class FieldElement:
    """Immutable element of a :class:`GF`."""

    __slots__ = ("field", "code")

    def __init__(self, field: GF, code: int):
        self.field = field
        self.code = code

    @property
    def coeffs(self) -> tuple[int, ...]:
        """Little-endian coefficient vector."""
        return self.field.coeffs(self.code)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("mixed fields")
            return other.code
        if isinstance(other, (int, np.integer)):
            return self.field(int(other)).code
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, int(self.field.add_table[self.code, b]))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, int(self.field.sub_table[self.code, b]))

    def __rsub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, int(self.field.sub_table[b, self.code]))

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, int(self.field.mul_table[self.code, b]))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field, int(self.field.neg_table[self.code]))

    def inv(self) -> "FieldElement":
        if self.code == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self.field))
        return FieldElement(self.field, int(self.field.inv_table[self.code]))

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return self * FieldElement(self.field, b).inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        return FieldElement(self.field, self.field._pow_code(self.code, n))

    def is_square(self) -> bool:
        """True for 0 and for the nonzero squares (Euler's criterion)."""
        if self.code == 0:
            return True
        return self ** ((self.field.q - 1) // 2) == self.field.one

    def sqrt(self) -> "FieldElement | None":
        r = int(self.field.sqrt_table[self.code])
        return None if r < 0 else FieldElement(self.field, r)

    def __bool__(self) -> bool:
        return self.code != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.code == other.code
        if isinstance(other, (int, np.integer)):
            return self.code == self.field(int(other)).code
        return NotImplemented

    def __lt__(self, other: "FieldElement") -> bool:
        return self.code < other.code

    def __hash__(self) -> int:
        return hash((self.field.q, self.code))

    def __int__(self) -> int:
        return self.code

    def __repr__(self) -> str:
        if self.field.k == 1:
            return f"{self.field!r}({self.code})"
        return f"{self.field!r}({list(self.coeffs)})"
