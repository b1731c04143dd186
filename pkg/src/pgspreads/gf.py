"""Exact arithmetic in small Galois fields GF(q) via precomputed tables.

Every prime and prime-square order up to 9 is supported, which covers the
orders 2, 3, 4, 5, 7 used by the geometry layers. Elements are encoded as
integers 0..q-1. For an extension field GF(p^2) the base-p digits of the
encoding are the polynomial coefficients (least significant digit is the
constant term), so e.g. in GF(4) the element 2 stands for x and 3 for x+1.
"""

from __future__ import annotations

import numpy as np

SUPPORTED_ORDERS = (2, 3, 4, 5, 7, 9)

# Fixed monic moduli for the extension fields, coefficients by ascending
# degree including the leading 1: GF(4) uses x^2+x+1 (the only irreducible
# quadratic over GF(2)), GF(9) uses x^2+1.
MODULI = {4: (1, 1, 1), 9: (1, 0, 1)}


class FieldError(ValueError):
    """Unsupported field order or out-of-domain operand."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


class Field:
    """Arithmetic tables for GF(q).

    Immutable after construction; safe to share between any number of
    readers. Scalar methods validate their operands, the vectorized
    ``v*`` methods are unchecked table lookups meant for hot paths.
    """

    def __init__(self, q: int):
        if q not in SUPPORTED_ORDERS:
            raise FieldError(
                f"unsupported field order {q}: expected a prime or prime square <= 9"
            )
        self.q = q
        if _is_prime(q):
            self.p, self.h = q, 1
            self.modulus = None
        else:
            self.p, self.h = int(round(q**0.5)), 2
            self.modulus = MODULI[q]
        self._build_tables()

    def _build_tables(self) -> None:
        q, p = self.q, self.p
        add = np.zeros((q, q), dtype=np.uint8)
        mul = np.zeros((q, q), dtype=np.uint8)
        for a in range(q):
            for b in range(q):
                if self.h == 1:
                    add[a, b] = (a + b) % q
                    mul[a, b] = (a * b) % q
                else:
                    a0, a1 = a % p, a // p
                    b0, b1 = b % p, b // p
                    add[a, b] = ((a0 + b0) % p) + p * ((a1 + b1) % p)
                    # (a1 x + a0)(b1 x + b0) reduced by x^2 = -(m1 x + m0)
                    m0, m1 = self.modulus[0], self.modulus[1]
                    c2 = a1 * b1
                    c1 = (a1 * b0 + a0 * b1 - c2 * m1) % p
                    c0 = (a0 * b0 - c2 * m0) % p
                    mul[a, b] = c0 + p * c1
        neg = np.zeros(q, dtype=np.uint8)
        inv = np.zeros(q, dtype=np.uint8)
        for a in range(q):
            neg[a] = int(np.flatnonzero(add[a] == 0)[0])
            if a:
                inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
        sub = add[:, neg]
        for t in (add, mul, neg, inv, sub):
            t.setflags(write=False)
        self.add_table = add
        self.mul_table = mul
        self.neg_table = neg
        self.inv_table = inv
        self.sub_table = sub

    def _check(self, *elems: int) -> None:
        for a in elems:
            if not 0 <= a < self.q:
                raise FieldError(f"element {a} out of range for GF({self.q})")

    def add(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.sub_table[a, b])

    def mul(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.mul_table[a, b])

    def neg(self, a: int) -> int:
        self._check(a)
        return int(self.neg_table[a])

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise FieldError(f"0 has no multiplicative inverse in GF({self.q})")
        return int(self.inv_table[a])

    def pow(self, a: int, e: int) -> int:
        self._check(a)
        if e < 0:
            raise FieldError("negative exponent")
        out = 1
        for _ in range(e):
            out = int(self.mul_table[out, a])
        return out

    # Unchecked vectorized variants; operands broadcast like numpy arrays.
    def vadd(self, a, b):
        return self.add_table[a, b]

    def vsub(self, a, b):
        return self.sub_table[a, b]

    def vmul(self, a, b):
        return self.mul_table[a, b]

    def vneg(self, a):
        return self.neg_table[a]

    def vinv(self, a):
        return self.inv_table[a]

    def __repr__(self) -> str:
        return f"Field(q={self.q})"


def field_make(q: int) -> Field:
    """Build the arithmetic tables for GF(q)."""
    return Field(q)


def field_arith(field: Field, op: str, a: int, b: int | None = None) -> int:
    """Single dispatch over the four scalar operations.

    ``op`` is one of add, mul, neg, inv; the last two ignore ``b``.
    """
    if op == "add":
        if b is None:
            raise FieldError("add needs two operands")
        return field.add(a, b)
    if op == "mul":
        if b is None:
            raise FieldError("mul needs two operands")
        return field.mul(a, b)
    if op == "neg":
        return field.neg(a)
    if op == "inv":
        return field.inv(a)
    raise FieldError(f"unknown operation {op!r}")
