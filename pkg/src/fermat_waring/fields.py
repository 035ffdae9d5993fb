"""Scalar fields used by the linear algebra kernel.

Elements are plain Python values: ``Fraction`` over Q, ``int`` in ``[0, p)``
over F_p and ``complex`` for the approximate field.  A field object owns the
arithmetic and validates membership, so a matrix never mixes fields.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from typing import Any

import numpy as np

CURATED_PRIMES = (2, 3, 5, 7, 11, 101, 1009, 10007)


class FieldMismatchError(TypeError):
    """Raised when values or matrices from different fields are combined."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 3_317_044_064_679_887_385_961_981."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """Common interface; subclasses implement the arithmetic."""

    exact = True

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def __call__(self, x):
        return self.coerce(x)

    def coerce(self, x):
        raise NotImplementedError

    def check(self, x) -> None:
        raise NotImplementedError

    def add(self, x, y):
        return self.coerce(x + y)

    def sub(self, x, y):
        return self.coerce(x - y)

    def mul(self, x, y):
        return self.coerce(x * y)

    def neg(self, x):
        return self.coerce(-x)

    def inv(self, x):
        raise NotImplementedError

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def power(self, x, e: int):
        return self.coerce(x**e)

    def is_zero(self, x, scale: float = 1.0) -> bool:
        return x == 0

    def random(self, rng: np.random.Generator, nonzero: bool = False):
        raise NotImplementedError

    def descriptor(self) -> str:
        raise NotImplementedError


class RationalField(Field):
    """The field Q with exact ``Fraction`` arithmetic."""

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            return Fraction(int(x))
        raise FieldMismatchError(f"{x!r} is not a rational number")

    def check(self, x) -> None:
        if not isinstance(x, Fraction):
            raise FieldMismatchError(f"{x!r} is not an element of Q")

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / x

    def random(self, rng, nonzero=False, height: int = 100):
        while True:
            v = Fraction(int(rng.integers(-height, height + 1)))
            if not (nonzero and v == 0):
                return v

    def descriptor(self) -> str:
        return "q"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "QQ"


class PrimeField(Field):
    """The prime field F_p; elements are ints reduced into ``[0, p)``."""

    def __init__(self, p: int):
        p = int(p)
        if p >= 2**32:
            raise ValueError(f"modulus {p} exceeds the supported range (< 2^32)")
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def zero(self):
        return 0

    def one(self):
        return 1

    def coerce(self, x):
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            return int(x) % self.p
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        raise FieldMismatchError(f"{x!r} cannot be coerced into F_{self.p}")

    def check(self, x) -> None:
        if not (isinstance(x, int) and not isinstance(x, bool) and 0 <= x < self.p):
            raise FieldMismatchError(f"{x!r} is not a reduced element of F_{self.p}")

    def add(self, x, y):
        return (x + y) % self.p

    def sub(self, x, y):
        return (x - y) % self.p

    def mul(self, x, y):
        return x * y % self.p

    def neg(self, x):
        return -x % self.p

    def inv(self, x):
        if x % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def power(self, x, e: int):
        return pow(x, e, self.p)

    def random(self, rng, nonzero=False):
        lo = 1 if nonzero else 0
        return int(rng.integers(lo, self.p))

    def descriptor(self) -> str:
        return f"p{self.p}"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return f"GF({self.p})"


class ComplexField(Field):
    """Complex doubles with a relative zero threshold.

    ``is_zero(x, scale)`` treats ``|x| <= tol * scale`` as zero; elimination
    passes the largest absolute entry of the matrix as ``scale``.
    """

    exact = False

    def __init__(self, tol: float = 1e-9):
        self.tol = float(tol)

    def zero(self):
        return 0j

    def one(self):
        return 1 + 0j

    def coerce(self, x):
        if isinstance(x, (int, float, complex, np.number, Fraction)) and not isinstance(x, bool):
            return complex(x)
        raise FieldMismatchError(f"{x!r} is not a complex number")

    def check(self, x) -> None:
        if not isinstance(x, complex):
            raise FieldMismatchError(f"{x!r} is not an element of C")

    def inv(self, x):
        return 1 / x

    def is_zero(self, x, scale: float = 1.0) -> bool:
        return abs(x) <= self.tol * max(scale, 1e-300)

    def random(self, rng, nonzero=False):
        r = float(rng.uniform(0.5, 2.0))
        return cmath.rect(r, float(rng.uniform(-np.pi, np.pi)))

    def descriptor(self) -> str:
        return "c"

    def __eq__(self, other):
        return isinstance(other, ComplexField) and other.tol == self.tol

    def __hash__(self):
        return hash(("C", self.tol))

    def __repr__(self):
        return f"CC(tol={self.tol:g})"


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def parse_field(text: str) -> Field:
    """Parse a field descriptor: ``q`` for Q, ``pNNN`` for F_NNN, ``c`` for complex."""
    t = text.strip().lower()
    if t in ("q", "qq", "rational"):
        return QQ
    if t in ("c", "cc", "complex"):
        return ComplexField()
    if t.startswith("p") and t[1:].isdigit():
        return PrimeField(int(t[1:]))
    if t.isdigit():
        return PrimeField(int(t))
    raise ValueError(f"unknown field descriptor {text!r} (expected 'q', 'c' or 'pPRIME')")


def same_field(a: Any, b: Any) -> None:
    if a != b:
        raise FieldMismatchError(f"field mismatch: {a!r} vs {b!r}")
