"""Exact linear algebra over Q, F_p and (approximately) C.

Rank and echelon forms over Q go through fraction-free Bareiss elimination
on integer-scaled rows; over F_p through plain Gauss-Jordan; over C through
partially pivoted elimination with a relative zero threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .fields import ComplexField, Field, FieldMismatchError, PrimeField, RationalField, same_field


@dataclass(frozen=True)
class Matrix:
    """Dense row-major matrix over a single field."""

    field: Field
    rows: int
    cols: int
    entries: tuple  # tuple of row tuples

    @classmethod
    def from_rows(cls, field: Field, rows: Iterable[Sequence], cols: int | None = None, coerce: bool = True):
        data = []
        for row in rows:
            if coerce:
                data.append(tuple(field.coerce(x) for x in row))
            else:
                for x in row:
                    field.check(x)
                data.append(tuple(row))
        if cols is None:
            if not data:
                raise ValueError("cannot infer column count of an empty matrix")
            cols = len(data[0])
        for r in data:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(field, len(data), cols, tuple(data))

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int):
        z = field.zero()
        return cls(field, rows, cols, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, field: Field, n: int):
        z, o = field.zero(), field.one()
        return cls(field, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else ())

    def __matmul__(self, other: "Matrix") -> "Matrix":
        same_field(self.field, other.field)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        F = self.field
        cols = list(zip(*other.entries)) if other.rows else [() for _ in range(other.cols)]
        out = []
        for row in self.entries:
            out.append(tuple(_dot(F, row, col) for col in cols))
        return Matrix(F, self.rows, other.cols, tuple(out))

    def stack(self, other: "Matrix") -> "Matrix":
        same_field(self.field, other.field)
        if self.cols != other.cols:
            raise ValueError("column mismatch in stack")
        return Matrix(self.field, self.rows + other.rows, self.cols, self.entries + other.entries)

    def tolist(self) -> list[list]:
        return [list(r) for r in self.entries]


def _dot(F: Field, u, v):
    acc = F.zero()
    for x, y in zip(u, v):
        acc = F.add(acc, F.mul(x, y))
    return acc


def _check_same_field(A: Matrix) -> None:
    for row in A.entries:
        for x in row:
            A.field.check(x)


# ---------------------------------------------------------------- elimination

def _integer_rows(rows) -> list[list[int]]:
    out = []
    for row in rows:
        den = 1
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def _bareiss_echelon(M: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form; returns (nonzero echelon rows, pivot columns)."""
    M = [r[:] for r in M]
    nrows = len(M)
    ncols = len(M[0]) if M else 0
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pr = M[r]
        for i in range(r + 1, nrows):
            row = M[i]
            f = row[c]
            for j in range(c + 1, ncols):
                # exact division is the Bareiss guarantee
                row[j] = (pr[c] * row[j] - f * pr[j]) // prev
            row[c] = 0
        # entries left of the pivot in rows below are already zero
        prev = pr[c]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def _rref_rational(rows) -> tuple[list[list[Fraction]], list[int]]:
    ech, pivots = _bareiss_echelon(_integer_rows(rows))
    R = [[Fraction(x) for x in row] for row in ech]
    for i, c in enumerate(pivots):
        lead = R[i][c]
        R[i] = [x / lead for x in R[i]]
    for i in range(len(pivots) - 1, -1, -1):
        c = pivots[i]
        for k in range(i):
            f = R[k][c]
            if f:
                R[k] = [x - f * y for x, y in zip(R[k], R[i])]
    return R, pivots


def _rref_mod_p(rows, p: int) -> tuple[list[list[int]], list[int]]:
    R = [list(r) for r in rows]
    nrows = len(R)
    ncols = len(R[0]) if R else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if R[i][c] % p), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = pow(R[r][c], -1, p)
        R[r] = [x * inv % p for x in R[r]]
        pr = R[r]
        for i in range(nrows):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [(x - f * y) % p for x, y in zip(R[i], pr)]
        pivots.append(c)
        r += 1
    return R[:r], pivots


def _rref_complex(rows, tol: float) -> tuple[list[list[complex]], list[int]]:
    R = [list(r) for r in rows]
    nrows = len(R)
    ncols = len(R[0]) if R else 0
    scale = max((abs(x) for row in R for x in row), default=0.0)
    thresh = tol * scale
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = max(range(r, nrows), key=lambda i: abs(R[i][c]))
        if abs(R[piv][c]) <= thresh:
            continue
        R[r], R[piv] = R[piv], R[r]
        lead = R[r][c]
        R[r] = [x / lead for x in R[r]]
        pr = R[r]
        for i in range(nrows):
            if i != r:
                f = R[i][c]
                if f != 0:
                    R[i] = [x - f * y for x, y in zip(R[i], pr)]
        for i in range(r + 1, nrows):
            R[i][c] = 0j
        pivots.append(c)
        r += 1
    return R[:r], pivots


def rref(A: Matrix) -> tuple[list[list], list[int]]:
    """Reduced row echelon form: (nonzero rows, pivot columns)."""
    F = A.field
    if A.rows == 0 or A.cols == 0:
        return [], []
    if isinstance(F, RationalField):
        return _rref_rational(A.entries)
    if isinstance(F, PrimeField):
        return _rref_mod_p(A.entries, F.p)
    if isinstance(F, ComplexField):
        return _rref_complex(A.entries, F.tol)
    raise FieldMismatchError(f"unsupported field {F!r}")


def rank(A: Matrix) -> int:
    """Rank of ``A``; raises ``FieldMismatchError`` on entries outside ``A.field``."""
    _check_same_field(A)
    if A.rows == 0 or A.cols == 0:
        return 0
    if isinstance(A.field, RationalField):
        return len(_bareiss_echelon(_integer_rows(A.entries))[1])
    return len(rref(A)[1])


# ------------------------------------------------------------------ subspaces

@dataclass(frozen=True)
class Subspace:
    """Row space of ``basis``, kept in reduced echelon form (canonical)."""

    field: Field
    ambient_dim: int
    basis: Matrix

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.dim

    @classmethod
    def span(cls, field: Field, ambient_dim: int, vectors: Iterable[Sequence]) -> "Subspace":
        vecs = [tuple(field.coerce(x) for x in v) for v in vectors]
        for v in vecs:
            if len(v) != ambient_dim:
                raise ValueError(f"vector of length {len(v)} in ambient dimension {ambient_dim}")
        if not vecs:
            return cls.zero(field, ambient_dim)
        R, _ = rref(Matrix(field, len(vecs), ambient_dim, tuple(vecs)))
        return cls(field, ambient_dim, Matrix(field, len(R), ambient_dim, tuple(tuple(r) for r in R)))

    @classmethod
    def row_space(cls, A: Matrix) -> "Subspace":
        return cls.span(A.field, A.cols, A.entries)

    @classmethod
    def zero(cls, field: Field, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, Matrix(field, 0, ambient_dim, ()))

    @classmethod
    def full(cls, field: Field, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, Matrix.identity(field, ambient_dim))

    @classmethod
    def coordinate(cls, field: Field, ambient_dim: int, indices: Iterable[int]) -> "Subspace":
        """Span of the coordinate vectors e_i (0-based indices)."""
        z, o = field.zero(), field.one()
        vecs = [tuple(o if j == i else z for j in range(ambient_dim)) for i in sorted(set(indices))]
        return cls.span(field, ambient_dim, vecs)

    def vectors(self) -> list[tuple]:
        return list(self.basis.entries)

    def contains(self, v: Sequence) -> bool:
        v = tuple(self.field.coerce(x) for x in v)
        M = Matrix(self.field, self.dim + 1, self.ambient_dim, self.basis.entries + (v,))
        return rank(M) == self.dim


def _check_compatible(U: Subspace, W: Subspace) -> None:
    same_field(U.field, W.field)
    if U.ambient_dim != W.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {U.ambient_dim} vs {W.ambient_dim}")


def kernel(A: Matrix) -> Subspace:
    """Right kernel ``{v : A v = 0}`` as a subspace of F^cols."""
    _check_same_field(A)
    F = A.field
    R, pivots = rref(A)
    pivset = set(pivots)
    vecs = []
    for f in range(A.cols):
        if f in pivset:
            continue
        v = [F.zero()] * A.cols
        v[f] = F.one()
        for i, c in enumerate(pivots):
            v[c] = F.neg(R[i][f])
        vecs.append(v)
    return Subspace.span(F, A.cols, vecs)


def subspace_sum(U: Subspace, W: Subspace) -> Subspace:
    _check_compatible(U, W)
    return Subspace.span(U.field, U.ambient_dim, U.vectors() + W.vectors())


def intersect(U: Subspace, W: Subspace) -> Subspace:
    """``U ∩ W`` via the left kernel of the stacked bases."""
    _check_compatible(U, W)
    F = U.field
    if U.dim == 0 or W.dim == 0:
        return Subspace.zero(F, U.ambient_dim)
    stacked = U.basis.stack(W.basis)
    # x U + y W = 0  =>  x U lies in both
    left = kernel(stacked.T)
    vecs = []
    for coeffs in left.vectors():
        x = coeffs[: U.dim]
        vecs.append([_dot(F, x, col) for col in zip(*U.basis.entries)])
    return Subspace.span(F, U.ambient_dim, vecs)


def Q_subspace(field: Field, m: int, b: int) -> Subspace:
    """``Q_{m,b} = 0_b x F^{m-b}``: the span of the last ``m - b`` coordinate vectors."""
    if not 0 <= b <= m:
        raise ValueError(f"need 0 <= b <= m, got b={b}, m={m}")
    return Subspace.coordinate(field, m, range(b, m))


# ------------------------------------------------------- batched F_p kernels

def batch_rank_mod_p(A: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of matrices ``A[N, r, c]`` over F_p, vectorised over N."""
    A = np.array(A, dtype=np.int64) % p
    N, nr, nc = A.shape
    ranks = np.zeros(N, dtype=np.int64)
    if nr == 0 or nc == 0:
        return ranks
    used = np.zeros((N, nr), dtype=bool)
    idx = np.arange(N)
    for c in range(nc):
        cand = (A[:, :, c] != 0) & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = cand.argmax(axis=1)
        sel = idx[has]
        prow = A[sel, piv[has]]  # (S, nc)
        inv = _inv_mod_p(prow[:, c], p)
        prow = prow * inv[:, None] % p
        factors = A[sel, :, c]  # (S, nr)
        A[sel] = (A[sel] - factors[:, :, None] * prow[:, None, :]) % p
        A[sel, piv[has]] = prow
        used[sel, piv[has]] = True
        ranks[sel] += 1
    return ranks


def _inv_mod_p(x: np.ndarray, p: int) -> np.ndarray:
    # Fermat inverse by square-and-multiply; products stay below p^2 < 2^63
    result = np.ones_like(x)
    base = x % p
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result
