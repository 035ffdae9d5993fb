"""Fermat-Waring hypersurfaces ``sum_j h_j(z)^d = 0`` in P^n.

The hypersurface is also the section of the Fermat hypersurface in P^{m-1}
by the (n+1)-dimensional subspace ``V = {(h_1(z), ..., h_m(z))}``.
"""

from __future__ import annotations

import itertools
import json
import math
import operator
import warnings
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .fields import QQ, Field, PrimeField, RationalField, parse_field
from .linalg import Matrix, Subspace, rank
from .partitions import degree_for

MONOMIAL_CAP = 10**6
MAX_ATTEMPTS = 1000
DEFAULT_HEIGHT = 100


@dataclass(frozen=True)
class LinearForm:
    """``h(z) = sum_i coeffs[i] * z_i`` over ``field``."""

    field: Field
    coeffs: tuple

    def __post_init__(self):
        if all(self.field.is_zero(c) for c in self.coeffs):
            raise ValueError("a linear form must not vanish identically")

    def __call__(self, z: Sequence):
        F = self.field
        acc = F.zero()
        for c, x in zip(self.coeffs, z):
            acc = F.add(acc, F.mul(c, x))
        return acc


@dataclass(frozen=True)
class HypersurfaceSpec:
    n: int
    m: int
    d: int
    theorem: int | None
    forms: tuple[LinearForm, ...]
    seed: int | None
    field: Field
    height: int = DEFAULT_HEIGHT
    overridden: bool = False

    def coefficient_matrix(self) -> Matrix:
        """The m x (n+1) matrix whose rows are the forms."""
        return Matrix(self.field, self.m, self.n + 1, tuple(f.coeffs for f in self.forms))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "d": self.d,
            "theorem": self.theorem,
            "seed": self.seed,
            "height": self.height,
            "field": self.field.descriptor(),
            "overridden": self.overridden,
            "forms": [[_coef_str(c) for c in f.coeffs] for f in self.forms],
        }


def _coef_str(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return str(int(c))


def _all_subsets_independent(field: Field, rows: list[tuple], size: int) -> bool:
    for idx in itertools.combinations(range(len(rows)), size):
        if rank(Matrix(field, size, len(rows[0]), tuple(rows[i] for i in idx))) < size:
            return False
    return True


def build_hypersurface(
    n: int,
    theorem: int,
    seed: int,
    field: Field | str = QQ,
    height: int = DEFAULT_HEIGHT,
    d: int | None = None,
) -> HypersurfaceSpec:
    """Draw m integer forms with coefficients in [-height, height], any n+1 independent.

    ``d`` defaults to the minimal degree allowed by the theorem; a different
    value is accepted and flagged as an override.
    """
    if isinstance(field, str):
        field = parse_field(field)
    m, d_min = degree_for(n, theorem)
    overridden = d is not None and d != d_min
    d = d_min if d is None else int(d)
    if d < 1:
        raise ValueError(f"degree must be positive, got {d}")
    if isinstance(field, PrimeField) and field.p <= d:
        raise ValueError(f"over F_p the construction needs p > d; got p={field.p}, d={d}")
    if not isinstance(field, (RationalField, PrimeField)):
        raise ValueError("hypersurfaces are built over Q or F_p")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_ATTEMPTS):
        raw = rng.integers(-height, height + 1, size=(m, n + 1))
        rows = [tuple(field.coerce(int(x)) for x in row) for row in raw]
        if _all_subsets_independent(field, rows, n + 1):
            forms = tuple(LinearForm(field, r) for r in rows)
            return HypersurfaceSpec(n, m, d, theorem, forms, seed, field, height, overridden)
    raise RuntimeError(
        f"no generic choice of forms after {MAX_ATTEMPTS} attempts "
        f"(field {field!r}, height {height}); try a larger field or height"
    )


def fermat_spec(n: int, d: int, field: Field = QQ) -> HypersurfaceSpec:
    """The Fermat hypersurface itself: forms z_0, ..., z_n (m = n + 1)."""
    rows = Matrix.identity(field, n + 1).entries
    forms = tuple(LinearForm(field, r) for r in rows)
    return HypersurfaceSpec(n, n + 1, d, None, forms, None, field, 1, True)


# ------------------------------------------------------- sparse polynomials

@dataclass(frozen=True)
class SparsePolynomial:
    """Homogeneous polynomial as ``{exponent vector: nonzero coefficient}``."""

    field: Field
    nvars: int
    degree: int
    terms: dict

    def __post_init__(self):
        for e, c in self.terms.items():
            if len(e) != self.nvars or sum(e) != self.degree:
                raise ValueError(f"term {e} is not of degree {self.degree} in {self.nvars} variables")
            if self.field.is_zero(c):
                raise ValueError("zero coefficients must not be stored")

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, SparsePolynomial)
            and self.field == other.field
            and self.nvars == other.nvars
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def sorted_terms(self) -> list[tuple[tuple[int, ...], object]]:
        return sorted(self.terms.items())

    def to_dict(self) -> dict:
        return {
            "nvars": self.nvars,
            "degree": self.degree,
            "terms": [{"exps": list(e), "coef": _coef_str(c)} for e, c in self.sorted_terms()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict, field: Field = QQ) -> "SparsePolynomial":
        terms = {}
        for t in data["terms"]:
            terms[tuple(t["exps"])] = field.coerce(Fraction(t["coef"]))
        return cls(field, data["nvars"], data["degree"], terms)


def _clean(field: Field, terms: dict) -> dict:
    if isinstance(field, PrimeField):
        p = field.p
        return {e: c % p for e, c in terms.items() if c % p}
    out = {}
    for e, c in terms.items():
        if c:
            out[e] = int(c) if isinstance(c, Fraction) and c.denominator == 1 else c
    return out


def poly_mul(P: SparsePolynomial, Q: SparsePolynomial) -> SparsePolynomial:
    # native int/Fraction arithmetic in the inner loop; reduction happens in _clean
    out: dict = defaultdict(int)
    for e1, c1 in P.terms.items():
        for e2, c2 in Q.terms.items():
            out[tuple(map(operator.add, e1, e2))] += c1 * c2
    return SparsePolynomial(P.field, P.nvars, P.degree + Q.degree, _clean(P.field, out))


def poly_add(P: SparsePolynomial, Q: SparsePolynomial) -> SparsePolynomial:
    if P.degree != Q.degree and P.terms and Q.terms:
        raise ValueError("adding polynomials of different degrees breaks homogeneity")
    out: dict = defaultdict(int, P.terms)
    for e, c in Q.terms.items():
        out[e] += c
    deg = P.degree if P.terms else Q.degree
    return SparsePolynomial(P.field, P.nvars, deg, _clean(P.field, out))


def linear_poly(form: LinearForm) -> SparsePolynomial:
    k = len(form.coeffs)
    terms = {}
    for i, c in enumerate(form.coeffs):
        if not form.field.is_zero(c):
            terms[tuple(1 if j == i else 0 for j in range(k))] = c
    return SparsePolynomial(form.field, k, 1, terms)


def poly_pow(P: SparsePolynomial, d: int) -> SparsePolynomial:
    """``P^d`` by repeated squaring."""
    if d < 1:
        raise ValueError("exponent must be positive")
    result = None
    base = P
    while d:
        if d & 1:
            result = base if result is None else poly_mul(result, base)
        d >>= 1
        if d:
            base = poly_mul(base, base)
    return result


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def multinomial_power(form: LinearForm, d: int) -> SparsePolynomial:
    """``h^d`` straight from the multinomial theorem."""
    F = form.field
    k = len(form.coeffs)
    terms = {}
    for e in _compositions(d, k):
        coef = math.factorial(d)
        for ei in e:
            coef //= math.factorial(ei)
        c = F.coerce(coef)
        for ci, ei in zip(form.coeffs, e):
            if ei:
                c = F.mul(c, F.power(ci, ei))
        if not F.is_zero(c):
            terms[e] = c
    return SparsePolynomial(F, k, d, terms)


def monomial_count(nvars: int, d: int) -> int:
    return math.comb(d + nvars - 1, nvars - 1)


def expand_power_sum(spec: HypersurfaceSpec) -> SparsePolynomial:
    """Exact expansion of ``sum_j h_j(z)^d``."""
    nvars = spec.n + 1
    total = monomial_count(nvars, spec.d)
    if total > MONOMIAL_CAP:
        raise ValueError(f"expansion would have up to {total} monomials (cap {MONOMIAL_CAP})")
    acc = SparsePolynomial(spec.field, nvars, spec.d, {})
    for form in spec.forms:
        power = poly_pow(linear_poly(form), spec.d)
        if total <= 500:
            assert power == multinomial_power(form, spec.d)
        acc = poly_add(acc, power)
    return acc


def evaluate(obj: HypersurfaceSpec | SparsePolynomial, point: Sequence):
    """Exact value at ``point``; specs are evaluated without expanding."""
    F = obj.field
    nvars = obj.n + 1 if isinstance(obj, HypersurfaceSpec) else obj.nvars
    if len(point) != nvars:
        raise ValueError(f"point has {len(point)} coordinates, expected {nvars}")
    z = [F.coerce(x) for x in point]
    if all(F.is_zero(x) for x in z):
        warnings.warn("evaluating at the zero vector, which is not a projective point", stacklevel=2)
    if isinstance(obj, HypersurfaceSpec):
        acc = F.zero()
        for h in obj.forms:
            acc = F.add(acc, F.power(h(z), obj.d))
        return acc
    acc = F.zero()
    for e, c in obj.terms.items():
        v = c
        for x, ei in zip(z, e):
            if ei:
                v = F.mul(v, F.power(x, ei))
        acc = F.add(acc, v)
    return acc


def family_dimension(n: int, m: int) -> int:
    """Dimension (n+1)m - 1 of the family of such hypersurfaces."""
    if m < n + 1:
        raise ValueError(f"need m >= n+1, got m={m}, n={n}")
    return (n + 1) * m - 1


def plane_section_model(spec: HypersurfaceSpec) -> Subspace:
    """The subspace ``V = {(h_1(z), ..., h_m(z)) : z}`` of F^m, of dimension n+1."""
    H = spec.coefficient_matrix()
    V = Subspace.row_space(H.T)
    if V.dim != spec.n + 1:
        raise ValueError(f"coefficient matrix has rank {V.dim} < n+1 = {spec.n + 1}")
    return V
