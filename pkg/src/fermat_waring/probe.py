"""Monte-Carlo probe of the incidence condition ``dim(Y~ ∩ V) < 2``.

For a partition and ratios mu solving ``1 + sum_j mu_j^d = 0`` in every
constrained class, the diagonal plane Y~ is spanned by one vector per class,
supported on that class.  A plane section V survives the probe when no
sampled Y~ meets it in dimension two or more.  Passing is evidence, not a
proof: the bad locus lives over C and we sample F_p points of it.
"""

from __future__ import annotations

import cmath
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .fields import ComplexField, Field, FieldMismatchError, PrimeField, parse_field
from .linalg import Subspace, intersect
from .partitions import Partition, enumerate_partitions, tfg_degree_bound

MAX_RETRIES = 10_000
ROOT_TABLE_CAP = 10**5
DEFAULT_PROBE_PRIME = 10007
NOTE = "probe passes are evidence over a finite field, not a proof over C"


class MuSamplingError(RuntimeError):
    """No admissible mu could be drawn (too few d-th powers in the field)."""


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def fermat_residual(field: Field, ratios, d: int):
    """``1 + sum mu^d`` computed term by term."""
    acc = field.one()
    for mu in ratios:
        acc = field.add(acc, field.power(mu, d))
    return acc


@dataclass(frozen=True)
class MuAssignment:
    """Ratios per class, aligned with ``partition.classes``; entry j is mu_{alpha, j+2}."""

    partition: Partition
    d: int
    field: Field
    values: tuple[tuple, ...]

    def __post_init__(self):
        p = self.partition
        if len(self.values) != p.l:
            raise ValueError("one ratio tuple per class is required")
        for alpha, (cl, vals) in enumerate(zip(p.classes, self.values)):
            if len(vals) != len(cl) - 1:
                raise ValueError(f"class {alpha + 1} needs {len(cl) - 1} ratios, got {len(vals)}")
            if any(self._is_zero(v) for v in vals):
                raise ValueError("ratios must be nonzero")
            res = fermat_residual(self.field, vals, self.d)
            if self.is_constrained(alpha):
                if not self._is_zero(res, vals):
                    raise ValueError(f"class {alpha + 1} violates 1 + sum mu^d = 0")
            elif self._is_zero(res, vals):
                raise ValueError("the distinguished class must not satisfy the Fermat relation")

    def is_constrained(self, alpha: int) -> bool:
        return not (self.partition.theorem == 2 and alpha == 0)

    def _is_zero(self, x, vals=()) -> bool:
        if isinstance(self.field, ComplexField):
            scale = 1.0 + sum(abs(v) ** self.d for v in vals)
            return abs(x) <= 1e-9 * scale
        return self.field.is_zero(x)


@lru_cache(maxsize=32)
def _root_table(p: int, d: int) -> dict[int, tuple[int, ...]]:
    table: dict[int, list[int]] = {}
    for x in range(1, p):
        table.setdefault(pow(x, d, p), []).append(x)
    return {k: tuple(v) for k, v in table.items()}


def _is_dth_power(t: int, d: int, p: int) -> bool:
    g = math.gcd(d, p - 1)
    return t % p != 0 and pow(t, (p - 1) // g, p) == 1


def _dth_root_mod_p(t: int, d: int, p: int, rng: np.random.Generator) -> int:
    g = math.gcd(d, p - 1)
    if g == 1:
        return pow(t, pow(d, -1, p - 1), p)
    if p > ROOT_TABLE_CAP:
        raise MuSamplingError(f"root search over F_{p} exceeds the cap p <= {ROOT_TABLE_CAP}")
    roots = _root_table(p, d)[t]
    return roots[int(rng.integers(len(roots)))]


def _solve_class(size: int, d: int, F: Field, rng: np.random.Generator) -> tuple:
    """Ratios (mu_2, ..., mu_size) with 1 + sum mu_j^d = 0."""
    if isinstance(F, PrimeField):
        p = F.p
        if size == 2 and not _is_dth_power(p - 1, d, p):
            raise MuSamplingError(
                f"-1 is not a {d}-th power in F_{p}: two-element classes have no solutions; "
                f"use a prime p with p = 1 mod {2 * d}"
            )
        for _ in range(MAX_RETRIES):
            tail = [F.random(rng, nonzero=True) for _ in range(size - 2)]
            t = (-1 - sum(pow(x, d, p) for x in tail)) % p
            if _is_dth_power(t, d, p):
                return (_dth_root_mod_p(t, d, p, rng), *tail)
        raise MuSamplingError(
            f"no admissible ratios after {MAX_RETRIES} draws in F_{p} with d={d}; "
            "use a larger prime with more d-th powers"
        )
    tail = [F.random(rng, nonzero=True) for _ in range(size - 2)]
    t = -1 - sum(x**d for x in tail)
    return (cmath.exp(cmath.log(t) / d), *tail)


def sample_mu(p: Partition, d: int, field: Field | str, seed=0, enforce_bound: bool = True) -> MuAssignment:
    """Draw ratios for every class of ``p`` (free constants for a distinguished class)."""
    F = parse_field(field) if isinstance(field, str) else field
    if d < 1:
        raise ValueError("degree must be positive")
    if enforce_bound and d < tfg_degree_bound(p.m, p.theorem):
        raise ValueError(f"d={d} is below the degree bound {tfg_degree_bound(p.m, p.theorem)} for m={p.m}")
    if isinstance(F, PrimeField) and d % F.p == 0:
        raise ValueError(f"p={F.p} divides d={d}")
    rng = _rng(seed)
    values = []
    for alpha, cl in enumerate(p.classes):
        if p.theorem == 2 and alpha == 0:
            for _ in range(MAX_RETRIES):
                vals = tuple(F.random(rng, nonzero=True) for _ in range(len(cl) - 1))
                res = fermat_residual(F, vals, d)
                if not (abs(res) <= 1e-9 if isinstance(F, ComplexField) else F.is_zero(res)):
                    break
            else:
                raise MuSamplingError("could not avoid the Fermat relation for the distinguished class")
            values.append(vals)
        else:
            values.append(_solve_class(len(cl), d, F, rng))
    return MuAssignment(p, d, F, tuple(values))


@dataclass(frozen=True)
class DiagonalPlane:
    subspace: Subspace
    partition: Partition
    mu: MuAssignment
    generators: tuple[tuple, ...]

    @property
    def dim(self) -> int:
        return self.subspace.dim


def build_diagonal_plane(p: Partition, mu: MuAssignment) -> DiagonalPlane:
    """Span of one vector per class: 1 at i(alpha,1), mu_{alpha j} at i(alpha,j), 0 elsewhere."""
    if mu.partition != p:
        raise ValueError("ratios were sampled for a different partition")
    F = mu.field
    gens = []
    for cl, vals in zip(p.classes, mu.values):
        if len(vals) != len(cl) - 1:
            raise ValueError("ratio count does not match class size")
        v = [F.zero()] * p.m
        for idx in cl:
            if not 1 <= idx <= p.m:
                raise ValueError(f"index {idx} out of range")
        v[cl[0] - 1] = F.one()
        for idx, val in zip(cl[1:], vals):
            v[idx - 1] = val
        gens.append(tuple(v))
    sub = Subspace.span(F, p.m, gens)
    assert sub.dim == p.l
    return DiagonalPlane(sub, p, mu, tuple(gens))


# -------------------------------------------------------------------- probe

@lru_cache(maxsize=16)
def _probe_partitions(m: int, theorem: int) -> tuple[Partition, ...]:
    return tuple(p for p in enumerate_partitions(m, theorem) if p.l >= 2)


def _key(p: Partition) -> str:
    body = "|".join(",".join(map(str, c)) for c in p.classes)
    return f"I0={','.join(map(str, p.i0))};{body}"


@dataclass
class ProbeReport:
    n: int
    m: int
    d: int
    theorem: int
    trials: int
    seed: int
    field: str
    max_dim: int | None
    histogram: dict
    per_partition: dict
    flagged_partitions: list
    unsolvable: dict
    verdict: str
    warnings: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return self.verdict == "clean"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "d": self.d,
            "theorem": self.theorem,
            "trials": self.trials,
            "seed": self.seed,
            "field": self.field,
            "max_dim": self.max_dim,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "per_partition": {k: {str(a): b for a, b in sorted(v.items())} for k, v in sorted(self.per_partition.items())},
            "flagged_partitions": self.flagged_partitions,
            "unsolvable": dict(sorted(self.unsolvable.items())),
            "verdict": self.verdict,
            "warnings": list(self.warnings),
            "note": NOTE,
        }

    def render(self) -> str:
        lines = [
            f"probe  theorem {self.theorem}  n={self.n}  m={self.m}  d={self.d}  field={self.field}",
            f"trials: {self.trials}  seed: {self.seed}  max dim(Y ∩ V): {self.max_dim}",
            "histogram: " + ", ".join(f"dim {k}: {v}" for k, v in sorted(self.histogram.items())),
        ]
        if self.unsolvable:
            lines.append(f"partitions without F_p-rational ratios: {len(self.unsolvable)}")
        for f in self.flagged_partitions[:5]:
            lines.append(f"flagged: {f['partition']}  dim {f['dim']}")
        lines.extend(f"warning: {w}" for w in self.warnings)
        lines.append(f"verdict: {self.verdict.upper()}  ({NOTE})")
        return "\n".join(lines)


def probe(
    V: Subspace,
    theorem: int,
    d: int,
    trials: int,
    seed: int = 0,
    field: Field | str | None = None,
    enforce_bound: bool = True,
    partitions: list[Partition] | None = None,
) -> ProbeReport:
    """Intersect V with diagonal planes of random partitions (l >= 2) and ratios.

    ``partitions`` restricts the draw to the given list (targeted probing);
    by default every partition of m indices with l >= 2 is eligible.
    """
    if field is not None:
        F = parse_field(field) if isinstance(field, str) else field
        if F != V.field:
            raise FieldMismatchError(f"V lives over {V.field!r} but the sampler uses {F!r}")
    F = V.field
    m = V.ambient_dim
    n = V.dim - 1
    if trials < 0:
        raise ValueError("trials must be non-negative")
    if partitions is None:
        parts = _probe_partitions(m, theorem)
    else:
        parts = tuple(partitions)
        if any(p.m != m or p.theorem != theorem or p.l < 2 for p in parts):
            raise ValueError("targeted partitions must match m, the theorem mode and have l >= 2")
    hist: Counter = Counter()
    per: dict[str, Counter] = {}
    flagged = []
    unsolvable: Counter = Counter()
    notes = []
    if trials == 0:
        notes.append("no trials run; verdict is vacuous")
    elif not parts:
        notes.append(f"no partition of {m} indices has l >= 2; verdict is vacuous")
    else:
        for t in range(trials):
            rng = np.random.default_rng([seed, t])
            p = parts[int(rng.integers(len(parts)))]
            try:
                mu = sample_mu(p, d, F, rng, enforce_bound=enforce_bound)
            except MuSamplingError:
                unsolvable[_key(p)] += 1
                continue
            Y = build_diagonal_plane(p, mu)
            dim = intersect(Y.subspace, V).dim
            hist[dim] += 1
            per.setdefault(_key(p), Counter())[dim] += 1
            if dim >= 2:
                flagged.append({"trial": t, "partition": _key(p), "dim": dim})
    if unsolvable:
        notes.append(f"{sum(unsolvable.values())} trials drew partitions with no rational ratios in {F!r}")
    for w in notes:
        warnings.warn(w, stacklevel=2)
    max_dim = max(hist) if hist else None
    verdict = "flagged" if max_dim is not None and max_dim >= 2 else "clean"
    return ProbeReport(
        n=n, m=m, d=d, theorem=theorem, trials=trials, seed=seed, field=F.descriptor(),
        max_dim=max_dim, histogram=dict(hist), per_partition={k: dict(v) for k, v in per.items()},
        flagged_partitions=flagged, unsolvable=dict(unsolvable), verdict=verdict, warnings=notes,
    )


def construct_bad_V(p: Partition, mu: MuAssignment, n: int, seed=0) -> Subspace:
    """A V of dimension n+1 containing a 2-plane of the diagonal plane Y~."""
    if p.l < 2:
        raise ValueError("l >= 2 is required: a one-dimensional plane has no 2-dimensional subspace")
    if n + 1 > p.m:
        raise ValueError(f"V of dimension {n + 1} does not fit in F^{p.m}")
    if n < 1:
        raise ValueError("need n >= 1")
    Y = build_diagonal_plane(p, mu)
    F = mu.field
    rng = _rng(seed)
    for _ in range(MAX_RETRIES):
        extra = [tuple(F.random(rng) for _ in range(p.m)) for _ in range(n - 1)]
        V = Subspace.span(F, p.m, list(Y.generators[:2]) + extra)
        if V.dim == n + 1:
            assert intersect(Y.subspace, V).dim >= 2
            return V
    raise RuntimeError("could not complete the bad subspace to full dimension")
