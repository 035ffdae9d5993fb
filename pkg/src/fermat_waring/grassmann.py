"""Grassmannian bookkeeping, the incidence family Gamma_{m,a,b,c} and its oracles.

Subspaces are indexed by codimension: ``Gr_{m,a}`` is the set of subspaces of
F^m of codimension ``a``, of dimension ``a (m - a)``.  ``Gamma_{m,a,b,c}`` holds
the V in ``Gr_{m,a}`` with ``dim(V ∩ Q_{m,b}) >= m - c``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from .fields import PrimeField, is_prime
from .linalg import Matrix, Q_subspace, Subspace, batch_rank_mod_p, intersect, rank

EXHAUSTIVE_CAP = 10**7
SAMPLE_CHUNK = 20_000


def slack_for(q: int) -> float:
    """Allowed gap between measured and predicted exponent at field size q."""
    return 0.35 if q >= 101 else 1.0


def grassmannian_dim(m: int, a: int) -> int:
    if not 1 <= a <= m:
        raise ValueError(f"need 1 <= a <= m, got a={a}, m={m}")
    return a * (m - a)


@dataclass(frozen=True)
class GammaParams:
    m: int
    a: int
    b: int
    c: int

    def __post_init__(self):
        m, a, b, c = self.m, self.a, self.b, self.c
        if not (1 <= a <= c <= m and 1 <= b <= c <= a + b):
            raise ValueError(
                f"invalid Gamma parameters (m={m}, a={a}, b={b}, c={c}): "
                "need 1 <= a <= c <= m and 1 <= b <= c <= a+b"
            )

    @classmethod
    def all_valid(cls, max_m: int, min_m: int = 1) -> Iterator["GammaParams"]:
        for m in range(min_m, max_m + 1):
            for a in range(1, m + 1):
                for c in range(a, m + 1):
                    for b in range(1, c + 1):
                        if c <= a + b:
                            yield cls(m, a, b, c)


def codim_gamma(p: GammaParams) -> int:
    """Codimension of Gamma_{m,a,b,c} in Gr_{m,a}: (m - c)(a + b - c)."""
    return (p.m - p.c) * (p.a + p.b - p.c)


def rank_stratum_codim(k: int, l: int, r: int) -> int:
    """Codimension of ``{C in Mat_{k,l} : rank C <= r}``."""
    if not 0 <= r <= min(k, l):
        raise ValueError(f"need 0 <= r <= min(k, l), got r={r} for {k}x{l}")
    return (k - r) * (l - r)


# ------------------------------------------------------------ rank counting

def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def count_rank_exactly(k: int, l: int, r: int, q: int) -> int:
    """Number of k x l matrices over F_q of rank exactly r.

    Choose the r-dimensional row space ([l choose r]_q ways), then a surjection
    of F_q^k onto it (prod_{i<r} (q^k - q^i) ways).
    """
    if r < 0 or r > min(k, l):
        return 0
    surj = 1
    for i in range(r):
        surj *= q**k - q**i
    return gaussian_binomial(l, r, q) * surj


@dataclass(frozen=True)
class RankStratumQuery:
    k: int
    l: int
    r: int
    q: int

    def __post_init__(self):
        if self.k < 0 or self.l < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if not 0 <= self.r <= min(self.k, self.l):
            raise ValueError(f"need 0 <= r <= min(k, l), got r={self.r}")
        if not is_prime(self.q):
            raise ValueError(f"q={self.q} is not prime")


def _count_rank_le_formula(k: int, l: int, r: int, q: int) -> int:
    return sum(count_rank_exactly(k, l, j, q) for j in range(min(r, k, l) + 1))


@lru_cache(maxsize=64)
def _rank_histogram_exhaustive(k: int, l: int, q: int) -> tuple[int, ...]:
    F = PrimeField(q)
    hist = [0] * (min(k, l) + 1)
    for flat in itertools.product(range(q), repeat=k * l):
        rows = [flat[i * l:(i + 1) * l] for i in range(k)]
        hist[rank(Matrix(F, k, l, tuple(tuple(r) for r in rows)))] += 1
    return tuple(hist)


def count_rank_le(query: RankStratumQuery, mode: str = "both") -> int:
    """``#{C in Mat_{k,l}(F_q) : rank C <= r}``.

    ``mode`` is ``"exhaustive"``, ``"formula"`` or ``"both"`` (the default,
    which runs both and raises ``AssertionError`` if they disagree).
    """
    k, l, r, q = query.k, query.l, query.r, query.q
    if mode not in ("exhaustive", "formula", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    formula = _count_rank_le_formula(k, l, r, q)
    if mode == "formula":
        return formula
    if q ** (k * l) > EXHAUSTIVE_CAP:
        raise ValueError(f"exhaustive enumeration of {q}^{k * l} matrices exceeds the cap {EXHAUSTIVE_CAP}")
    brute = sum(_rank_histogram_exhaustive(k, l, q)[: r + 1])
    if mode == "both" and brute != formula:
        raise AssertionError(f"rank count mismatch for {query}: enumeration {brute}, formula {formula}")
    return brute


def sample_rank_le_fraction(k: int, l: int, r: int, q: int, trials: int, seed: int) -> tuple[int, int]:
    """Monte-Carlo count: (hits, trials) for random k x l matrices of rank <= r."""
    hits = 0
    done = 0
    chunk = 0
    while done < trials:
        size = min(SAMPLE_CHUNK * 5, trials - done)
        rng = np.random.default_rng([seed, chunk])
        ranks = batch_rank_mod_p(rng.integers(0, q, (size, k, l)), q)
        hits += int((ranks <= r).sum())
        done += size
        chunk += 1
    return hits, trials


# ------------------------------------------------------- Grassmannian points

def enumerate_grassmannian(field: PrimeField, m: int, dim: int) -> Iterator[Subspace]:
    """Every ``dim``-dimensional subspace of F_q^m exactly once, via RREF representatives."""
    q = field.p
    for pivots in itertools.combinations(range(m), dim):
        pivset = set(pivots)
        free = [(i, j) for i, pc in enumerate(pivots) for j in range(pc + 1, m) if j not in pivset]
        for values in itertools.product(range(q), repeat=len(free)):
            rows = [[0] * m for _ in range(dim)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, j), v in zip(free, values):
                rows[i][j] = v
            basis = Matrix(field, dim, m, tuple(tuple(r) for r in rows))
            yield Subspace(field, m, basis)


def gamma_membership(V: Subspace, b: int, c: int) -> bool:
    """Is ``dim(V ∩ Q_{m,b}) >= m - c``?"""
    m = V.ambient_dim
    GammaParams(m, m - V.dim, b, c)
    return intersect(V, Q_subspace(V.field, m, b)).dim >= m - c


# ----------------------------------------------------------- exponent oracle

@dataclass
class GammaEstimate:
    params: GammaParams
    q: int
    mode: str
    fraction_num: int
    fraction_den: int
    measured_exponent: float
    predicted_codim: int
    slack: float
    verdict: str
    trials: int | None = None
    hits: int | None = None
    estimator: str = "exact"
    extra: dict = field(default_factory=dict)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.fraction_num, self.fraction_den)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["params"] = asdict(self.params)
        return d


def _exponent(frac: Fraction, q: int) -> float:
    if frac <= 0:
        return math.inf
    val = -(math.log(frac.numerator) - math.log(frac.denominator)) / math.log(q)
    return 0.0 if abs(val) < 1e-15 else val


def estimate_gamma_codim(
    p: GammaParams,
    q: int,
    mode: str = "exhaustive",
    seed: int = 0,
    trials: int = 100_000,
) -> GammaEstimate:
    """Measure ``-log_q`` of the fraction of ``Gr_{m,a}(F_q)`` lying in Gamma.

    ``exhaustive`` enumerates every subspace through its RREF representative
    and tests membership with exact intersection.  ``sampled`` draws uniform
    full-rank bases of V; besides the raw hit count it reports a conditional
    Monte-Carlo estimate that stays resolvable when the hit probability is far
    below ``1/trials``: membership is ``rank(P) <= c - a`` for the projection P
    of the basis onto the first b coordinates, so conditioning on the first
    ``c - a`` rows of P leaves an exactly computable probability for the rest.
    """
    F = PrimeField(q)
    m, a, b, c = p.m, p.a, p.b, p.c
    k = m - a
    predicted = codim_gamma(p)
    slack = slack_for(q)
    if mode == "exhaustive":
        if q ** (m * k) > EXHAUSTIVE_CAP:
            raise ValueError(f"exhaustive mode needs q^(m(m-a)) <= {EXHAUSTIVE_CAP}; got {q}^{m * k}")
        total = inside = 0
        Q = Q_subspace(F, m, b)
        for V in enumerate_grassmannian(F, m, k):
            total += 1
            if intersect(V, Q).dim >= m - c:
                inside += 1
        frac = Fraction(inside, total)
        meas = _exponent(frac, q)
        return GammaEstimate(
            p, q, mode, frac.numerator, frac.denominator, meas, predicted, slack,
            "pass" if abs(meas - predicted) <= slack else "fail", trials=total, hits=inside,
        )
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    if q <= 3:
        raise ValueError("sampled mode needs q > 3 to resolve exponents; use exhaustive mode for small q")
    if trials < 1:
        raise ValueError("sampled mode needs at least one trial")

    t = c - a  # membership <=> rank of the b-column projection <= t
    hits = 0
    accepted = 0
    by_rho = [0] * (min(t, b) + 1)
    chunk = 0
    while accepted < trials:
        rng = np.random.default_rng([seed, chunk])
        chunk += 1
        B = rng.integers(0, q, (SAMPLE_CHUNK, k, m))
        B = B[batch_rank_mod_p(B, q) == k][: trials - accepted]
        accepted += len(B)
        P = B[:, :, :b]
        hits += int((batch_rank_mod_p(P, q) <= t).sum())
        rho = batch_rank_mod_p(P[:, :t, :], q) if t > 0 else np.zeros(len(B), dtype=np.int64)
        for r_ in range(len(by_rho)):
            by_rho[r_] += int((rho == r_).sum())

    est = Fraction(0)
    rest = k - t
    for rho_val, cnt in enumerate(by_rho):
        if not cnt:
            continue
        cols = b - rho_val
        need = t - rho_val
        if rest <= 0 or cols <= 0 or need >= min(rest, cols):
            prob = Fraction(1)
        else:
            prob = Fraction(_count_rank_le_formula(rest, cols, need, q), q ** (rest * cols))
        est += cnt * prob
    est /= accepted
    meas = _exponent(est, q)
    return GammaEstimate(
        p, q, mode, est.numerator, est.denominator, meas, predicted, slack,
        "pass" if abs(meas - predicted) <= slack else "fail",
        trials=accepted, hits=hits, estimator="conditional",
        extra={"indicator_exponent": _exponent(Fraction(hits, accepted), q) if hits else None},
    )

