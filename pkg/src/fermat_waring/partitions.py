"""Index partitions, mu-moduli dimensions and the genericity certificate.

A partition splits J_m = {1, ..., m} into a vanishing class I_0 and classes
I_1, ..., I_l.  In theorem-1 mode every class has at least two members; in
theorem-2 mode one distinguished class (stored first) may be a singleton.

For a class structure the plane section V in Gr_{m,m-n-1} is bad on a locus
of codimension ``s = 2(m - n - l + 1)``; the certificate checks
``s - moduli_dim - 1 >= 0`` for every structure with l >= 2.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Iterator

from .grassmann import GammaParams, codim_gamma

ENUMERATION_CAP = 14
TYPE_CAP = 60


def _check_theorem(theorem: int) -> int:
    if theorem not in (1, 2):
        raise ValueError(f"theorem must be 1 or 2, got {theorem!r}")
    return theorem


@dataclass(frozen=True)
class Partition:
    m: int
    i0: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    theorem: int = 1
    distinguished: int | None = None

    def __post_init__(self):
        _check_theorem(self.theorem)
        seen = list(self.i0) + [j for cl in self.classes for j in cl]
        if sorted(seen) != list(range(1, self.m + 1)):
            raise ValueError("classes must partition {1, ..., m}")
        if tuple(sorted(self.i0)) != self.i0 or any(tuple(sorted(cl)) != cl for cl in self.classes):
            raise ValueError("index lists must be sorted")
        if not self.classes:
            raise ValueError("at least one non-vanishing class is required (l >= 1)")
        if self.theorem == 1:
            if self.distinguished is not None:
                raise ValueError("theorem-1 partitions have no distinguished class")
            if any(len(cl) < 2 for cl in self.classes):
                raise ValueError("theorem-1 classes need k_alpha >= 2")
            free = self.classes
        else:
            if self.distinguished != 0:
                raise ValueError("theorem-2 partitions keep the distinguished class first (index 0)")
            if any(len(cl) < 2 for cl in self.classes[1:]):
                raise ValueError("non-distinguished classes need k_alpha >= 2")
            free = self.classes[1:]
        if list(free) != sorted(free, key=lambda cl: cl[0]):
            raise ValueError("non-distinguished classes must be sorted by least element")

    @property
    def l(self) -> int:
        return len(self.classes)

    @property
    def k0(self) -> int:
        return len(self.i0)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(cl) for cl in self.classes)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "i0": list(self.i0),
            "classes": [list(cl) for cl in self.classes],
            "theorem": self.theorem,
            "distinguished": self.distinguished,
        }


# ------------------------------------------------------------- enumeration

def _set_partitions_with_zero(m: int, min_block, max_singletons: int) -> Iterator[tuple[list[int], list[list[int]]]]:
    """All (I_0, blocks) over {1..m}; blocks in restricted-growth order.

    ``max_singletons`` bounds the number of size-one blocks in the result and
    is used to prune branches that can no longer satisfy it.
    """
    i0: list[int] = []
    blocks: list[list[int]] = []

    def rec(j: int):
        if j > m:
            if blocks and sum(1 for b in blocks if len(b) < min_block) <= max_singletons:
                yield list(i0), [list(b) for b in blocks]
            return
        remaining = m - j + 1
        if sum(1 for b in blocks if len(b) == 1) - max_singletons > remaining:
            return
        i0.append(j)
        yield from rec(j + 1)
        i0.pop()
        for b in blocks:
            b.append(j)
            yield from rec(j + 1)
            b.pop()
        blocks.append([j])
        yield from rec(j + 1)
        blocks.pop()

    yield from rec(1)


def enumerate_partitions(m: int, theorem: int = 1) -> Iterator[Partition]:
    """Every admissible partition of J_m, each exactly once in canonical order.

    In theorem-2 mode a set partition is yielded once per admissible choice of
    the distinguished class.
    """
    _check_theorem(theorem)
    if m < 2:
        raise ValueError("m must be at least 2")
    if m > ENUMERATION_CAP:
        raise ValueError(f"exhaustive enumeration is capped at m <= {ENUMERATION_CAP}; got m={m}")
    if theorem == 1:
        for i0, blocks in _set_partitions_with_zero(m, 2, 0):
            yield Partition(m, tuple(i0), tuple(tuple(b) for b in blocks), 1)
        return
    for i0, blocks in _set_partitions_with_zero(m, 2, 1):
        singles = [i for i, b in enumerate(blocks) if len(b) == 1]
        choices = singles if singles else range(len(blocks))
        for i in choices:
            rest = blocks[:i] + blocks[i + 1:]
            yield Partition(m, tuple(i0), (tuple(blocks[i]),) + tuple(tuple(b) for b in rest), 2, 0)


# --------------------------------------------------------- dimension counts

def moduli_dim(p: Partition) -> int:
    """Dimension of the mu-moduli of the diagonal planes for this partition."""
    if p.theorem == 1:
        explicit = sum(k - 2 for k in p.sizes)
        closed = p.m - p.k0 - 2 * p.l
    else:
        explicit = (p.sizes[0] - 1) + sum(k - 2 for k in p.sizes[1:])
        closed = p.m - p.k0 - 2 * p.l + 1
    assert explicit == closed, (p, explicit, closed)
    return explicit


def _bad_codim_formula(n: int, m: int, l: int) -> int:
    return 2 * (m - n - l + 1)


def bad_codim(n: int, m: int, l: int) -> int:
    """Codimension in Gr_{m,m-n-1} of the V meeting a fixed l-plane in dimension >= 2."""
    if l < 1:
        raise ValueError(f"need l >= 1, got {l}")
    if m < n + 2:
        raise ValueError(f"need m >= n+2 for a proper Grassmannian, got m={m}, n={n}")
    s = _bad_codim_formula(n, m, l)
    try:
        gp = GammaParams(m, m - n - 1, m - l, m - 2)
    except ValueError:
        return s
    assert codim_gamma(gp) == s, (n, m, l)
    return s


def degree_for(n: int, theorem: int) -> tuple[int, int]:
    """Minimal (m, d) of the construction in P^n."""
    _check_theorem(theorem)
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    m = 2 * n - 1 if theorem == 1 else 2 * n
    return m, tfg_degree_bound(m, theorem)


def tfg_degree_bound(m: int, theorem: int) -> int:
    """Smallest degree the theorem allows for m linear forms."""
    _check_theorem(theorem)
    if m < 2:
        raise ValueError(f"need m >= 2, got {m}")
    return (m - 1) ** 2 if theorem == 1 else m * m - m + 1


# ------------------------------------------------------------- certificate

@dataclass(frozen=True)
class PartitionType:
    """Partitions up to relabelling: k_0 and the class sizes (distinguished first)."""

    m: int
    theorem: int
    k0: int
    sizes: tuple[int, ...]

    @property
    def l(self) -> int:
        return len(self.sizes)

    def count(self) -> int:
        """Number of partitions of J_m with this type."""
        rest = self.m - self.k0
        total = math.comb(self.m, self.k0)
        free = self.sizes
        if self.theorem == 2:
            total *= math.comb(rest, self.sizes[0])
            rest -= self.sizes[0]
            free = self.sizes[1:]
        ways = math.factorial(rest)
        for k in free:
            ways //= math.factorial(k)
        for mult in Counter(free).values():
            ways //= math.factorial(mult)
        return total * ways

    def representative(self) -> Partition:
        nxt = 1
        classes = []
        for k in self.sizes:
            classes.append(tuple(range(nxt, nxt + k)))
            nxt += k
        i0 = tuple(range(nxt, self.m + 1))
        if self.theorem == 1:
            return Partition(self.m, i0, tuple(classes), 1)
        return Partition(self.m, i0, tuple(classes), 2, 0)


def _integer_partitions(total: int, min_part: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of ``total`` into parts >= min_part, parts non-increasing."""
    if max_part is None:
        max_part = total
    if total == 0:
        yield ()
        return
    for first in range(min(total, max_part), min_part - 1, -1):
        for rest in _integer_partitions(total - first, min_part, first):
            yield (first,) + rest


def enumerate_types(m: int, theorem: int) -> Iterator[PartitionType]:
    _check_theorem(theorem)
    for k0 in range(m + 1):
        rest = m - k0
        if theorem == 1:
            for sizes in _integer_partitions(rest, 2):
                if sizes:
                    yield PartitionType(m, 1, k0, sizes)
        else:
            for k1 in range(1, rest + 1):
                for sizes in _integer_partitions(rest - k1, 2):
                    yield PartitionType(m, 2, k0, (k1,) + sizes)


def type_of(p: Partition) -> PartitionType:
    if p.theorem == 1:
        sizes = tuple(sorted(p.sizes, reverse=True))
    else:
        sizes = (p.sizes[0],) + tuple(sorted(p.sizes[1:], reverse=True))
    return PartitionType(p.m, p.theorem, p.k0, sizes)


def _moduli_from_type(t: PartitionType) -> int:
    return moduli_dim(t.representative())


@dataclass
class CertificateRow:
    l: int
    class_sizes: list[int]
    k0: int
    moduli_dim: int
    s: int
    slack: int
    count: int
    exempt: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class CertificateReport:
    n: int
    m: int
    d: int
    mode: int
    rows: list[CertificateRow]
    min_slack: int | None
    verdict: str
    worst_partition: Partition | None
    method: str
    partition_count: int
    override_m: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "d": self.d,
            "mode": self.mode,
            "method": self.method,
            "override_m": self.override_m,
            "partition_count": self.partition_count,
            "rows": [r.to_dict() for r in self.rows],
            "min_slack": self.min_slack,
            "verdict": self.verdict,
            "worst_partition": self.worst_partition.to_dict() if self.worst_partition else None,
            "notes": list(self.notes),
        }

    def render(self) -> str:
        lines = [
            f"certificate  theorem {self.mode}  n={self.n}  m={self.m}  d={self.d}  ({self.method})",
            f"partitions: {self.partition_count}   min slack (l >= 2): {self.min_slack}",
        ]
        shown = sorted((r for r in self.rows if not r.exempt), key=lambda r: (r.slack, r.l))[:10]
        if shown:
            lines.append("  l  k0  sizes            moduli   s  slack      count")
            for r in shown:
                sizes = ",".join(map(str, r.class_sizes))
                lines.append(f"{r.l:3d} {r.k0:3d}  {sizes:<16s} {r.moduli_dim:6d} {r.s:3d} {r.slack:6d} {r.count:10d}")
        if self.worst_partition is not None:
            w = self.worst_partition
            lines.append(f"worst partition: I_0={list(w.i0)} classes={[list(c) for c in w.classes]}")
        lines.extend(f"note: {n}" for n in self.notes)
        lines.append(f"verdict: {self.verdict.upper()}")
        return "\n".join(lines)


def _row_for(n: int, m: int, theorem: int, k0: int, sizes: tuple[int, ...], moduli: int, count: int) -> CertificateRow:
    l = len(sizes)
    s = _bad_codim_formula(n, m, l)
    if l >= 2 and m >= n + 2:
        assert bad_codim(n, m, l) == s
    slack = s - moduli - 1
    closed = m - 2 * n + 1 + k0 if theorem == 1 else m - 2 * n + k0
    assert slack == closed, (n, m, theorem, k0, sizes)
    return CertificateRow(l, list(sizes), k0, moduli, s, slack, count, l == 1)


def certify(
    n: int,
    theorem: int,
    override_m: int | None = None,
    d: int | None = None,
    method: str = "types",
) -> CertificateReport:
    """Check ``s >= moduli_dim + 1`` for every partition with l >= 2.

    ``method`` selects how the partitions are covered: ``"types"`` walks every
    partition type and weighs it by its exact number of partitions,
    ``"stream"`` visits each partition individually (m <= 14), ``"analytic"``
    uses the uniform worst case k_0 = 0 without enumeration.
    """
    _check_theorem(theorem)
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    m_default, _ = degree_for(n, theorem)
    m = m_default if override_m is None else int(override_m)
    if m < n + 1:
        raise ValueError(f"need m >= n+1 linear forms on C^(n+1), got m={m}")
    if d is None:
        d = tfg_degree_bound(m, theorem)
    notes = []
    if override_m is not None and m != m_default:
        notes.append(f"m overridden from {m_default} to {m}")

    rows: list[CertificateRow] = []
    worst: tuple[int, Partition] | None = None
    total = 0
    if method == "analytic":
        # slack = m - 2n + 1 + k0 (theorem 1) or m - 2n + k0 (theorem 2), minimal at k0 = 0
        min_l2_size = 4 if theorem == 1 else 3
        if m >= min_l2_size:
            sizes = (2, m - 2) if theorem == 1 else (1, m - 1)
            t = PartitionType(m, theorem, 0, sizes)
            rows.append(_row_for(n, m, theorem, 0, sizes, _moduli_from_type(t), t.count()))
            worst = (rows[-1].slack, t.representative())
        total = -1
        notes.append("analytic bound; partitions not enumerated")
    elif method == "types":
        if m > TYPE_CAP:
            raise ValueError(f"type enumeration capped at m <= {TYPE_CAP}; use method='analytic'")
        for t in enumerate_types(m, theorem):
            cnt = t.count()
            total += cnt
            row = _row_for(n, m, theorem, t.k0, t.sizes, _moduli_from_type(t), cnt)
            rows.append(row)
            if not row.exempt and (worst is None or row.slack < worst[0]):
                worst = (row.slack, t.representative())
    elif method == "stream":
        agg: dict[PartitionType, int] = {}
        for p in enumerate_partitions(m, theorem):
            total += 1
            t = type_of(p)
            agg[t] = agg.get(t, 0) + 1
            if p.l >= 2:
                slack = _bad_codim_formula(n, m, p.l) - moduli_dim(p) - 1
                if worst is None or slack < worst[0]:
                    worst = (slack, p)
        for t, cnt in agg.items():
            rows.append(_row_for(n, m, theorem, t.k0, t.sizes, _moduli_from_type(t), cnt))
    else:
        raise ValueError(f"unknown method {method!r}")

    rows.sort(key=lambda r: (r.l, r.k0, r.class_sizes))
    checked = [r.slack for r in rows if not r.exempt]
    min_slack = min(checked) if checked else None
    verdict = "pass" if min_slack is None or min_slack >= 0 else "fail"
    if min_slack is None:
        notes.append("no partition with l >= 2; certificate holds vacuously")
    else:
        threshold = 2 * n - 1 if theorem == 1 else 2 * n
        assert (verdict == "pass") == (m >= threshold), (n, m, theorem, min_slack)
    return CertificateReport(
        n=n, m=m, d=d, mode=theorem, rows=rows, min_slack=min_slack, verdict=verdict,
        worst_partition=worst[1] if worst else None, method=method, partition_count=total,
        override_m=override_m is not None, notes=notes,
    )
