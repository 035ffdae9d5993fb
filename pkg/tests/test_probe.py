import cmath
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermat_waring.fields import GF, ComplexField, FieldMismatchError
from fermat_waring.hypersurface import build_hypersurface, plane_section_model
from fermat_waring.linalg import Subspace, intersect
from fermat_waring.partitions import Partition, enumerate_partitions, moduli_dim
from fermat_waring.probe import (
    MuAssignment,
    MuSamplingError,
    build_diagonal_plane,
    construct_bad_V,
    probe,
    sample_mu,
)

F13 = GF(13)
P = 10007


def _fermat_ok(field, vals, d):
    # recomputed from scratch with python ints, not through the field class
    if hasattr(field, "p"):
        return (1 + sum(pow(int(v), d, field.p) for v in vals)) % field.p == 0
    return abs(1 + sum(v**d for v in vals)) < 1e-8 * (1 + sum(abs(v) ** d for v in vals))


def test_size_two_class_mod_13():
    part = Partition(2, (), ((1, 2),))
    seen = set()
    for s in range(40):
        mu = sample_mu(part, 3, F13, seed=s, enforce_bound=False)
        (val,) = mu.values[0]
        assert pow(val, 3, 13) == 12
        seen.add(val)
    assert seen == {4, 10, 12}


def test_complex_size_two_is_root_of_minus_one():
    d = 7
    part = Partition(2, (), ((1, 2),))
    mu = sample_mu(part, d, ComplexField(), seed=0, enforce_bound=False)
    (val,) = mu.values[0]
    assert abs(val - cmath.exp(1j * cmath.pi / d)) < 1e-12
    assert abs(val**d + 1) < 1e-12


@pytest.mark.parametrize("theorem,d", [(1, 16), (2, 13)])
def test_sampled_ratios_satisfy_relation(theorem, d):
    F = GF(10177) if theorem == 1 else GF(P)
    m = 5 if theorem == 1 else 4
    for i, part in enumerate(p for p in enumerate_partitions(m, theorem) if p.l >= 1):
        mu = sample_mu(part, d, F, seed=i)
        for alpha, vals in enumerate(mu.values):
            ok = _fermat_ok(F, vals, d)
            assert ok == mu.is_constrained(alpha)


def test_assignment_rejects_bad_ratios():
    part = Partition(2, (), ((1, 2),))
    with pytest.raises(ValueError):
        MuAssignment(part, 3, F13, ((5,),))
    with pytest.raises(ValueError):
        MuAssignment(part, 3, F13, ((0,),))
    MuAssignment(part, 3, F13, ((4,),))


def test_even_degree_unsolvable_mod_10007():
    # 10007 = 3 mod 4, so -1 is not a square and not a 4th power
    part = Partition(3, (3,), ((1, 2),))
    with pytest.raises(MuSamplingError):
        sample_mu(part, 4, GF(P), seed=0, enforce_bound=False)


def test_degree_bound_enforced():
    part = Partition(4, (), ((1, 2), (3, 4)))
    with pytest.raises(ValueError, match="below the degree bound"):
        sample_mu(part, 3, GF(P))


def test_diagonal_plane_example():
    part = Partition(5, (5,), ((1, 3), (2, 4)))
    mu = MuAssignment(part, 3, F13, ((4,), (10,)))
    Y = build_diagonal_plane(part, mu)
    assert Y.generators == ((1, 0, 4, 0, 0), (0, 1, 0, 10, 0))
    assert Y.dim == 2
    assert Y.subspace == Subspace.span(F13, 5, [(1, 0, 4, 0, 0), (0, 1, 0, 10, 0)])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_plane_dim_equals_l(seed):
    rng = np.random.default_rng(seed)
    parts = [p for p in enumerate_partitions(6, 2)]
    part = parts[int(rng.integers(len(parts)))]
    mu = sample_mu(part, 31, GF(P), rng)
    assert build_diagonal_plane(part, mu).dim == part.l


def test_intersection_bounded_by_min_l_and_n():
    spec = build_hypersurface(2, 2, seed=3, field=GF(P))
    V = plane_section_model(spec)
    rng = np.random.default_rng(1)
    for part in enumerate_partitions(4, 2):
        Y = build_diagonal_plane(part, sample_mu(part, 13, GF(P), rng))
        assert intersect(Y.subspace, V).dim <= min(part.l, V.dim)


def test_probe_is_deterministic():
    V = plane_section_model(build_hypersurface(2, 2, seed=1, field=GF(P)))
    a = probe(V, 2, 13, 200, seed=9).to_dict()
    b = probe(V, 2, 13, 200, seed=9).to_dict()
    assert a == b


def test_zero_trials_is_vacuous():
    V = plane_section_model(build_hypersurface(2, 2, seed=1, field=GF(P)))
    with pytest.warns(UserWarning, match="vacuous"):
        rep = probe(V, 2, 13, 0)
    assert rep.clean and rep.max_dim is None
    assert rep.warnings


def test_field_mismatch():
    V = plane_section_model(build_hypersurface(2, 2, seed=1, field=GF(P)))
    with pytest.raises(FieldMismatchError):
        probe(V, 2, 13, 5, field="p101")


def test_even_degree_probe_records_unsolvable():
    V = plane_section_model(build_hypersurface(3, 1, seed=2, field=GF(P)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = probe(V, 1, 16, 50, seed=0)
    assert rep.unsolvable and sum(rep.unsolvable.values()) == 50
    assert rep.max_dim is None


def test_theorem1_probe_with_suitable_prime():
    F = GF(10177)  # 10177 = 1 mod 32, so -1 is a 16th power
    V = plane_section_model(build_hypersurface(3, 1, seed=2, field=F))
    rep = probe(V, 1, 16, 300, seed=0)
    assert not rep.unsolvable
    assert rep.clean and rep.max_dim <= 1


def test_construct_bad_v_requires_two_classes():
    part = Partition(4, (3, 4), ((1, 2),))
    mu = sample_mu(part, 13, GF(P), enforce_bound=False)
    with pytest.raises(ValueError):
        construct_bad_V(part, mu, 2)


@pytest.mark.parametrize("n,theorem,d", [(2, 2, 13), (3, 2, 31)])
def test_bad_v_is_flagged(n, theorem, d):
    m = 4 if n == 2 else 6
    rigid = [p for p in enumerate_partitions(m, theorem) if p.l >= 2 and moduli_dim(p) == 0]
    assert rigid
    for s, part in enumerate(rigid):
        mu = sample_mu(part, d, GF(P), seed=s)
        V = construct_bad_V(part, mu, n, seed=s)
        assert V.dim == n + 1
        assert intersect(build_diagonal_plane(part, mu).subspace, V).dim >= 2
        rep = probe(V, theorem, d, 20, seed=s, partitions=[part])
        assert rep.verdict == "flagged" and rep.max_dim >= 2
