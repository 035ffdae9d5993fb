import json
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from fermat_waring.fields import QQ, GF
from fermat_waring.hypersurface import (
    LinearForm,
    SparsePolynomial,
    build_hypersurface,
    evaluate,
    expand_power_sum,
    family_dimension,
    fermat_spec,
    linear_poly,
    monomial_count,
    multinomial_power,
    plane_section_model,
    poly_pow,
)
from fermat_waring.linalg import Matrix, Subspace, rank

SCHEMAS = Path(__file__).resolve().parents[1] / "src" / "fermat_waring" / "schemas"


def _points(rng, k, count=100):
    return [[int(x) for x in rng.integers(-1000, 1001, k)] for _ in range(count)]


def test_build_theorem1_n2():
    spec = build_hypersurface(2, 1, seed=3)
    assert (spec.m, spec.d, len(spec.forms)) == (3, 4, 3)
    assert rank(spec.coefficient_matrix()) == 3


def test_build_is_deterministic():
    a = build_hypersurface(3, 2, seed=42)
    b = build_hypersurface(3, 2, seed=42)
    assert a == b
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())
    assert expand_power_sum(a).to_json() == expand_power_sum(b).to_json()
    assert a != build_hypersurface(3, 2, seed=43)


@pytest.mark.parametrize("n,theorem", [(2, 1), (2, 2), (3, 1), (3, 2), (4, 2)])
def test_any_n_plus_1_forms_independent(n, theorem):
    import itertools

    spec = build_hypersurface(n, theorem, seed=1)
    rows = [f.coeffs for f in spec.forms]
    for idx in itertools.combinations(range(spec.m), n + 1):
        assert rank(Matrix(QQ, n + 1, n + 1, tuple(rows[i] for i in idx))) == n + 1


def test_build_field_constraints():
    with pytest.raises(ValueError):
        build_hypersurface(2, 2, seed=0, field=GF(13))  # p must exceed d = 13
    spec = build_hypersurface(2, 2, seed=0, field="p101")
    assert spec.field == GF(101)
    assert all(0 <= c < 101 for f in spec.forms for c in f.coeffs)


def test_degree_override_is_flagged():
    spec = build_hypersurface(2, 1, seed=0, d=6)
    assert spec.d == 6 and spec.overridden
    assert not build_hypersurface(2, 1, seed=0).overridden


def test_fermat_constructor():
    spec = fermat_spec(1, 2)
    assert expand_power_sum(spec).terms == {(2, 0): 1, (0, 2): 1}
    spec3 = fermat_spec(2, 5)
    assert expand_power_sum(spec3).terms == {(5, 0, 0): 1, (0, 5, 0): 1, (0, 0, 5): 1}


def test_binomial_square():
    h = LinearForm(QQ, (Fraction(1), Fraction(1)))
    assert poly_pow(linear_poly(h), 2).terms == {(2, 0): 1, (1, 1): 2, (0, 2): 1}


def test_squaring_matches_multinomial():
    rng = np.random.default_rng(9)
    for F in (QQ, GF(101)):
        for _ in range(20):
            k = int(rng.integers(2, 5))
            d = int(rng.integers(1, 9))
            coeffs = tuple(F.coerce(int(x)) for x in rng.integers(-9, 10, k))
            if all(c == 0 for c in coeffs):
                continue
            h = LinearForm(F, coeffs)
            assert poly_pow(linear_poly(h), d) == multinomial_power(h, d)


def test_theorem2_n2_expansion_dual_path():
    spec = build_hypersurface(2, 2, seed=2002)
    poly = expand_power_sum(spec)
    assert len(poly) <= monomial_count(3, 13) == 105
    assert all(sum(e) == 13 for e in poly.terms)
    rng = np.random.default_rng(17)
    for z in _points(rng, 3):
        assert evaluate(poly, z) == evaluate(spec, z)


@pytest.mark.parametrize("field", [QQ, GF(10007)])
@pytest.mark.parametrize("n,theorem", [(2, 1), (3, 1), (3, 2)])
def test_dual_path_and_homogeneity(field, n, theorem):
    spec = build_hypersurface(n, theorem, seed=n * 10 + theorem, field=field)
    poly = expand_power_sum(spec)
    assert all(sum(e) == spec.d for e in poly.terms)
    rng = np.random.default_rng(5)
    for z in _points(rng, n + 1):
        assert evaluate(poly, z) == evaluate(spec, z)


@pytest.mark.parametrize("field", [QQ, GF(101)])
def test_scaling(field):
    spec = build_hypersurface(2, 1, seed=4, field=field)
    rng = np.random.default_rng(8)
    for z in _points(rng, 3, 30):
        lam = field.coerce(int(rng.integers(1, 50)))
        scaled = [field.mul(lam, field.coerce(x)) for x in z]
        assert evaluate(spec, scaled) == field.mul(field.power(lam, spec.d), evaluate(spec, z))


def test_evaluate_on_hypersurface_mod5():
    spec = fermat_spec(1, 2, GF(5))
    assert evaluate(spec, [1, 2]) == 0
    assert evaluate(expand_power_sum(spec), [1, 2]) == 0


def test_evaluate_zero_point_warns():
    spec = build_hypersurface(2, 1, seed=0)
    with pytest.warns(UserWarning):
        assert evaluate(spec, [0, 0, 0]) == 0


def test_evaluate_dimension_mismatch():
    spec = build_hypersurface(2, 1, seed=0)
    with pytest.raises(ValueError):
        evaluate(spec, [1, 2])


@pytest.mark.parametrize("n,m,expected", [(2, 4, 11), (2, 3, 8), (3, 5, 19)])
def test_family_dimension(n, m, expected):
    assert family_dimension(n, m) == expected


def test_plane_section_model():
    ident = fermat_spec(2, 4)
    assert plane_section_model(ident) == Subspace.full(QQ, 3)
    V = plane_section_model(build_hypersurface(2, 1, seed=0))
    assert V.dim == 3 and V.ambient_dim == 3
    V = plane_section_model(build_hypersurface(2, 2, seed=0))
    assert (V.dim, V.ambient_dim, V.codim) == (3, 4, 1)


def test_plane_section_contains_form_values():
    spec = build_hypersurface(3, 2, seed=6)
    V = plane_section_model(spec)
    rng = np.random.default_rng(1)
    for z in _points(rng, 4, 10):
        image = [h([QQ.coerce(x) for x in z]) for h in spec.forms]
        assert V.contains(image)


def test_plane_section_dims_across_specs():
    for seed in range(5):
        for n, th in ((2, 1), (2, 2), (3, 1), (3, 2)):
            assert plane_section_model(build_hypersurface(n, th, seed=seed)).dim == n + 1


def test_polynomial_file_format():
    spec = build_hypersurface(2, 2, seed=1)
    poly = expand_power_sum(spec)
    data = json.loads(poly.to_json())
    jsonschema.validate(data, json.loads((SCHEMAS / "polynomial.schema.json").read_text()))
    exps = [t["exps"] for t in data["terms"]]
    assert exps == sorted(exps)
    assert SparsePolynomial.from_dict(data) == poly


def test_sparse_polynomial_invariants():
    with pytest.raises(ValueError):
        SparsePolynomial(QQ, 2, 2, {(1, 0): Fraction(1)})
    with pytest.raises(ValueError):
        SparsePolynomial(QQ, 2, 1, {(1, 0): Fraction(0)})


def test_monomial_cap():
    spec = build_hypersurface(2, 1, seed=0, d=2000)
    with pytest.raises(ValueError):
        expand_power_sum(spec)
