import json
from importlib import resources

import jsonschema
import pytest

from fermat_waring.cli import DEFAULT_SEED, main
from fermat_waring.hypersurface import SparsePolynomial


def _schema(name):
    text = resources.files("fermat_waring").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, name, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    payload = json.loads(out)
    jsonschema.validate(payload, _schema(name))
    return code, payload


def test_default_seed():
    assert DEFAULT_SEED == 0xF2002


@pytest.mark.parametrize("n,theorem,m,expected", [(3, 1, 5, 0), (3, 1, 4, 2), (3, 2, 6, 0), (3, 2, 5, 2)])
def test_certify_exit_codes(capsys, n, theorem, m, expected):
    code, payload = run_json(capsys, "certify", "certify", "--n", str(n), "--theorem", str(theorem),
                             "--override-m", str(m))
    assert code == expected
    assert payload["verdict"] == ("pass" if expected == 0 else "fail")


def test_certify_text(capsys):
    code, out, _ = run(capsys, "certify", "--n", "2", "--theorem", "2")
    assert code == 0
    assert "verdict: PASS" in out


def test_build_and_expand(capsys, tmp_path):
    poly_file = tmp_path / "poly.json"
    code, payload = run_json(capsys, "build", "build", "--n", "2", "--theorem", "2", "--expand",
                             "--poly-out", str(poly_file))
    assert code == 0
    assert payload["spec"]["m"] == 4 and payload["spec"]["d"] == 13
    assert payload["plane_section"]["dim"] == 3
    assert payload["family_dimension"] == 11
    saved = json.loads(poly_file.read_text())
    jsonschema.validate(saved, _schema("polynomial"))
    assert saved == payload["polynomial"]
    poly = SparsePolynomial.from_dict(saved)
    assert poly.degree == 13 and len(poly) <= 105


def test_build_is_byte_identical(capsys):
    argv = ["build", "--n", "2", "--theorem", "1", "--seed", "7", "--json"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    _, third, _ = run(capsys, "build", "--n", "2", "--theorem", "1", "--seed", "8", "--json")
    assert third != first


def test_poly_out_needs_expand(capsys, tmp_path):
    code, _, err = run(capsys, "build", "--n", "2", "--theorem", "1", "--poly-out", str(tmp_path / "x"))
    assert code == 1
    assert "--expand" in err


def test_out_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "family-dim", "--n", "2", "--m", "4", "--json", "--out", str(target))
    assert code == 0 and out == ""
    payload = json.loads(target.read_text())
    jsonschema.validate(payload, _schema("family-dim"))
    assert payload["family_dimension"] == 11


def test_codim_plain_and_oracle(capsys):
    code, payload = run_json(capsys, "codim", "codim", "--m", "4", "--a", "2", "--b", "1", "--c", "2")
    assert code == 0 and payload["codim"] == 2
    code, payload = run_json(capsys, "codim", "codim", "--m", "3", "--a", "1", "--b", "1", "--c", "1",
                             "--oracle-q", "2")
    assert code == 0
    jsonschema.validate(payload["oracle"], _schema("gamma_estimate"))
    assert payload["oracle"]["verdict"] == "pass"


def test_codim_oracle_failure_exits_two(capsys):
    code, payload = run_json(capsys, "codim", "codim", "--m", "4", "--a", "2", "--b", "2", "--c", "2",
                             "--oracle-q", "2")
    assert code == 2
    assert payload["oracle"]["fraction_num"] == 1 and payload["oracle"]["fraction_den"] == 35


def test_codim_invalid_params(capsys):
    code, _, err = run(capsys, "codim", "--m", "3", "--a", "2", "--b", "1", "--c", "1")
    assert code == 1
    assert "invalid" in err


def test_count_rank(capsys):
    code, payload = run_json(capsys, "count-rank", "count-rank", "--k", "2", "--l", "2", "--r", "1", "--q", "2")
    assert code == 0 and payload["count"] == 10


def test_probe_clean(capsys):
    code, payload = run_json(capsys, "probe", "probe", "--n", "2", "--theorem", "2", "--trials", "200")
    assert code == 0
    assert payload["verdict"] == "clean" and payload["max_dim"] <= 1


def test_probe_bad_self_test(capsys):
    code, payload = run_json(capsys, "probe", "probe", "--n", "3", "--theorem", "2", "--trials", "20", "--bad")
    assert code == 0
    assert payload["self_test"] == "pass"
    assert payload["max_dim"] >= 2


def test_probe_rejects_rational_field(capsys):
    code, _, err = run(capsys, "probe", "--n", "2", "--theorem", "2", "--field", "q")
    assert code == 1 and "prime field" in err


def test_bad_usage(capsys):
    assert main(["certify", "--n", "2"]) == 1
    assert main([]) == 1
    capsys.readouterr()


def test_hex_seed(capsys):
    _, a, _ = run(capsys, "build", "--n", "2", "--theorem", "1", "--seed", "0xF2002", "--json")
    _, b, _ = run(capsys, "build", "--n", "2", "--theorem", "1", "--json")
    assert a == b


def test_seed_range(capsys):
    assert main(["family-dim", "--n", "2", "--m", "4", "--seed", "-1"]) == 1
    assert main(["family-dim", "--n", "2", "--m", "4", "--seed", str(2**64)]) == 1
    assert main(["family-dim", "--n", "2", "--m", "4", "--seed", str(2**64 - 1)]) == 0
    capsys.readouterr()
