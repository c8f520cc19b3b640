"""Command-line interface: spec parsing, reports, exit codes."""

import json
from pathlib import Path

import pytest

from rinehart.cli import SpecError, load_spec, main, parse_spec

SPECS = Path(__file__).resolve().parent.parent / "specfiles"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


# -- the bundled spec files ----------------------------------------------------


def test_derham_hyperbola(capsys):
    code, rep = run_json(capsys, "derham", str(SPECS / "hyperbola.toml"))
    assert code == 0
    assert rep["schema_version"] == "1"
    assert rep["result"]["dims"][:2] == [1, 1]
    assert all(d == 0 for d in rep["result"]["dims"][2:])
    assert rep["result"]["stabilized"]


def test_logder_normal_crossing(capsys):
    code, rep = run_json(capsys, "logder", "--f", "x*y")
    assert code == 0
    result = rep["result"]
    assert result["free"] and result["saito"]
    assert result["rank"] == 2
    assert set(result["basis"]) == {"x*∂x", "y*∂y"}
    assert result["saito_determinant"] == "x*y"


def test_lr_cohomology_torus(capsys):
    code, rep = run_json(capsys, "lr-cohomology", str(SPECS / "ncd_log.toml"))
    assert code == 0
    assert rep["result"]["dims"] == [1, 2, 1]
    assert rep["result"]["stabilized"]


# -- report conventions -------------------------------------------------------


def test_json_is_deterministic(capsys):
    code1, rep1 = run_json(capsys, "lr-cohomology",
                           str(SPECS / "ncd_log.toml"))
    code2, rep2 = run_json(capsys, "lr-cohomology",
                           str(SPECS / "ncd_log.toml"))
    del rep1["timing_ms"], rep2["timing_ms"]
    assert code1 == code2 == 0
    assert json.dumps(rep1, sort_keys=True) == json.dumps(rep2,
                                                          sort_keys=True)


def test_echoed_input_round_trips(capsys):
    for name in ("hyperbola.toml", "ncd_log.toml", "abelian_pair.toml"):
        path = SPECS / name
        _, rep = run_json(capsys, "check", str(path))
        assert parse_spec(rep["input"]) == load_spec(str(path),
                                                     as_json=False)


def test_wedges_are_ascii_in_json_and_unicode_in_human_mode(capsys):
    _, rep = run_json(capsys, "lr-cohomology", str(SPECS / "ncd_log.toml"))
    top = rep["result"]["degrees"][2]["representatives"]
    assert top == ["ε1^ε2"]
    code, out, _ = run(capsys, "lr-cohomology", str(SPECS / "ncd_log.toml"))
    assert "ε1∧ε2" in out


def test_spec_json_alternative(capsys, tmp_path):
    spec = {
        "ring": {"vars": ["x", "y"], "ideal": ["x*y - 1"]},
        "options": {"d_max": 8, "window": 3},
    }
    path = tmp_path / "hyperbola.json"
    path.write_text(json.dumps(spec))
    code, rep = run_json(capsys, "derham", "--spec-json", str(path))
    assert code == 0
    assert rep["result"]["dims"][:2] == [1, 1]


def test_cli_flags_override_file_options(capsys):
    _, rep = run_json(capsys, "koszul", str(SPECS / "abelian_pair.toml"),
                      "--order", "2")
    assert rep["result"]["order"] == 2
    assert rep["input"]["options"]["order"] == 2


# -- the enveloping-side commands ---------------------------------------------


def test_koszul_command(capsys):
    code, rep = run_json(capsys, "koszul", str(SPECS / "abelian_pair.toml"))
    assert code == 0
    result = rep["result"]
    assert result["d_squared_zero"] and result["h0_isomorphic_to_base"]
    assert [h["dim"] for h in result["homology"]] == [1, 0, 0]


def test_hkr_command(capsys):
    for name in ("ncd_log.toml", "abelian_pair.toml"):
        code, rep = run_json(capsys, "hkr", str(SPECS / name))
        assert code == 0
        result = rep["result"]
        assert result["proj_alt_identity"]
        assert result["theta_coalgebra_morphism"]
        assert result["reduced_koszul_zero"]
        assert result["witnesses"] == []


def test_dual_hkr_command(capsys):
    code, rep = run_json(capsys, "dual-hkr", str(SPECS / "abelian_pair.toml"))
    assert code == 0
    assert rep["result"]["cobar_dims"] == [1, 2, 1]
    assert rep["result"]["ce_dims"] == [1, 2, 1]
    assert rep["result"]["match"]


def test_dual_hkr_rejects_nonzero_anchor(capsys):
    code, _, err = run(capsys, "dual-hkr", str(SPECS / "ncd_log.toml"))
    assert code == 1
    assert "precondition" in err


def test_check_command_reports_broken_axioms(capsys, tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text(
        '[ring]\nvars = []\nideal = []\n'
        '[lie_rinehart]\nrank = 3\nanchor = [[], [], []]\n'
        '[lie_rinehart.bracket]\n'
        '"1,2" = ["1", "0", "0"]\n"1,3" = ["1", "0", "0"]\n'
        '"2,3" = ["0", "1", "0"]\n')
    code, rep = run_json(capsys, "check", str(path))
    assert code == 2
    assert not rep["result"]["axioms"]["jacobi_ok"]
    assert rep["result"]["axioms"]["witnesses"]


def test_gb_command(capsys, tmp_path):
    path = tmp_path / "ideal.toml"
    path.write_text('[ring]\nvars = ["x", "y"]\n'
                    'ideal = ["x^2*y - 1", "x*y^2 - x"]\n')
    code, rep = run_json(capsys, "gb", str(path))
    assert code == 0
    basis = rep["result"]["basis"]
    assert basis == sorted(basis, key=basis.index)  # deterministic order
    assert len(basis) >= 2


# -- exit codes ----------------------------------------------------------------


def test_missing_file_is_a_parse_error(capsys):
    code, _, err = run(capsys, "derham", "nonexistent.toml")
    assert code == 1
    assert "error:" in err


def test_bad_toml_is_a_parse_error(capsys, tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[ring\nvars =")
    code, _, err = run(capsys, "derham", str(path))
    assert code == 1


def test_bad_polynomial_is_a_parse_error(capsys, tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text('[ring]\nvars = ["x"]\nideal = ["x +* 1"]\n')
    code, _, err = run(capsys, "derham", str(path))
    assert code == 1


def test_unknown_command_is_a_parse_error(capsys):
    code, _, err = run(capsys, "frobnicate", "x.toml")
    assert code == 1


def test_missing_spec_file_argument(capsys):
    code, _, err = run(capsys, "derham")
    assert code == 1
    assert "spec file" in err


def test_uncertified_divisor_exits_two_with_witness(capsys):
    code, rep = run_json(capsys, "logder", "--f", "x^2")
    assert code == 2
    assert not rep["result"]["free"]
    assert rep["result"]["witness"]["generators"]


def test_require_stable_exits_three(capsys, tmp_path):
    path = tmp_path / "towers.toml"
    path.write_text('[ring]\nvars = ["x", "y"]\nideal = []\n'
                    '[lie_rinehart]\nrank = 1\nanchor = [["x", "-y"]]\n')
    code, rep = run_json(capsys, "lr-cohomology", str(path))
    assert code == 0
    assert not rep["result"]["stabilized"]
    code, _, err = run(capsys, "lr-cohomology", str(path),
                       "--require-stable")
    assert code == 3


# -- spec validation ----------------------------------------------------------


def test_parse_spec_rejects_unknown_sections():
    with pytest.raises(SpecError):
        parse_spec({"ring": {"vars": []}, "mystery": {}})


def test_parse_spec_rejects_bad_bracket_keys():
    base = {"ring": {"vars": []},
            "lie_rinehart": {"rank": 2, "anchor": [[], []],
                             "bracket": {"2,1": ["0", "0"]}}}
    with pytest.raises(SpecError):
        parse_spec(base)


def test_parse_spec_rejects_undeclared_variables():
    with pytest.raises(SpecError):
        parse_spec({"ring": {"vars": ["x"], "ideal": ["x*z"]}})


def test_parse_spec_rejects_unknown_options():
    with pytest.raises(SpecError):
        parse_spec({"ring": {"vars": []}, "options": {"speed": 9}})
