import json

import pytest

from tcss.cli import EXIT_BAD_SPEC, EXIT_OK, EXIT_VERIFY_FAILED, main


@pytest.fixture
def spec_dir(tmp_path):
    (tmp_path / "q3.json").write_text(json.dumps({"p": 3, "f": 1, "e": 1, "mu": [1]}))
    (tmp_path / "q2s2.toml").write_text("p = 2\nf = 1\ne = 2\neisenstein_mid = [[0]]\nmu = [1]\n")
    (tmp_path / "bad.json").write_text(json.dumps({"p": 4, "f": 1, "e": 1, "mu": [1]}))
    (tmp_path / "ram.json").write_text(json.dumps({"p": 3, "f": 1, "e": 2, "eisenstein_mid": [[0]], "mu": [1]}))
    return tmp_path


def _json(capsys):
    out = capsys.readouterr().out
    return json.loads(out)


def test_field_json(spec_dir, capsys):
    assert main(["field", "--input", str(spec_dir / "q2s2.toml"), "--format", "json"]) == EXIT_OK
    js = _json(capsys)
    assert js["schema"] == "tcss/1"
    assert js["field"]["d"] == 1
    assert js["field"]["mu_bar"] == [1]


def test_bad_spec_exit_code(spec_dir, capsys):
    assert main(["field", "--input", str(spec_dir / "bad.json")]) == EXIT_BAD_SPEC
    assert "error" in capsys.readouterr().err
    assert main(["field", "--input", str(spec_dir / "missing.json")]) == EXIT_BAD_SPEC
    assert main(["hh-appendix"]) == EXIT_BAD_SPEC


def test_argument_validation():
    with pytest.raises(SystemExit):
        main(["thh-e2", "--input", "x.json", "--degree-cap", "0"])
    with pytest.raises(SystemExit):
        main(["nonsense"])


def test_thh_e2(spec_dir, capsys):
    assert main(["thh-e2", "--input", str(spec_dir / "ram.json"), "--degree-cap", "6",
                 "--format", "json"]) == EXIT_OK
    js = _json(capsys)
    assert js["match"] and len(js["thh_e2"]) == 7


def test_ss_roundtrip(spec_dir, capsys):
    assert main(["ss", "--input", str(spec_dir / "q3.json"), "--variant", "TCminus",
                 "--j-min", "0", "--j-max", "2", "--n-cap", "30", "--format", "json"]) == EXIT_OK
    js = _json(capsys)
    assert js["variant"] == "TCminus" and js["page"] == "inf"
    assert json.loads(json.dumps(js)) == js


def test_tc_tables(spec_dir, capsys):
    assert main(["tc", "--input", str(spec_dir / "q3.json"), "--format", "json"]) == EXIT_OK
    js = _json(capsys)
    rows = {r["degree"]: r["orders"] for r in js["homotopy"]}
    assert rows[-1] == [3] and rows[3] == [3, 3]
    assert main(["tc-e2", "--input", str(spec_dir / "q3.json")]) == EXIT_OK
    assert "column -1: rank 4" in capsys.readouterr().out


def test_output_is_deterministic(spec_dir, capsys):
    args = ["tc-e2", "--input", str(spec_dir / "ram.json"), "--format", "json"]
    main(args)
    first = capsys.readouterr().out
    main(args)
    assert capsys.readouterr().out == first


def test_verify_single_field(spec_dir, capsys):
    code = main(["verify", "--input", str(spec_dir / "ram.json"), "--degree-cap", "6",
                 "--n-cap", "60", "--format", "json"])
    assert code == EXIT_OK
    assert _json(capsys)["pass"]


def test_verify_failure_exit_code(monkeypatch, spec_dir, capsys):
    from tcss import descent

    real = descent.crosscheck_with_specseq

    def broken(field, js, cap):
        rep = real(field, js, cap)
        return descent.CrosscheckReport(rep.field_label, rep.compared,
                                        (descent.Mismatch("TP", 1, 0, (1,), ()),))

    monkeypatch.setattr(descent, "crosscheck_with_specseq", broken)
    code = main(["verify", "--input", str(spec_dir / "q3.json"), "--degree-cap", "4", "--n-cap", "30"])
    assert code == EXIT_VERIFY_FAILED
    assert "FAIL" in capsys.readouterr().out


def test_hh_appendix(capsys):
    assert main(["hh-appendix", "--p", "3", "--e", "2", "--format", "json"]) == EXIT_OK
    js = _json(capsys)
    assert js["pass"] and js["kdims"][0] == 2
