import json

import pytest

from intsing.cli import main


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def test_verify_kovalevskaya(capsys):
    code, out = run_cli(
        ["verify", "--model", "kovalevskaya", "--g", "0.5", "--samples", "200"], capsys
    )
    assert code == 0
    report = json.loads(out)
    assert report["pass"] is True
    assert report["commutation"]["max_residual"] <= 1e-9
    assert report["jacobi"]["max_residual"] <= 1e-10


def test_verify_canonical(capsys):
    code, out = run_cli(["verify", "--model", "canonical:0,1,1,0", "--samples", "50"], capsys)
    assert code == 0
    assert json.loads(out)["commutation"]["max_residual"] == 0.0


def test_verify_adversarial_model_fails(tmp_path, capsys):
    bad = {
        "coordinates": ["x", "y"],
        "parameters": {},
        "structure": "canonical",
        "casimirs": [],
        "components": ["x", "y"],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, out = run_cli(["verify", "--model", str(path), "--samples", "20"], capsys)
    assert code == 1
    report = json.loads(out)
    assert report["commutation"]["pass"] is False
    assert report["commutation"]["worst_pair"] == [0, 1]


def test_classify_kovalevskaya_vertex(capsys):
    code, out = run_cli(
        ["classify", "--model", "kovalevskaya", "--g", "0.5", "--point", "R1=1,S1=0.5"], capsys
    )
    assert code == 0
    result = json.loads(out)
    assert result["rank"] == 0
    w = result["williamson"]
    assert (w["k_e"], w["k_h"], w["k_f"]) == (0, 2, 0)


def test_classify_canonical_focus(capsys):
    code, out = run_cli(["classify", "--model", "canonical:0,0,0,1", "--point", ""], capsys)
    assert code == 0
    w = json.loads(out)["williamson"]
    assert (w["k_e"], w["k_h"], w["k_f"]) == (0, 0, 1)


def test_classify_regular_point(capsys):
    code, out = run_cli(
        ["classify", "--model", "canonical:0,0,0,1", "--point", "x1=0.3,y1=0.4,x2=0.1"], capsys
    )
    assert code == 0
    result = json.loads(out)
    assert result["status"] == "regular"
    assert result["rank"] == 2


def test_atoms_check_builtin(capsys):
    code, out = run_cli(["atoms", "check", "--name", "(B*C2)/Z2"], capsys)
    assert code == 0
    result = json.loads(out)
    assert result["complexity"] == 1
    assert result["iv"] is True and result["vi"] is True
    assert result["verdict"] == "stable-analytic-strong-sense"


def test_atoms_check_c2_trivial(capsys):
    code, out = run_cli(["atoms", "check", "--name", "C2"], capsys)
    assert code == 0
    result = json.loads(out)
    assert result["complexity"] == 2
    assert result["iv"] is False and result["vi"] is False
    assert result["verdict"] == "criterion-not-satisfied"


def test_atoms_check_non_free_action_errors(tmp_path, capsys):
    spec = {
        "components": ["B"],
        "group": "Z2",
        "action": [{"perms": {"e": [0], "g": [0]}, "fiber_free": {"e": False, "g": False}}],
    }
    path = tmp_path / "bad_product.json"
    path.write_text(json.dumps(spec))
    code, out = run_cli(["atoms", "check", "--product", str(path)], capsys)
    assert code == 1
    assert "not free" in json.loads(out)["error"]


def test_atoms_check_file_spec(tmp_path, capsys):
    spec = {
        "name": "(C2*C2)/Z2-file",
        "components": ["C2", "C2"],
        "group": "Z2",
        "action": [
            {"perms": {"e": [0, 1], "g": [1, 0]}},
            {"perms": {"e": [0, 1], "g": [1, 0]}},
        ],
    }
    path = tmp_path / "product.json"
    path.write_text(json.dumps(spec))
    code, out = run_cli(["atoms", "check", "--product", str(path)], capsys)
    assert code == 0
    result = json.loads(out)
    assert result["complexity"] == 2
    assert result["verdict"] == "stable-analytic-strong-sense"


def test_atoms_list_reports_exceptions(capsys):
    code, out = run_cli(["atoms", "list"], capsys)
    assert code == 0
    data = json.loads(out)
    names = {e["name"] for e in data["exceptions"]}
    assert names == {"(K3*K3)/(Z4+Z2)", "(C1*K3)/Z4"}


def test_trace_canonical_svg(tmp_path, capsys):
    svg = tmp_path / "d.svg"
    code, out = run_cli(
        [
            "trace",
            "--model",
            "canonical:1,0,1,0",
            "--resolution",
            "5",
            "--step",
            "0.1",
            "--value-bound",
            "1.2",
            "--out",
            str(svg),
        ],
        capsys,
    )
    assert code == 0
    text = svg.read_text()
    assert text.count("<polyline") == 1
    assert "hyperbolic-family" in text


def test_kovalevskaya_report_g0(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code, _ = run_cli(["kovalevskaya", "report", "--g", "0", "--out", str(out_path)], capsys)
    assert code == 0
    report = json.loads(out_path.read_text())
    assert report["regime"] == "a"
    values = sorted(tuple(round(x, 9) for x in v["value"]) for v in report["vertices"])
    assert values == [(-1.0, 1.0), (1.0, 1.0)]


def test_kovalevskaya_report_regime_e(capsys):
    code, out = run_cli(["kovalevskaya", "report", "--g", "1.6"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["regime"] == "e"
    types = sorted(tuple(v["type"]) for v in report["vertices"])
    assert types == [(1, 1, 0), (2, 0, 0)]
    assert report["matches_expected"] is True


def test_reports_are_byte_identical(capsys):
    _, out1 = run_cli(["kovalevskaya", "report", "--g", "0.5", "--seed", "0"], capsys)
    _, out2 = run_cli(["kovalevskaya", "report", "--g", "0.5", "--seed", "0"], capsys)
    assert out1 == out2

    _, v1 = run_cli(["verify", "--model", "kovalevskaya", "--g", "0.5", "--samples", "100"], capsys)
    _, v2 = run_cli(["verify", "--model", "kovalevskaya", "--g", "0.5", "--samples", "100"], capsys)
    assert v1 == v2
