import json

import pytest

from transdirac import ValidationError
from transdirac.cli import RunConfig, main, run
from transdirac.io import canonical_json, validate_report


def write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_circle_dirac_csv(tmp_path):
    out = tmp_path / "spectrum.csv"
    code = main(["run", "--config", write(tmp_path, {"command": "circle-dirac", "M": 5}),
                 "--format", "csv", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "eigenvalue,multiplicity"
    assert [int(x.split(",")[0]) for x in lines[1:]] == list(range(-5, 6))


def test_carriere_json(tmp_path):
    out = tmp_path / "c.json"
    cfg = {"command": "carriere", "lambda": 2.618, "N": 32, "twisted": True}
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    validate_report(doc)
    assert doc["result"]["betti"] == [0, 0, 0]


def test_strata_euler(tmp_path, capsys):
    cfg = {"command": "strata-euler", "dataset": "z4_torus.json", "rho": "rho1"}
    assert main(["run", "--config", write(tmp_path, cfg)]) == 0
    assert json.loads(capsys.readouterr().out)["result"]["value"] == -1


@pytest.mark.parametrize("cfg", [
    {"command": "circle-dirac", "M": 5, "bogus": 1},
    {"command": "circle-dirac"},
    {"command": "nope"},
    {"command": "circle-dirac", "M": 5, "tol": -1.0},
    {"command": "circle-dirac", "M": 2.5},
    {"command": "hodge-star", "metric": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "form": {"0": 1}, "star": "bigstar"},
    {"command": "carriere", "lambda": 0.5, "N": 32},
])
def test_validation_failures_exit_2(tmp_path, capsys, cfg):
    assert main(["run", "--config", write(tmp_path, cfg)]) == 2
    assert "validation error" in capsys.readouterr().err


def test_csv_only_for_spectra(tmp_path):
    cfg = {"command": "gauss-bonnet", "dataset": "carriere"}
    assert main(["run", "--config", write(tmp_path, cfg), "--format", "csv"]) == 2


def test_contract_violation_exit_3(tmp_path, capsys):
    cfg = {"command": "heat-supertrace", "matrix": [[1, 2, 3], [2, 4, 6]], "t": [10.0]}
    assert main(["run", "--config", write(tmp_path, cfg), "--tol", "1e-300"]) == 3
    assert "supertrace_integrality" in capsys.readouterr().err


def test_missing_config_exit_2(tmp_path):
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2


@pytest.mark.parametrize("cfg", [
    {"command": "dirac-t2", "M": 2},
    {"command": "harmonic-dims", "n": 3, "M": 1},
    {"command": "warped-dl", "N": 64},
    {"command": "warped-dq", "n": 2, "N": 64},
    {"command": "slope-dq", "r": 1.5, "M": 2},
    {"command": "mean-curvature", "geometry": "heisenberg", "which": "HL", "points": [[0.1, 0.2, 0.3]]},
    {"command": "conformal-shift", "lambda": 2.618, "N": 16},
    {"command": "lefschetz-euler", "rho": "rho3"},
    {"command": "hodge-star", "metric": [[2, 0], [0, 1]], "form": {"0": [1, 1]}},
])
def test_every_command_roundtrips(cfg):
    text = run(RunConfig.from_dict(cfg))
    validate_report(json.loads(text))


def test_output_is_deterministic(tmp_path):
    cfg = write(tmp_path, {"command": "warped-dl", "N": 64})
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["run", "--config", cfg, "--out", str(a), "--threads", "4"]) == 0
    assert main(["run", "--config", cfg, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_canonical_json_format():
    text = canonical_json({"b": 0.1, "a": [1, 2.0], "c": {"z": None, "y": True}})
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert "0.10000000000000001" in text and "2.0" in text


def test_report_schema_rejects_missing_keys():
    with pytest.raises(ValidationError):
        validate_report({"kind": "spectrum", "command": "x", "result": {"eigenvalues": []}})


def test_acceptance_cli(capsys):
    assert main(["acceptance", "--suite", "euler"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert sum(line.startswith("[PASS]") for line in out) == 8


def test_unknown_suite_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["acceptance", "--suite", "nope"])
    assert exc.value.code == 2
