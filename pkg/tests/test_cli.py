import json

import pytest

from reglab import sweeps
from reglab.cli import EXIT_OK, EXIT_USAGE, main

RESIDUE_FIELD = {
    "ring": {"characteristic": 2, "variables": ["U", "V", "W"], "power_relations": {}},
    "kind": "cokernel",
    "module": {"row_twists": [0], "column_twists": [1, 1, 1], "entries": [["U", "V", "W"]]},
}


def test_example1_table(capsys):
    assert main(["example1", "--n-max", "3", "--quiet"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert "reg_tor" in lines[0].split()
    assert len(lines) == 2 + 3


def test_example2_json_has_ratio_summary(capsys):
    assert main(["example2", "--n-max", "3", "--format", "json", "--quiet"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert [row["reg_tor"] for row in payload["rows"]] == [3, 5, 9]
    assert payload["summary"]["ratio"]["max"] == "3"


def test_coefficient_ideals_csv(capsys):
    assert main(["coeff-ideals", "--n-max", "4", "--format", "csv", "--quiet"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("n,generators,reg_quotient")
    assert lines[4].startswith("4,3,9")


def test_invalid_settings_exit_with_usage_code(tmp_path):
    assert main(["example1", "--n-max", "0"]) == EXIT_USAGE
    bad = tmp_path / "bad.yaml"
    bad.write_text("colour: blue\n", encoding="utf-8")
    assert main(["example1", "--config", str(bad)]) == EXIT_USAGE
    assert main(["asymptotics", "--n-max", "4", "--quiet"]) == EXIT_USAGE


def test_reg_of_a_presentation_file(tmp_path, capsys):
    path = tmp_path / "residue.json"
    path.write_text(json.dumps(RESIDUE_FIELD), encoding="utf-8")
    assert main(["reg", str(path), "--format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["regularity"] == 0
    assert report["certified"] is True
    assert main(["reg", str(path)]) == EXIT_OK
    assert "regularity: 0" in capsys.readouterr().out


def test_reg_prints_the_truncated_resolution(tmp_path, capsys):
    path = tmp_path / "residue.json"
    path.write_text(json.dumps(RESIDUE_FIELD), encoding="utf-8")
    assert main(["reg", str(path), "--format", "json", "--homological-cap", "4"]) == EXIT_OK
    betti = json.loads(capsys.readouterr().out)["resolution"]["betti"]
    assert [(e["j"], e["d"], e["rank"]) for e in betti] == [(0, 0, 1), (1, 1, 3), (2, 2, 3), (3, 3, 1)]
    config = tmp_path / "short.yaml"
    config.write_text("homological_cap: 1\n", encoding="utf-8")
    assert main(["reg", str(path), "--config", str(config)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "minimal resolution" in text
    assert text.rstrip().endswith("0:   1    3")


def test_reg_errors(tmp_path):
    assert main(["reg", str(tmp_path / "absent.json")]) == EXIT_USAGE
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    assert main(["reg", str(broken)]) == EXIT_USAGE


def test_export_writes_the_layout(tmp_path, capsys):
    root = tmp_path / "out"
    assert main(["export", "--setup", "setup1", "--n-max", "2", "--output-root", str(root), "--quiet"]) == EXIT_OK
    directory = root / "setup1" / "m1_char0"
    assert capsys.readouterr().out.strip() == str(directory)
    names = sorted(p.name for p in (directory / "presentations").iterdir())
    assert names == ["coker_phi_n001.json", "coker_phi_n002.json", "coker_psi_n001.json", "coker_psi_n002.json"]
    records = [json.loads(line) for line in (directory / "runs.ndjson").read_text(encoding="utf-8").splitlines()]
    assert [record["n"] for record in records] == [1, 2]
    table = (directory / "closed_forms.csv").read_text(encoding="utf-8").splitlines()
    assert table[0].startswith("n,reg_tor")
    assert len(table) == 3
    assert main(["reg", str(directory / "presentations" / "coker_phi_n002.json")]) == EXIT_OK


def test_log_dir_option(tmp_path):
    assert main(["example1", "--n-max", "1", "--quiet", "--log-dir", str(tmp_path / "logs")]) == EXIT_OK
    assert (tmp_path / "logs" / "reglab.log").exists()


@pytest.mark.slow
def test_verify_small(capsys):
    assert main(["verify", "--m-only", "--n-bc", "6", "--n-ef", "6", "--format", "csv", "--quiet"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("check,params,passed,detail")


@pytest.mark.slow
def test_facts_and_asymptotics(capsys):
    assert main(["facts", "--n-max", "6", "--quiet"]) == EXIT_OK
    capsys.readouterr()
    assert main(["asymptotics", "--setup", "setup1", "--quantity", "ext", "--n-max", "10", "--quiet"]) == EXIT_OK
    assert "linear" in capsys.readouterr().out


def test_homological_cap_bounds_the_verify_exactness_depth(monkeypatch, capsys):
    seen = {}

    def record(setups, n_square=20, n_exact=6, degree_cap=12):
        seen["n_exact"] = n_exact
        return []

    monkeypatch.setattr(sweeps, "resolution_checks", record)
    for name in ("identity_checks", "minors_checks", "delta_checks", "res_coker_checks", "tensor_checks"):
        monkeypatch.setattr(sweeps, name, lambda *args, **kwargs: [])
    assert main(["verify", "--m-only", "--homological-cap", "3", "--format", "csv", "--quiet"]) == EXIT_OK
    assert seen["n_exact"] == 3
    assert main(["verify", "--m-only", "--format", "csv", "--quiet"]) == EXIT_OK
    assert seen["n_exact"] == 6


@pytest.mark.slow
def test_setup2_asymptotics_with_a_characteristic_in_the_config(tmp_path, capsys):
    config = tmp_path / "config.yaml"
    config.write_text("characteristic: 0\nn_max: 8\n", encoding="utf-8")
    args = ["asymptotics", "--setup", "setup2", "--quantity", "tor", "--config", str(config), "--quiet"]
    assert main(args) == EXIT_OK
    assert "ratio" in capsys.readouterr().out
