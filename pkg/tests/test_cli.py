import json
import subprocess
import sys

import pytest

from dfoliation.cli import main
from dfoliation.report import AnalysisConfig, AnalysisReport, InputError, parse_field_file, run_analysis


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(path)


def run(*args):
    return subprocess.run([sys.executable, "-m", "dfoliation", *args], capture_output=True, text=True)


def strip_timing(text):
    data = json.loads(text)
    data.pop("timing")
    return data


@pytest.fixture
def euler(tmp_path):
    return write(tmp_path, "euler.json", {"variables": ["x", "y"], "fields": ["x*dx + y*dy"]})


def test_analyze_euler(euler, tmp_path):
    out = tmp_path / "report.json"
    proc = run("analyze", "--input", euler, "--output", str(out))
    assert proc.returncode == 0, proc.stderr
    report = json.loads(out.read_text())
    assert report["rank_profile"] == {"rk": 1, "cork": 0, "irr": 1}
    assert report["d_irr"]["d_irr"] == 1 and report["d_irr"]["irr"] == 1
    assert report["d_irr"]["d_irr_equals_irr"]
    assert report["witness"] == {"exists": True, "point": ["0", "0"]}
    assert set(report["timing"]) >= {"rank", "cohomology", "witness"}


def test_analyze_regular(tmp_path):
    path = write(tmp_path, "regular.json", {"variables": ["x", "y"], "fields": ["dx"]})
    proc = run("analyze", "--input", path)
    assert proc.returncode == 0, proc.stderr
    report = json.loads(proc.stdout)
    assert report["rank_profile"]["irr"] == 0
    assert report["d_irr"]["d_irr"] == 0
    assert report["cohomology"]["dims"][1] == [0] * 7
    assert report["first_integrals"]["basis"] == ["1", "y", "y^2", "y^3"]


def test_parse_error_exit_code_and_offset(tmp_path):
    path = write(tmp_path, "bad.json", {"variables": ["x", "y"], "fields": ["x*d"]})
    proc = run("analyze", "--input", path)
    assert proc.returncode == 2
    assert "offset 2" in proc.stderr
    broken = write(tmp_path, "broken.json", '{"variables": ["x"], "fields": [x')
    proc = run("check", "--input", broken)
    assert proc.returncode == 2 and "offset" in proc.stderr


@pytest.mark.parametrize(
    "data",
    [
        {"variables": ["x", "y"], "fields": ["dx*dx"]},
        {"variables": ["x", "y"], "fields": ["x + dx"]},
        {"variables": ["x", "y"], "fields": []},
        {"variables": "x", "fields": ["dx"]},
        {"variables": ["x", "x"], "fields": ["dx"]},
        {"variables": ["x"], "fields": ["dx"], "extra": 1},
        {"variables": ["x", "y"], "poisson": [["0", "1"], ["1", "0"]]},
    ],
)
def test_schema_and_contract_violations(tmp_path, data):
    path = write(tmp_path, "in.json", data)
    with pytest.raises(InputError):
        parse_field_file(path)
    assert main(["check", "--input", path]) == 2


def test_io_errors(tmp_path, euler):
    assert run("analyze", "--input", str(tmp_path / "missing.json")).returncode == 1
    proc = run("analyze", "--input", euler, "--only", "rank", "--output", str(tmp_path / "no" / "dir" / "r.json"))
    assert proc.returncode == 1


@pytest.mark.parametrize(
    "fields, code, message",
    [
        (["x*dx", "y*dy"], 0, "ok"),
        (["x*dy", "y*dx"], 3, "generators 0 and 1"),
        (["dx", "x*dy"], 3, "dy"),
    ],
)
def test_check(tmp_path, fields, code, message):
    path = write(tmp_path, "in.json", {"variables": ["x", "y"], "fields": fields})
    proc = run("check", "--input", path)
    assert proc.returncode == code
    assert message in proc.stdout


def test_check_reports_commutator(tmp_path, capsys):
    path = write(tmp_path, "in.json", {"variables": ["x", "y"], "fields": ["dx", "x*dy"]})
    assert main(["check", "--input", path]) == 3
    # [dx, x*dy] = dy is not in the module either, so closure is what fails first
    assert "dy" in capsys.readouterr().out


def test_hypothesis_failure_still_emits_report(tmp_path):
    path = write(tmp_path, "in.json", {"variables": ["x", "y"], "fields": ["x*dx", "x*dy"]})
    out = tmp_path / "r.json"
    proc = run("analyze", "--input", path, "--only", "rank,hypotheses,cohomology", "--output", str(out))
    assert proc.returncode == 3
    report = json.loads(out.read_text())
    assert report["rank_profile"] == {"rk": 2, "cork": 0, "irr": 2}
    assert report["hypotheses"]["passed"] is False
    assert "error" in report["cohomology"]
    assert report["hypothesis_failure"]


def test_independent_phases_do_not_need_hypotheses(tmp_path):
    path = write(tmp_path, "in.json", {"variables": ["x", "y"], "fields": ["x*dy", "y*dx"]})
    proc = run("analyze", "--input", path, "--only", "lie,rank,witness")
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["lie_closure"]["failing_pair"] == [0, 1]
    assert report["lie_closure"]["bracket"] == "x*dx - y*dy"


def test_poisson_input(tmp_path):
    path = write(tmp_path, "p.json", {"variables": ["x", "y"], "poisson": [["0", "1"], ["-1", "0"]]})
    proc = run("analyze", "--input", path, "--only", "rank,hypotheses")
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["input"]["fields"] == ["dy", "-dx"]
    assert report["rank_profile"] == {"rk": 2, "cork": 2, "irr": 0}


def test_bad_phase_is_rejected(euler):
    proc = run("analyze", "--input", euler, "--only", "rank,bogus")
    assert proc.returncode == 2


CORPUS = [
    (["x", "y"], ["x*dx + y*dy"]),
    (["x", "y"], ["dx"]),
    (["x", "y"], ["x*dx", "y*dy"]),
    (["x"], ["x*dx"]),
    (["x", "y"], ["x*dy"]),
    (["x"], ["(x^2+1)*dx"]),
]


@pytest.mark.parametrize("variables, fields", CORPUS)
def test_report_round_trip_and_determinism(tmp_path, variables, fields):
    path = write(tmp_path, "in.json", {"variables": variables, "fields": fields})
    config = AnalysisConfig(input=path, truncation=4)
    presentation = parse_field_file(path)
    report = run_analysis(presentation, config)
    assert AnalysisReport.from_json(report.to_json()) == report
    again = run_analysis(parse_field_file(path), config)
    assert again.to_json(timing=False) == report.to_json(timing=False)


def test_cli_output_is_deterministic(euler, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert run("analyze", "--input", euler, "--truncation", "4", "--output", str(out)).returncode == 0
    assert strip_timing(a.read_text()) == strip_timing(b.read_text())
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    da.pop("timing"), db.pop("timing")
    assert json.dumps(da) == json.dumps(db)


def test_config_invariants():
    with pytest.raises(ValueError):
        AnalysisConfig(truncation=0)
    with pytest.raises(ValueError):
        AnalysisConfig(koszul_cap=-1)
