"""The command-line front end: every command, exit codes, determinism and rechecks."""
import json
import subprocess
import sys
from pathlib import Path

import pytest

from dgsheaf import cli
from dgsheaf.errors import CertificationError
from dgsheaf.problem import SCHEMA, load_problem
from dgsheaf.parsing import ParseError

PROBLEMS = Path(__file__).parent / "problems"


def run(tmp_path, name, *args):
    out = tmp_path / "report.json"
    code = cli.run(["--input", str(PROBLEMS / name), "--out", str(out), *args])
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report


COMMAND_CASES = [
    ("koszul.json", "validate"), ("koszul.json", "stalk"), ("koszul.json", "cohomology"),
    ("koszul.json", "resolve"), ("koszul.json", "certify"), ("koszul.json", "qiso"),
    ("koszul.json", "dtensor"), ("koszul.json", "ore-square"), ("transverse.json", "intersect"),
    ("transverse.json", "oracle-compare"), ("cylinder.json", "homotopy-check"),
    ("double_point.json", "cotangent"),
]


@pytest.mark.parametrize("fname,command", COMMAND_CASES)
def test_every_command_succeeds_with_recheck(tmp_path, fname, command):
    code, report = run(tmp_path, fname, "--command", command, "--recheck")
    assert code == 0
    assert report["command"] == command
    assert {"command", "window", "q_max", "seed", "per_point", "checks"} <= set(report)
    assert all(v in ("pass", "skip") for v in report["checks"].values()), report["checks"]


def test_all_commands_covered():
    assert sorted({c for _, c in COMMAND_CASES}) == sorted(cli.COMMANDS)


def test_intersect_transverse_lines(tmp_path, capsys):
    code, report = run(tmp_path, "transverse.json", "--window", "-3:0")
    assert code == 0
    pt = report["per_point"]["pt"]
    assert pt["0"]["rank"] == 1 and pt["-1"]["rank"] == 0
    assert report["checks"]["oracle_match"] == "pass"
    assert "oracle-match: true" in capsys.readouterr().out


def test_resolve_certificate_table_all_pass(tmp_path):
    code, report = run(tmp_path, "koszul.json", "--command", "resolve", "--qmax", "2")
    assert code == 0
    entries = report["certificate"]["entries"]
    assert entries and all(e["status"] == "pass" for e in entries)
    assert any(e["condition"].startswith("(ii)") for e in entries)


def test_malformed_poset_exits_1_naming_the_pair(tmp_path, capsys):
    code, report = run(tmp_path, "bad_poset.json")
    assert code == 1
    assert "antisymmetry violated at (a,b)" in capsys.readouterr().err
    assert report["error"]["exit_code"] == 1


def test_parse_errors_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"space": {"points": ["pt"]}, "rings": [{"name": "A", "generators": [{"id": "x", "degree": 0}],'
                   ' "relations": ["x +* 1"]}], "command": {"name": "stalk"}}')
    assert cli.run(["--input", str(bad)]) == 1
    assert "rings/0" in capsys.readouterr().err
    bad.write_text("{not json")
    assert cli.run(["--input", str(bad)]) == 1
    assert cli.run(["--input", str(tmp_path / "missing.json")]) == 1
    bad.write_text('{"space": {"points": ["pt"]}, "command": {"name": "nope"}}')
    assert cli.run(["--input", str(bad)]) == 1
    with pytest.raises(SystemExit) as exc:
        cli.run(["--input", str(PROBLEMS / "koszul.json"), "--command", "nope"])
    assert exc.value.code == 1


def test_precondition_violations_exit_2(tmp_path):
    # the window reaches below what q_max certifies
    code, report = run(tmp_path, "transverse.json", "--qmax", "1", "--window", "-3:0")
    assert code == 2 and report["error"]["kind"] == "precondition"
    code, _ = run(tmp_path, "koszul.json", "--command", "ore-square")
    assert code == 0
    # proj : K[x] -> K[x]/(x) is not a quasi-isomorphism, so it cannot enter an Ore square
    data = json.loads((PROBLEMS / "koszul.json").read_text())
    data["command"]["morphisms"] = ["proj", "idB"]
    path = tmp_path / "k.json"
    path.write_text(json.dumps(data))
    assert cli.run(["--input", str(path), "--command", "ore-square"]) == 2


def test_validate_reports_bad_differential_with_exit_2(tmp_path):
    data = json.loads((PROBLEMS / "koszul.json").read_text())
    data["morphisms"].append({"name": "bad", "source": "A", "target": "Kos", "images": {"x": "x"}})
    data["rings"].append({"name": "D", "base": "A", "generators": [{"id": "e", "degree": -1},
                                                                   {"id": "f", "degree": -2}],
                          "differential": {"e": "x", "f": "x*e"}})
    data["command"] = {"name": "validate"}
    path = tmp_path / "v.json"
    path.write_text(json.dumps(data))
    out = tmp_path / "v.out.json"
    assert cli.run(["--input", str(path), "--out", str(out)]) == 2
    checks = json.loads(out.read_text())["checks"]
    assert checks["ring:D"] == "fail" and checks["ring:Kos"] == "pass"


def test_engine_failure_exits_3(tmp_path, monkeypatch):
    def broken(*a, **k):
        raise CertificationError("simulated")
    monkeypatch.setattr(cli, "resolve", broken)
    code, report = run(tmp_path, "koszul.json", "--command", "resolve")
    assert code == 3 and report["error"]["kind"] == "certification"


def test_failed_recheck_exits_3(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "linear_cohomology_dimension", lambda C, n: 99)
    code, report = run(tmp_path, "koszul.json", "--command", "cohomology", "--recheck")
    assert code == 3
    assert "fail" in report["checks"].values()


def test_usage_errors_exit_1():
    with pytest.raises(SystemExit) as exc:
        cli.run([])
    assert exc.value.code == 1


def test_window_flag_forms_agree(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    src = str(PROBLEMS / "transverse.json")
    assert cli.run(["--input", src, "--window", "-2:0", "--out", str(a)]) == 0
    assert cli.run(["--input", src, "--window=-2:0", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["window"] == [-2, 0]


@pytest.mark.parametrize("fname,command", [("transverse.json", "intersect"), ("koszul.json", "dtensor"),
                                           ("koszul.json", "resolve")])
def test_reports_are_byte_identical_across_processes(tmp_path, fname, command):
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        proc = subprocess.run([sys.executable, "-m", "dgsheaf", "--input", str(PROBLEMS / fname),
                               "--command", command, "--seed", "3", "--out", str(out)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    text = outs[0].decode()
    assert json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n" == text


def test_stdout_report_and_no_file_without_out(tmp_path, capsys):
    assert cli.run(["--input", str(PROBLEMS / "koszul.json"), "--command", "stalk", "--out", "-"]) == 0
    out = capsys.readouterr().out
    assert json.loads(out[out.index("{"):])["command"] == "stalk"
    assert cli.run(["--input", str(PROBLEMS / "koszul.json"), "--command", "stalk"]) == 0
    assert "{" not in capsys.readouterr().out


def test_example_problems_match_schema():
    for path in PROBLEMS.glob("*.json"):
        data = json.loads(path.read_text())
        if path.name == "bad_poset.json":
            continue
        load_problem(data)
    assert SCHEMA["properties"]["command"]["required"] == ["name"]
    with pytest.raises(ParseError, match="schema error"):
        load_problem({"space": {"points": []}, "command": {"name": "validate"}})
