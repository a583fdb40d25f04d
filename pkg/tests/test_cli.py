"""Command-line behaviour: exit codes, JSON/text agreement, determinism, golden reports.

Golden reports live in ``tests/golden``; set ``INDLOGIC_UPDATE_GOLDEN=1`` to
rewrite them after an intentional output change.
"""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from indlogic.cli import main
from indlogic.registry import EXAMPLES
from indlogic.report import render_text

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("INDLOGIC_UPDATE_GOLDEN") == "1"
FAST = [e.name for e in EXAMPLES if e.name not in ("three-balls", "random-number-defined")]


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name", [e.name for e in EXAMPLES])
def test_golden_reports(capsys, name):
    code, out, _ = run_cli(capsys, "example", name, "--json")
    path = GOLDEN / f"{name}.json"
    if UPDATE:
        GOLDEN.mkdir(exist_ok=True)
        path.write_text(out, encoding="utf-8")
    assert out == path.read_text(encoding="utf-8")
    assert code == (2 if json.loads(out)["verdict"] == "inconsistent" else 0)


@pytest.mark.parametrize("name", FAST)
def test_text_is_rendered_from_the_json_report(capsys, name):
    for extra in ((), ("--explain",)):
        _, js, _ = run_cli(capsys, "example", name, "--json", *extra)
        _, text, _ = run_cli(capsys, "example", name, *extra)
        assert render_text(json.loads(js)) == text


def test_reports_are_deterministic(capsys):
    first = run_cli(capsys, "poi", "two-balls", "--json", "--explain")
    second = run_cli(capsys, "poi", "two-balls", "--json", "--explain")
    assert first == second
    report = json.loads(first[1])
    assert report["schema"] == "indlogic-report/1"
    assert all(isinstance(v, str) for r in report["results"] for k, v in r.items() if k in ("value", "lower"))


def test_exit_codes(capsys, tmp_path):
    assert run_cli(capsys, "derive", "mathse-half")[0] == 0
    assert run_cli(capsys, "derive", "mathse-quarter")[0] == 2
    assert run_cli(capsys, "consistency", "mathse-quarter")[0] == 2
    code, _, err = run_cli(capsys, "derive", str(tmp_path / "missing.prob"))
    assert code == 1 and err.startswith("error:")
    bad = tmp_path / "bad.prob"
    bad.write_text("vars a;\nassume P(b) = 1/2;\n")
    code, _, err = run_cli(capsys, "derive", str(bad))
    assert code == 1 and "line 2, column 10" in err
    assert run_cli(capsys, "frobnicate")[0] == 1
    assert run_cli(capsys, "derive", "mathse-half", "--bound", "0")[0] == 1
    assert run_cli(capsys, "example", "no-such-example")[0] == 1
    assert run_cli(capsys, "bertrand")[0] == 1


def test_problem_files_from_disk(capsys, tmp_path):
    f = tmp_path / "p.prob"
    f.write_text("vars a, b;\nassume P(a) = 1/2;\nassume P(b | a) = 1/2;\nquery P(a & b);\n")
    code, out, _ = run_cli(capsys, "derive", str(f), "--json")
    res = json.loads(out)["results"][0]
    assert code == 0 and res["status"] == "forced" and res["value"] == "1/4"
    code, out, _ = run_cli(capsys, "check", str(f), "--json")
    assert code == 0 and json.loads(out)["command"] == "check"


def test_example_list(capsys):
    code, out, _ = run_cli(capsys, "example", "--list", "--json")
    names = [e["name"] for e in json.loads(out)["examples_list"]]
    assert code == 0 and names == [e.name for e in EXAMPLES]
    code, text, _ = run_cli(capsys, "example")
    assert code == 0 and all(n in text for n in names)


def test_bertrand_command(capsys):
    code, out, _ = run_cli(capsys, "bertrand", "--scheme", "midpoint", "--exact", "--json")
    assert code == 0 and "1/4" in out
    a = run_cli(capsys, "bertrand", "--scheme", "radius", "--mc", "20000", "--seed", "3", "--json")
    b = run_cli(capsys, "bertrand", "--scheme", "radius", "--mc", "20000", "--seed", "3", "--json")
    assert a == b and a[0] == 0
    code, out, _ = run_cli(capsys, "bertrand", "--scheme", "endpoints", "--invariance", "6")
    assert code == 0 and out


def test_self_test_and_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "indlogic", "self-test", "--json"],
                          capture_output=True, text=True, timeout=300)
    report = json.loads(proc.stdout)
    assert proc.returncode == 0 and report["verdict"] == "pass"
    assert [r["name"] for r in report["examples"]] == [e.name for e in EXAMPLES]
