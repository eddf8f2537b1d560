from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from conftest import DATA, FIXTURES
from enactive.cli import build_parser, run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_help_lists_every_flag(capsys):
    code, out, _ = call(capsys, "compare", "--help")
    assert code == 0
    for flag in ("--config", "--file", "--seed", "--trials", "--states", "--vocab", "--density",
                 "--proxy", "--format", "--output", "--mode", "--cap-states", "--cap-vocab"):
        assert flag in out
    top = build_parser().format_help()
    for name in ("lang", "task", "learn", "validate", "compare", "mca", "splinter"):
        assert name in top


@pytest.mark.parametrize("argv", [["frobnicate"], ["lang", "--colour", "red"], [], ["compare", "--format", "xml"]])
def test_usage_errors(capsys, argv):
    assert call(capsys, *argv)[0] == 2


def test_lang(capsys):
    code, out, _ = call(capsys, "lang", "--file", str(DATA / "worked.json"))
    doc = json.loads(out)
    assert code == 0 and doc["language_size"] == 5
    assert [s["weakness"] for s in doc["statements"]] == [2, 2, 3, 1, 1]


def test_lang_random_universe(capsys):
    code, out, _ = call(capsys, "lang", "--seed", "3", "--states", "4", "--vocab", "6", "--format", "csv")
    assert code == 0 and out.startswith("statement,programs,weakness,extension\n")


def test_task(capsys):
    code, out, _ = call(capsys, "task", "--file", str(DATA / "worked_task.json"))
    doc = json.loads(out)
    assert code == 0 and doc["utility"] == 2
    assert [p["programs"] for p in doc["correct_policies"]] == [["11"], ["01", "11"]]


def test_bad_task_names_offending_output(capsys):
    code, _, err = call(capsys, "task", "--file", str(FIXTURES / "bad_task.json"))
    assert code == 3
    assert "110" in err and "outputs" in err


def test_malformed_json(capsys, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{"universe": {"state_count": 2,\n "vocabulary": ["01" "10"]}}')
    code, _, err = call(capsys, "task", "--file", str(p))
    assert code == 3 and "line 2" in err


def test_malformed_field(capsys, tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text('{"density": "dense"}')
    code, _, err = call(capsys, "compare", "--config", str(p))
    assert code == 3 and "density" in err


def test_capacity_error(capsys):
    code, _, err = call(capsys, "compare", "--states", "30")
    assert code == 3 and "cap" in err


def test_learn(capsys):
    code, out, _ = call(capsys, "learn", "--file", str(DATA / "worked_task.json"), "--proxy", "weakness")
    doc = json.loads(out)
    assert code == 0 and doc["programs"] == ["11"] and doc["weakness"] == 3


def test_learn_unlearnable(capsys, tmp_path):
    p = tmp_path / "t.json"
    p.write_text(json.dumps({"universe": {"state_count": 2, "vocabulary": ["01", "10", "11"]},
                             "inputs": [["01"], ["11"]], "outputs": [["01", "11"], ["10", "11"]]}))
    assert call(capsys, "learn", "--file", str(p))[0] == 1


def test_validate_small_reports_failure(capsys):
    code, out, err = call(capsys, "validate", "--config", str(DATA / "small.json"))
    doc = json.loads(out)
    assert code == 1 and not doc["passed"]
    assert doc["generalization"]["mismatched"] == 11


def test_validate_csv_matches_golden(capsys):
    code, out, _ = call(capsys, "validate", "--config", str(DATA / "small.json"), "--format", "csv")
    assert out.encode() == (FIXTURES / "generalization_small.csv").read_bytes()


def test_compare_json_header(capsys):
    code, out, _ = call(capsys, "compare", "--seed", "7", "--trials", "30", "--states", "4", "--vocab", "8")
    doc = json.loads(out)
    assert code == 0 and doc["seed"] == 7 and "PCG64" in doc["generator"]
    assert [p["proxy"] for p in doc["proxies"]] == ["weakness", "simplicity", "random:7"]


def test_compare_custom_proxies(capsys):
    code, out, _ = call(capsys, "compare", "--trials", "5", "--states", "3", "--vocab", "4",
                        "--proxy", "weakness", "--proxy", "random:2")
    assert [p["proxy"] for p in json.loads(out)["proxies"]] == ["weakness", "random:2"]


def test_mca(capsys):
    code, out, _ = call(capsys, "mca", "--file", str(DATA / "stack_overconstrained.json"))
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "over_constrained" and doc["over_constrained_level"] == 1


def test_splinter(capsys):
    code, out, _ = call(capsys, "splinter", "--file", str(DATA / "overconstrained.json"))
    doc = json.loads(out)
    assert code == 0 and len(doc["result"]["discarded"]) == 1 and doc["whole_policies"] == []


def test_splinter_on_consistent_collective(capsys):
    assert call(capsys, "splinter", "--file", str(DATA / "organ.json"))[0] == 1


def test_missing_file_flag(capsys):
    assert call(capsys, "mca")[0] == 3


def test_unwritable_destination(capsys, tmp_path):
    target = tmp_path / "missing" / "out.json"
    code, _, err = call(capsys, "lang", "--file", str(DATA / "worked.json"), "--output", str(target))
    assert code == 3 and "cannot write" in err


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.csv"
    assert call(capsys, "lang", "--file", str(DATA / "worked.json"), "--format", "csv", "--output", str(target))[0] == 0
    text = target.read_text(encoding="utf-8")
    assert text.endswith("\n") and text.count("\n") == 6


def test_inputs_not_modified(capsys):
    path = DATA / "stack_complete.json"
    before = path.read_bytes()
    call(capsys, "mca", "--file", str(path))
    assert path.read_bytes() == before


def test_console_script_byte_identical(tmp_path):
    argv = [sys.executable, "-m", "enactive.cli", "compare", "--seed", "7", "--trials", "50",
            "--states", "4", "--vocab", "8", "--format", "csv"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    env = dict(os.environ, ENACTIVE_NO_CACHE="1")
    c = subprocess.run(argv, capture_output=True, check=True, env=env).stdout
    assert a == b == c and a.count(b"\n") == 1 + 3 * 50
