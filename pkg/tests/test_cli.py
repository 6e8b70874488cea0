from __future__ import annotations

import json
from pathlib import Path

import pytest
import yaml

from diagmod import tasks as task_ops
from diagmod.cli import main, run_manifest
from diagmod.errors import OracleDisagreement
from diagmod.manifest import load
from diagmod.tasks import Settings

EXAMPLE = Path(__file__).resolve().parent.parent / "manifests" / "example.yaml"

SQUARE = {"squares": {"s": {"S0": [], "p": 2, "q": 3}}}


def write(tmp_path, data: dict) -> str:
    path = tmp_path / "m.yaml"
    path.write_text(yaml.safe_dump(data))
    return str(path)


def run_json(capsys, *argv) -> tuple[int, dict]:
    code = main(["run", "--json", *argv])
    return code, json.loads(capsys.readouterr().out)


def test_fracture_of_integers(tmp_path, capsys):
    path = write(tmp_path, {**SQUARE, "tasks": [{"id": "f", "op": "fracture", "args": {"square": "s", "module": {"rank": 1}}}]})
    code, report = run_json(capsys, path)
    assert code == 0 and report["exit_code"] == 0
    entry = report["tasks"][0]
    assert entry["status"] == "pass"
    assert entry["result"]["holim"]["0"] == [1, []]
    assert all(v == [0, []] for k, v in entry["result"]["holim"].items() if k != "0")


def test_empty_task_list(tmp_path, capsys):
    code, report = run_json(capsys, write(tmp_path, {"rings": {"Z": "Z"}}))
    assert code == 0 and report["tasks"] == []
    assert report["schema"] == "diagmod-report/1"


def test_undeclared_reference_is_input_error(tmp_path, capsys):
    path = write(tmp_path, {"tasks": [{"id": "h", "op": "homology", "args": {"complex": "nowhere"}}]})
    code, report = run_json(capsys, path)
    assert code == 2
    assert report["tasks"][0]["status"] == "error"
    assert "complexes.nowhere is not declared" in report["tasks"][0]["error"]


def test_manifest_error_exits_two(tmp_path, capsys):
    path = write(tmp_path, {"ring_diagrams": {"r": {"category": "c", "rings": {"x": "base"}}}})
    assert main(["run", path]) == 2
    assert "ManifestReferenceError" in capsys.readouterr().err


def test_failing_verdict_exits_one(tmp_path, capsys):
    task = {"id": "cells", "op": "cellularization",
            "args": {"adjunction": {"source": "Z", "target": "Z/4"}, "cells": [{"rank": 1}], "case": 1}}
    code, report = run_json(capsys, write(tmp_path, {"tasks": [task]}))
    assert code == 1
    assert report["tasks"][0]["status"] == "fail"


def test_oracle_disagreement_exits_three(tmp_path, capsys, monkeypatch):
    def broken(*args, **kwargs):
        raise OracleDisagreement("forced")

    monkeypatch.setattr(task_ops, "truncation_oracle", broken)
    path = write(tmp_path, {**SQUARE, "tasks": [
        {"id": "f", "op": "fracture", "args": {"square": "s", "module": {"rank": 1}}, "options": {"oracle": True}}]})
    code, report = run_json(capsys, path)
    assert code == 3
    assert report["tasks"][0]["status"] == "oracle-disagreement"


def test_first_error_ends_report(tmp_path, capsys):
    tasks = [{"id": "a", "op": "smith", "args": {"ring": "Z", "matrix": [[2]]}},
             {"id": "b", "op": "homology", "args": {"complex": "gone"}},
             {"id": "c", "op": "smith", "args": {"ring": "Z", "matrix": [[3]]}}]
    code, report = run_json(capsys, write(tmp_path, {"tasks": tasks}))
    assert code == 2
    assert [e["id"] for e in report["tasks"]] == ["a", "b"]


@pytest.mark.parametrize("flag", ["--resolution-length", "--truncation-bound"])
def test_non_positive_flags(flag, capsys):
    assert main(["run", str(EXAMPLE), flag, "0"]) == 2
    assert "must be positive" in capsys.readouterr().err


class TestExample:
    def test_text_report(self, capsys):
        assert main(["run", str(EXAMPLE)]) == 0
        out = capsys.readouterr().out
        assert out.strip().endswith("15/15 tasks ok, exit code 0")

    def test_deterministic(self):
        m = load(str(EXAMPLE))
        first, _, _ = run_manifest(m, Settings())
        again, _, _ = run_manifest(m, Settings())
        threaded, _, _ = run_manifest(m, Settings(), jobs=4)
        assert json.dumps(first, sort_keys=True) == json.dumps(again, sort_keys=True)
        assert json.dumps(first, sort_keys=True) == json.dumps(threaded, sort_keys=True)

    def test_timing_adds_seconds(self, capsys):
        code, report = run_json(capsys, str(EXAMPLE), "--timing")
        assert code == 0
        assert all("seconds" in e for e in report["tasks"])

    def test_explain_fracture_shows_witnesses(self, capsys):
        assert main(["explain", str(EXAMPLE), "fracture_Z"]) == 0
        out = capsys.readouterr().out
        assert "task fracture_Z: op fracture" in out
        assert "alpha=" in out and "beta=" in out

    def test_explain_validate_lists_squares(self, capsys):
        assert main(["explain", str(EXAMPLE), "tower_ok"]) == 0
        out = capsys.readouterr().out
        assert "status: pass" in out
        assert "transitivity square a->b then b->c = a->c: ok" in out

    def test_explain_unknown_task(self, capsys):
        assert main(["explain", str(EXAMPLE), "missing"]) == 2
        assert "UnknownTask" in capsys.readouterr().err

    def test_missing_manifest(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "none.yaml")]) == 2
