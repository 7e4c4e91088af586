"""Command-line interface: exit codes, schema errors, artifacts, determinism."""

import json
import os

import pytest

from parastable.cli import COMMANDS, main


def test_list_enumerates_all_commands(capsys):
    assert main(["--list"]) == 0
    out = capsys.readouterr().out.split()
    assert out == COMMANDS
    assert len(COMMANDS) == 13


def test_no_command_is_usage_error():
    assert main([]) == 2


def test_schema_error_names_field_and_interval(capsys):
    code = main(["stable-check", "--alpha", "2.5", "--out", "/tmp/x"])
    err = capsys.readouterr().err
    assert code == 2
    assert "alpha" in err and "(0, 2]" in err


def test_brox_schema_gate(capsys):
    code = main(["brox-demo", "--alpha", "1.6", "--out", "/tmp/x"])
    assert code == 2
    assert "7/4" in capsys.readouterr().err


def test_stable_check_writes_artifacts(tmp_path):
    out = str(tmp_path)
    code = main(["stable-check", "--out", out, "--samples", "20000",
                 "--quiet"])
    assert code == 0
    report = json.loads(open(os.path.join(out, "stable_check.json")).read())
    assert report["passed"] is True
    assert report["command"] == "stable-check"
    assert "config" in report and report["config"]["samples"] == 20000
    assert len(report["content_hash"]) == 64
    # every numerical claim carries its tolerance and realized value
    for row in report["cf_rows"]:
        assert {"empirical", "target", "se", "sigmas", "pass"} <= set(row)
    csv_text = open(os.path.join(out, "stable_check.csv")).read()
    assert csv_text.splitlines()[0] == "frequency,empirical,se,target,sigmas,pass"
    assert os.path.exists(os.path.join(out, "stable_check.png"))


def test_reports_are_byte_identical_across_runs(tmp_path):
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    for out in (a, b):
        assert main(["chaos-oracle", "--out", out, "--n", "8", "--j", "3",
                     "--quiet"]) == 0
    for name in ("chaos_oracle.json", "chaos_oracle.csv"):
        assert open(os.path.join(a, name), "rb").read() == \
            open(os.path.join(b, name), "rb").read()


def test_different_seed_changes_hash(tmp_path):
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["simulate", "--out", a, "--paths", "1000", "--quiet",
                 "--h", "0.015625", "--seed", "1"]) == 0
    assert main(["simulate", "--out", b, "--paths", "1000", "--quiet",
                 "--h", "0.015625", "--seed", "2"]) == 0
    ha = json.loads(open(os.path.join(a, "simulate.json")).read())["content_hash"]
    hb = json.loads(open(os.path.join(b, "simulate.json")).read())["content_hash"]
    assert ha != hb


def test_campbell_check_runs(tmp_path):
    out = str(tmp_path)
    assert main(["campbell-check", "--out", out, "--draws", "20000",
                 "--quiet"]) == 0


def test_solve_young_free_runs(tmp_path):
    out = str(tmp_path)
    assert main(["solve-young", "--out", out, "--free", "--n-modes", "64",
                 "--m", "128", "--quiet"]) == 0
    rows = open(os.path.join(out, "solve_young.csv")).read().splitlines()
    assert rows[0] == "x,u0"
    assert len(rows) == 65  # header + one row per grid point
