from __future__ import annotations

import csv
import json
import shutil
from pathlib import Path

import jsonschema
import pytest

from dbrk.cli import main
from dbrk.harness import PlanError, TaskOutput, parse_plan, parse_schedule, render_csv

ROOT = Path(__file__).resolve().parents[1]
EXAMPLE = ROOT / "plans" / "example.json"
SCHEMA = json.loads((ROOT / "docs" / "plan_schema.json").read_text())


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_anr_subcommand(tmp_path):
    assert main(["anr", "--n", "25", "--out", str(tmp_path), "--quiet"]) == 0
    rows = _read_csv(tmp_path / "anr.csv")
    assert len(rows) == sum(2 * n + 2 for n in range(26))
    assert all(r["match"] == "true" for r in rows)
    assert all(abs(int(r["A"])) == 2 ** int(r["n"]) for r in rows)
    summary = json.loads((tmp_path / "anr.json").read_text())
    assert summary["pass"] is True and summary["task"] == "anr" and summary["max_residual"] == 0.0
    assert set(summary) >= {"task", "pass", "max_residual", "runtime_ms"}


def test_identities_rows_are_exact_zero(tmp_path):
    assert main(["identities", "--n", "3", "--out", str(tmp_path), "--quiet"]) == 0
    rows = _read_csv(tmp_path / "identities.csv")
    assert list(rows[0]) == ["ell", "value_re", "value_im", "residual", "extended"]
    assert all(r["value_re"] == "0" and r["value_im"] == "0" for r in rows)


def test_exact_rationals_written_as_fractions(tmp_path):
    assert main(["converge", "--n", "0", "--x0", "0", "--schedule", "3", "--exact", "--tol", "1", "--out", str(tmp_path), "--quiet"]) == 0
    rows = _read_csv(tmp_path / "converge.csv")
    assert [r["t"] for r in rows] == ["1/2", "1/4", "1/8"]
    assert all("/" in r["exact_diff_pi_free"] for r in rows)
    float(rows[0]["diff_norm_sq"])  # shortest repr float


def test_converge_reports_failure_with_exit_1(tmp_path):
    # with the default 1e-8 threshold the final difference norm (about 5e-7) fails
    assert main(["converge", "--x0", "0", "--n", "1", "--exact", "--out", str(tmp_path), "--quiet"]) == 1
    summary = json.loads((tmp_path / "converge.json").read_text())
    assert summary["pass"] is False
    assert summary["notes"]["decreasing_tail"] is True
    assert 1e-8 < summary["max_residual"] < 1e-6


def test_condition_is_report_only(tmp_path):
    fn = tmp_path / "b.json"
    fn.write_text(json.dumps([{"kind": "point_mass", "location": "0", "mass": "1"}]))
    assert main(["condition", "--function", str(fn), "--x0", "0", "--out", str(tmp_path), "--quiet"]) == 0
    rows = _read_csv(tmp_path / "condition.csv")
    assert rows[0]["finite"] == "false" and rows[0]["singular_term"] == "inf"


def test_probe_never_fails(tmp_path):
    assert main(["probe", "--n", "3", "--out", str(tmp_path), "--quiet"]) == 0


def test_usage_errors_exit_2(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["anr", "--n", "many"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{\"tasks\": [")
    assert main(["run", str(bad)]) == 2
    assert "not valid JSON" in capsys.readouterr().err
    bad.write_text(json.dumps({"tasks": [{"kind": "anr", "params": {"n_max": -1}}]}))
    assert main(["run", str(bad)]) == 2
    bad.write_text(json.dumps({"tasks": [{"kind": "anr", "out": "../escape"}]}))
    assert main(["run", str(bad)]) == 2
    assert main(["run", str(tmp_path / "missing.json")]) == 2


def test_plan_validation():
    with pytest.raises(PlanError):
        parse_plan({"tasks": []})
    with pytest.raises(PlanError):
        parse_plan({"tasks": [{"kind": "anr"}], "extra": 1})
    with pytest.raises(PlanError):
        parse_plan({"function": [{"kind": "blaschke", "zero": ["0", "-1"]}], "tasks": [{"kind": "anr"}]})
    with pytest.raises(PlanError):
        parse_plan({"tasks": [{"kind": "anr", "out": "a"}, {"kind": "anr", "out": "a"}]})
    with pytest.raises(PlanError):
        parse_schedule(["1/4", "1/2"])


def test_example_plan_matches_schema():
    data = json.loads(EXAMPLE.read_text())
    jsonschema.validate(data, SCHEMA)
    specs, out = parse_plan(data, EXAMPLE.parent)
    assert out == EXAMPLE.parent / "results" and len(specs) == 9


def _run_example(tmp_path, name, jobs):
    work = tmp_path / name
    work.mkdir()
    shutil.copy(EXAMPLE, work / "plan.json")
    figs = work / "figs"
    code = main(["run", str(work / "plan.json"), "--jobs", str(jobs), "--no-timing", "--quiet", "--figures", str(figs)])
    return code, work / "results", figs


def test_plan_run_is_byte_deterministic(tmp_path):
    code1, out1, figs = _run_example(tmp_path, "a", 1)
    code2, out2, _ = _run_example(tmp_path, "b", 3)
    assert code1 == code2 == 0
    names = sorted(p.name for p in out1.iterdir())
    assert names == sorted(p.name for p in out2.iterdir())
    assert len(names) == 18
    for name in names:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name
    assert (figs / "converge.png").exists() and (figs / "anr.png").exists()
    summary = json.loads((out1 / "converge.json").read_text())
    assert summary["runtime_ms"] is None


def test_csv_number_formatting():
    from fractions import Fraction

    out = TaskOutput(["x", "z*", "q"], [[0.1, 1 + 2j, Fraction(3, 4)], [1e-20, Fraction(1, 3), 7]], True, 0.0)
    assert render_csv(out) == "x,z_re,z_im,q\n0.1,1.0,2.0,3/4\n1e-20,1/3,0,7\n"
