from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from hahndefect.cli import main, run_config
from hahndefect.cuts import parse_cut, render_cut
from hahndefect.gf import gf
from hahndefect.hahn import parse_series, render_series

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, text):
    path = tmp_path / "cfg.toml"
    path.write_text(text)
    return path


def test_as_root_task(tmp_path):
    cfg = write(tmp_path, '[field]\nkind = "perfect-hull"\np = 2\n\n[[tasks]]\nkind = "as-root"\nrhs = "t^(-1)"\n')
    assert run_config(cfg, tmp_path / "out") == 0
    report = json.loads((tmp_path / "out" / "task-01-as-root.json").read_text())
    assert report["result"]["degree"] == 2
    assert report["result"]["generator"].startswith("frobtail(gamma=-1")


def test_verify_task(tmp_path):
    cfg = write(tmp_path, '[[tasks]]\nkind = "verify"\ntheorems = ["MT1"]\ntrdeg = 2\n')
    assert run_config(cfg, tmp_path / "out") == 0
    report = json.loads((tmp_path / "out" / "task-01-verify.json").read_text())
    assert report["result"]["bounds"] == [{"theorem": "MT1", "value": 4, "verdict": "n/a"}]


def test_empty_task_list(tmp_path):
    cfg = write(tmp_path, "[run]\nseed = 1\n")
    assert run_config(cfg, tmp_path / "out") == 0
    assert sorted(p.name for p in (tmp_path / "out").iterdir()) == ["summary.json"]


def test_parse_error_exit_2(tmp_path):
    assert run_config(write(tmp_path, "this is = = not toml"), tmp_path / "out") == 2
    assert run_config(write(tmp_path, '[[tasks]]\nkind = "census"\nfield = "nope"\n'), tmp_path / "out") == 2
    assert run_config(write(tmp_path, '[run]\nbudget = 0\n'), tmp_path / "out") == 2


def test_task_error_exit_1(tmp_path):
    cfg = write(tmp_path, '[field]\np = 2\n\n[[tasks]]\nkind = "as-root"\nrhs = "1"\n')
    assert run_config(cfg, tmp_path / "out") == 1
    report = json.loads((tmp_path / "out" / "task-01-as-root.json").read_text())
    assert report["status"] == "error" and report["error"]["type"] == "ResidueNotSplit"


def test_violation_exit_1(tmp_path):
    cfg = write(tmp_path, """
[fields.s]
kind = "synthetic"
p = 2
rank = 2
declared_m = 0
[[fields.s.synthetic.elements]]
label = "x"
cut = "(0,0)-"
[[fields.s.synthetic.elements]]
label = "y"
cut = "(1/3,0)-"
[[tasks]]
kind = "census"
field = "s"
modulus = "divhull"
r = 0
m = 0
theorems = ["r+m"]
""")
    assert run_config(cfg, tmp_path / "out") == 1
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["tasks"][0]["violated"] == 1


def test_subcommands(capsys, tmp_path):
    assert main(["as-root", "t^(-1)", "--p", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["degree"] == 3
    assert main(["distance", "t^(1/2)", "--kind", "laurent", "--p", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["cut"] == "1/2+"
    assert main(["classify", "t^(-1)", "--p", "2", "--samples", "20"]) == 0
    assert json.loads(capsys.readouterr().out)["classification"] == "independent-defect"
    assert main(["verify", "nonhens-general", "--m", "1", "--degree", "2", "--p", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["bounds"][0]["value"] == 1
    out = tmp_path / "census.json"
    assert main(["census", "t^(-1)", "--p", "3", "--samples", "10", "--oracle", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["ndd_lower"] == 1 and report["enumeration"]["oracle"] == "agrees"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hahndefect", "verify", "MT1", "--trdeg", "3"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["bounds"][0]["value"] == 6


def _collect(obj, key, acc):
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k == key:
                acc.append(v)
            _collect(v, key, acc)
    elif isinstance(obj, list):
        for v in obj:
            _collect(v, key, acc)
    return acc


@pytest.mark.parametrize("name,p", [("perfect_hull", 3), ("laurent", 2), ("rank2", 2), ("synthetic", 2)])
def test_shipped_configs_run_clean_and_round_trip(tmp_path, name, p):
    out = tmp_path / name
    assert run_config(CONFIGS / f"{name}.toml", out) == 0
    for path in sorted(out.glob("task-*.json")):
        report = json.loads(path.read_text())
        assert report["status"] == "ok"
        result = report["result"]
        for text in _collect(result, "cut", []):
            if text != "inf":
                assert render_cut(parse_cut(text)) == text
        F = gf(p, 2 if report.get("field") == "f4" else 1)
        rank = 2 if name == "rank2" else 1
        for key in ("rhs", "generator"):
            for text in _collect(result, key, []):
                if text and name != "synthetic":
                    assert render_series(parse_series(text, F, rank)) == text
