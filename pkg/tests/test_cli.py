import json
import os
import subprocess
import sys

import pytest

from safeplan.cli import main
from safeplan.formats import parse_results_csv


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_bound(capsys):
    code, out, _ = run(capsys, "bound", "--d", 4, "--actions", 12, "--vars", 2, "--epsilon", 0.1, "--delta", 0.05)
    assert code == 0
    assert out.splitlines()[-1] == "m 3629"
    assert out.splitlines()[0].startswith("m_real 3628.8386")


def test_bound_from_gamma(capsys):
    code, out, _ = run(capsys, "bound", "--d", 4, "--actions", 12, "--vars", 2, "--gamma", 0.1, "--mu", 0.5,
                       "--delta", 0.05)
    assert code == 0 and out.startswith("epsilon 0.111")


def test_table(capsys):
    code, out, _ = run(capsys, "table", "--mu", 0.5, "--epsilon", 0.2)
    assert code == 0
    assert out.splitlines()[-1].split() == ["marginal", "0.4", "0.6"]


@pytest.mark.parametrize("argv", [["bound", "--d", "4"], ["nosuch"], ["table", "--mu", "2", "--epsilon", "0.1"],
                                  ["plan", "--problem", "/nonexistent.json"]])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"d": 4, "actions": 12, "vars": 2, "epsilon": 0.1, "delta": 0.05}))
    assert run(capsys, "bound", "--config", cfg)[1].endswith("m 3629\n")
    assert run(capsys, "bound", "--config", cfg, "--epsilon", 0.05)[1].endswith("m 7258\n")


@pytest.fixture
def pipeline(tmp_path, capsys):
    p = {k: tmp_path / v for k, v in dict(
        domain="d.domain.json", traj="t.traj.jsonl", held="held.problem.json", model="m.model.json",
        problem="c.problem.json", sas="c.sas", plan="p.plan.json", report="safety.json", bounds="bounds.json",
    ).items()}
    assert run(capsys, "gen-domain", "--locations", 3, "--out", p["domain"])[0] == 0
    assert run(capsys, "sample", "--domain", p["domain"], "--count", 40, "--seed", 3, "--mode", "walk",
               "--out", p["traj"], "--problem-out", p["held"])[0] == 0
    assert run(capsys, "learn", "--trajectories", p["traj"], "--domain-vars", p["domain"],
               "--reference", p["domain"], "--out", p["model"])[0] == 0
    return p


def test_end_to_end(capsys, pipeline):
    p = pipeline
    assert run(capsys, "compile", "--model", p["model"], "--problem", p["held"], "--corpus", "t.traj.jsonl",
               "--out", p["problem"], "--sas", p["sas"])[0] == 0
    assert p["sas"].read_text().startswith("begin_version\n3\n")
    code, _, err = run(capsys, "plan", "--problem", p["problem"], "--out", p["plan"])
    assert code == 0, err
    code, out, _ = run(capsys, "validate", "--problem", p["held"], "--plan", p["plan"])
    assert code == 0 and json.loads(out)["success"]
    code, _, err = run(capsys, "audit", "--model", p["model"], "--truth", p["domain"], "--trajectories", p["traj"],
                       "--out", p["report"], "--bounds-out", p["bounds"])
    assert code == 0 and "safe" in err
    assert json.loads(p["report"].read_text())["safe"]
    assert json.loads(p["bounds"].read_text())["clean"]


def test_incremental_update(capsys, pipeline, tmp_path):
    p = pipeline
    again = tmp_path / "again.model.json"
    assert run(capsys, "learn", "--trajectories", p["traj"], "--domain-vars", p["domain"], "--update", p["model"],
               "--out", again)[0] == 0
    assert json.loads(again.read_text())["actions"] != [] and again.read_text().count('"observations"') > 0


def test_unsolvable_compiled_problem_exits_one(capsys, tmp_path):
    domain, traj, model, problem = (tmp_path / n for n in ("d.json", "t.jsonl", "m.json", "c.json"))
    run(capsys, "gen-domain", "--out", domain)
    # a single trajectory cannot teach how to reach location A from C
    traj.write_text('{"actions":["Move_A_B"],"goal":null,"id":"x","schema_version":1,'
                    '"states":[{"PackageAt":"B","TruckAt":"A"},{"PackageAt":"B","TruckAt":"B"}]}\n')
    run(capsys, "learn", "--trajectories", traj, "--domain-vars", domain, "--out", model)
    run(capsys, "compile", "--model", model, "--init", "TruckAt=C,PackageAt=B", "--goal", "TruckAt=A",
        "--out", problem)
    code, out, err = run(capsys, "plan", "--problem", problem)
    assert code == 1 and "no plan found" in err and out == ""
    code, _, _ = run(capsys, "plan", "--problem", problem, "--algorithm", "bfs")
    assert code == 1


def test_invalid_plan_exits_one(capsys, pipeline, tmp_path):
    bad = tmp_path / "bad.plan.json"
    bad.write_text(json.dumps({"schema_version": 1, "kind": "plan", "steps": ["Pickup_A", "Pickup_A"]}))
    code, out, _ = run(capsys, "validate", "--problem", pipeline["held"], "--plan", bad)
    assert code == 1 and not json.loads(out)["success"]


def test_resource_limit_exits_three(capsys, tmp_path):
    domain, problem = tmp_path / "d.json", tmp_path / "p.json"
    run(capsys, "gen-domain", "--locations", 5, "--trucks", 2, "--packages", 2, "--out", domain)
    run(capsys, "sample", "--domain", domain, "--count", 1, "--seed", 0, "--goal-density", 1.0,
        "--out", tmp_path / "t.jsonl", "--problem-out", problem)
    code, _, err = run(capsys, "plan", "--problem", problem, "--max-generated", 1)
    assert code == 3 and "resource limit" in err


def test_failed_write_leaves_no_partial_file(capsys, tmp_path):
    out = tmp_path / "m.model.json"
    code, _, _ = run(capsys, "learn", "--trajectories", tmp_path / "missing.jsonl", "--domain-vars",
                     tmp_path / "missing.json", "--out", out)
    assert code == 2 and not out.exists()
    assert os.listdir(tmp_path) == []


def test_experiment_output_is_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["experiment", "--m", "1,5", "--runs", 2, "--eval-instances", 10, "--seed", 4]
    assert run(capsys, *args, "--out", a)[0] == 0
    assert run(capsys, *args, "--out", b, "--jobs", 2)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert [r.seed for r in parse_results_csv(a.read_text())] == [4] * 4


def test_generated_seed_is_recorded(capsys, caplog, tmp_path):
    out = tmp_path / "r.csv"
    code, _, _ = run(capsys, "experiment", "--m", "1", "--runs", 1, "--eval-instances", 5, "--out", out)
    seed = parse_results_csv(out.read_text())[0].seed
    assert code == 0 and f"generated seed {seed}" in caplog.text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "safeplan", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
