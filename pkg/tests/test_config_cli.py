import json
import os
import subprocess
import sys

import pytest

from htfrac import ConfigError, RunConfig, parse_config
from htfrac.cli import main
from htfrac.config import SUITES, env_overrides, parse_pairs
from htfrac.report import CheckRecord, VerificationReport, emit, to_json


def test_inline_config():
    cfg = parse_config("group=heisenberg:1, s=0.5, suite=yamabe", environ={})
    assert cfg.group == "heisenberg:1" and cfg.s == (0.5,) and cfg.suites == ("yamabe",)


def test_file_config_with_comments(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# battery\ngroup = quaternionic:1\ns = 0.25, 0.75  # two values\n"
                 "suite = all\nquad.mc_samples = 4096\n")
    cfg = parse_config(p, environ={})
    assert cfg.s == (0.25, 0.75) and cfg.suites == SUITES
    assert cfg.quadrature().mc_samples == 4096


@pytest.mark.parametrize("text,needle", [
    ("s=1.5", "'s'"), ("group=lie:3", "'group'"), ("suite=", "suite"),
    ("suite=nonsense", "nonsense"), ("foo=1", "foo"), ("s=0.5\ns=0.6", "duplicate"),
    ("seed=abc", "'seed'"), ("format=xml", "'format'"), ("quad.mode=simpson", "quad"),
    ("points=3", "points"), ("just words\nseed=1", "key = value")])
def test_config_errors_name_the_key(text, needle):
    with pytest.raises(ConfigError, match=needle):
        parse_config(text, environ={})


def test_precedence_env_then_overrides():
    env = {"HTFRAC_SEED": "7", "HTFRAC_QUAD__MC_SAMPLES": "2048", "HTFRAC_BACKEND": "python"}
    cfg = parse_config("seed=3", environ=env)
    assert cfg.seed == 7 and cfg.quad == {"mc_samples": 2048}
    cfg = parse_config("seed=3", environ=env, overrides={"seed": 11})
    assert cfg.seed == 11
    with pytest.raises(ConfigError, match="HTFRAC_BOGUS"):
        env_overrides({"HTFRAC_BOGUS": "1"})


def test_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        parse_config("/nonexistent/run.cfg", environ={})


def test_parse_pairs_multiple_per_line():
    assert parse_pairs("seed=2, s=0.1 0.2") == {"seed": "2", "s": "0.1 0.2"}


def test_echo_omits_scheduling_keys():
    a = RunConfig(workers=1).echo()
    b = RunConfig(workers=4, out="x.json").echo()
    assert a == b


def test_report_json_is_stable_and_sorted():
    rep = VerificationReport("t", [CheckRecord("b", "anchor", {"x": 1}, 0.1 + 0.2, 1e-3, "pass"),
                                   CheckRecord("a", "anchor", {}, [1.0, 2.0], None, "diagnostic")])
    rep = rep.sorted()
    out = emit(rep)
    d = json.loads(out)
    assert [r["id"] for r in d["records"]] == ["a", "b"]
    assert d["summary"] == {"pass": 1, "fail": 0, "diagnostic": 1}
    assert "wall_clock" not in d["records"][0]
    assert json.loads(to_json(0.1 + 0.2)) == 0.1 + 0.2
    assert emit(rep) == out
    assert emit(rep, "csv").splitlines()[0].startswith(b"id,status")


def test_cli_group_suite_exit_code(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["verify", "group", "--out", str(out)])
    assert code == 0
    d = json.loads(out.read_text())
    assert d["summary"]["fail"] == 0 and d["config"]["suites"] == ["group"]


def test_cli_config_error_exit_code(capsys):
    assert main(["report", "--s", "1.5"]) == 2
    assert "'s'" in capsys.readouterr().err


def test_cli_decay_and_tail_tables(tmp_path):
    assert main(["decay", "--format", "csv", "--out", str(tmp_path / "d.csv")]) == 0
    rows = (tmp_path / "d.csv").read_text().splitlines()
    assert rows[0] == "s,R,sup,inflation,fitted_exponent,target" and len(rows) == 7
    assert main(["tail", "--format", "csv", "--out", str(tmp_path / "t.csv")]) == 0
    rows = (tmp_path / "t.csv").read_text().splitlines()
    assert rows[0].startswith("s,R,T") and len(rows) == 6


def test_cli_runs_as_module_and_reads_env(tmp_path):
    env = {"HTFRAC_SEED": "5", "PATH": "/usr/bin:/bin"}
    r = subprocess.run([sys.executable, "-m", "htfrac.cli", "verify", "lorentz", "--out",
                        str(tmp_path / "l.json")], capture_output=True, text=True,
                       env={**env, **{k: v for k, v in os.environ.items()
                                      if k in ("PYTHONPATH", "HOME")}})
    assert r.returncode == 0, r.stderr
    assert json.loads((tmp_path / "l.json").read_text())["config"]["seed"] == 5
