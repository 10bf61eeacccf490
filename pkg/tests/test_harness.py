"""Config parsing, report plumbing, CLI surfaces."""

import json
import math

import pytest

from shbif.errors import ParseError, RangeError, UsageError
from shbif.harness import (
    CheckResult,
    ExperimentConfig,
    VerificationReport,
    default_config,
    parse_config,
    run_suite,
)
from shbif import cli


def test_parse_config_valid():
    cfg = parse_config("dim=1\nbc=dirichlet\nlength=1.5707963\nlambda=9.5\n")
    assert cfg.dim == 1
    assert cfg.bc == "dirichlet"
    assert cfg.lam == 9.5
    assert math.isclose(cfg.length, math.pi / 2, rel_tol=1e-6)
    cfg.domain()  # constructs without error


def test_parse_config_comments_and_blank_lines():
    cfg = parse_config("# a comment\n\nmu=0.5  # inline\n")
    assert cfg.mu == 0.5


def test_parse_config_dirichlet_dim2_rejected():
    with pytest.raises(RangeError):
        parse_config("bc=dirichlet\ndim=2\n")


def test_parse_config_empty_gives_defaults():
    cfg = parse_config("")
    assert cfg == ExperimentConfig()
    assert cfg.rng_seed == 12345


def test_parse_config_unknown_key():
    with pytest.raises(ParseError) as exc:
        parse_config("dim=1\nwhatever=3\n")
    assert exc.value.line == 2


def test_parse_config_bad_value():
    with pytest.raises(ParseError):
        parse_config("dim=one\n")
    with pytest.raises(RangeError):
        parse_config("mu=-1\n")
    with pytest.raises(RangeError):
        parse_config("dt=-0.1\n")


def test_run_suite_unknown_scenario(tmp_path):
    with pytest.raises(UsageError):
        run_suite("no-such-scenario", out_dir=str(tmp_path))


def test_report_fail_propagates():
    ok = CheckResult("a", 1.0, 1.0, 0.0, True, "p")
    bad = CheckResult("b", 1.0, 2.0, 0.0, False, "p")
    rep = VerificationReport("x", [ok, bad], {})
    assert not rep.passed
    assert VerificationReport("x", [ok], {}).passed


def test_report_determinism(tmp_path):
    a = run_suite("slaved-mode", out_dir=str(tmp_path / "a"))
    b = run_suite("slaved-mode", out_dir=str(tmp_path / "b"))
    ja = json.loads(a.to_json(drop_timestamp=True))
    jb = json.loads(b.to_json(drop_timestamp=True))
    ja["artifacts"] = jb["artifacts"] = []
    ja["metadata"]["config"]["out_dir"] = jb["metadata"]["config"]["out_dir"] = ""
    assert json.dumps(ja, sort_keys=True) == json.dumps(jb, sort_keys=True)


def test_report_json_contains_tolerance_and_provenance(tmp_path):
    rep = run_suite("slaved-mode", out_dir=str(tmp_path))
    doc = json.loads(rep.to_json())
    for c in doc["checks"]:
        assert "tolerance" in c
        assert c["provenance"]
    assert doc["metadata"]["rng_seed"] == 12345


def test_default_config_unknown():
    with pytest.raises(UsageError):
        default_config("bogus")


# -- CLI ------------------------------------------------------------------

def test_cli_eig(capsys):
    rc = cli.main(["eig", "--dim", "1", "--bc", "dirichlet",
                   "--length", str(math.pi / 2), "--grid", "64", "--band", "16",
                   "--lambda", "9.5"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["lambda_c"] == 9.0
    assert doc["multiplicity"] == 1
    assert doc["critical_modes"] == [{"kind": "sin", "k": [1]}]
    assert doc["betas"]["sin[1]"] == 0.5


def test_cli_run_and_artifacts(tmp_path, capsys):
    rc = cli.main(["--out", str(tmp_path), "run", "--dim", "1", "--bc", "dirichlet",
                   "--length", str(math.pi / 2), "--grid", "64", "--band", "16",
                   "--lambda", "9.5", "--dt", "1e-3", "--t-end", "0.2",
                   "--seed-mode", "1", "--seed-amp", "0.1", "--snapshot"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["bound_check"]["regime"] == "supercritical"
    assert (tmp_path / "run-series.csv").exists()
    assert (tmp_path / "run-final.csv").exists()
    header = (tmp_path / "run-series.csv").read_text().splitlines()[0]
    assert header == "t,l2,lyapunov"


def test_cli_steady_single(tmp_path, capsys):
    rc = cli.main(["--out", str(tmp_path), "steady", "--dim", "1", "--bc",
                   "dirichlet", "--length", str(math.pi / 2), "--grid", "64",
                   "--band", "16", "--lambda", "9.5", "--from-mode", "1",
                   "--amp", "0.8"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    (state,) = doc["states"]
    assert state["residual"] < 1e-10
    assert state["morse_index"] == 0


def test_cli_reduce(tmp_path, capsys):
    rc = cli.main(["--out", str(tmp_path), "reduce", "--dim", "1", "--bc",
                   "dirichlet", "--length", str(math.pi / 2), "--grid", "64",
                   "--band", "16", "--lambda", "9.5"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["reduced_system"]["lambda_c"] == 9.0
    assert doc["prediction"]["pattern"] == "pitchfork"
    assert len(doc["fixed_points"]) == 3


def test_cli_sweep(tmp_path, capsys):
    rc = cli.main(["--out", str(tmp_path), "sweep", "--dim", "1", "--bc",
                   "dirichlet", "--length", str(math.pi / 2), "--grid", "64",
                   "--band", "16", "--lambda-min", "8.8", "--lambda-max", "9.2",
                   "--steps", "3", "--nseeds", "8"])
    assert rc == 0
    lines = (tmp_path / "sweep.csv").read_text().strip().splitlines()
    assert lines[0] == "lambda,state_id,l2_norm,critical_amplitude,morse_index"
    assert len(lines) > 3


def test_cli_steady_from_seed_file(tmp_path, capsys):
    seed = tmp_path / "seed.json"
    seed.write_text(json.dumps({"modes": [{"kind": "sin", "k": [1], "c": 0.8}]}))
    rc = cli.main(["--out", str(tmp_path), "steady", "--dim", "1", "--bc",
                   "dirichlet", "--length", str(math.pi / 2), "--grid", "64",
                   "--band", "16", "--lambda", "9.5", "--from-file", str(seed)])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["states"][0]["l2_norm"] == pytest.approx(0.7236, abs=1e-3)


def test_cli_verify_unknown_scenario(capsys):
    rc = cli.main(["verify", "nonexistent"])
    assert rc == 2


def test_cli_config_file(tmp_path, capsys):
    cfgfile = tmp_path / "c.cfg"
    cfgfile.write_text("lambda=9.4\nband=16\ngrid_n=64\n")
    rc = cli.main(["--config", str(cfgfile), "eig", "--dim", "1", "--bc",
                   "dirichlet", "--length", str(math.pi / 2)])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["betas"]["sin[1]"] == pytest.approx(0.4)
