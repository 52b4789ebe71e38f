"""Command line entry point: validation, runs, manifests, determinism."""

import json
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "glvortex.cli"]


def run_cli(args, cwd):
    return subprocess.run(CLI + args, cwd=cwd, capture_output=True, text=True)


def write_config(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_list_names_all_experiments(tmp_path):
    out = run_cli(["list"], tmp_path)
    assert out.returncode == 0
    for name in ("growth-rate", "eta-sweep", "prop13", "ballgrowth",
                 "certify", "identities"):
        assert name in out.stdout


def test_validate_accepts_good_config(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "growth-rate",
                                  "radii": [25.0, 50.0]})
    out = run_cli(["validate", "--config", cfg], tmp_path)
    assert out.returncode == 0


def test_validate_rejects_unknown_key(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "growth-rate",
                                  "radii": [25.0], "bogus": 1})
    out = run_cli(["validate", "--config", cfg], tmp_path)
    assert out.returncode == 2
    assert "bogus" in out.stderr


def test_validate_rejects_out_of_range_gamma(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "certify", "gamma": 6.3,
                                  "delta": 0.9, "sigma": 0.66, "alpha": 0.85,
                                  "C": 10.0, "r0": 12.0, "M": 30.0})
    out = run_cli(["validate", "--config", cfg], tmp_path)
    assert out.returncode == 2


def test_run_certify_and_manifest(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "certify", "gamma": 5.0,
                                  "delta": 0.9, "sigma": 0.66, "alpha": 0.85,
                                  "C": 10.0, "r0": 12.0, "M": 30.0})
    out = run_cli(["run", "--config", cfg, "--out", "res"], tmp_path)
    assert out.returncode == 0, out.stderr
    cert = json.loads((tmp_path / "res" / "chain.json").read_text())
    assert cert["T"] > 0
    manifest = json.loads((tmp_path / "res" / "manifest.json").read_text())
    assert "config_sha256" in manifest
    assert "wall_time_s" in manifest


def test_run_growth_rate(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "growth-rate",
                                  "radii": [25.0, 50.0, 100.0]})
    out = run_cli(["run", "--config", cfg, "--out", "res"], tmp_path)
    assert out.returncode == 0, out.stderr
    report = json.loads((tmp_path / "res" / "report.json").read_text())
    assert abs(report["a"] / (2 * 3.141592653589793) - 1.0) < 0.05


def test_rerun_is_byte_identical(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "certify", "gamma": 5.0,
                                  "delta": 0.9, "sigma": 0.66, "alpha": 0.85,
                                  "C": 10.0, "r0": 12.0, "M": 30.0})
    for out_dir in ("a", "b"):
        r = run_cli(["run", "--config", cfg, "--out", out_dir, "--seed", "3"],
                    tmp_path)
        assert r.returncode == 0, r.stderr
    for name in ("chain.json",):
        a = (tmp_path / "a" / name).read_bytes()
        b = (tmp_path / "b" / name).read_bytes()
        assert a == b


def test_run_reports_failure_without_traceback_spam(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "certify", "gamma": 5.0,
                                  "delta": 0.9, "sigma": 0.66, "alpha": 0.85,
                                  "C": 10.0, "r0": 12.0, "M": 30.0})
    out = run_cli(["run", "--config", str(tmp_path / "missing.json")],
                  tmp_path)
    assert out.returncode == 2
