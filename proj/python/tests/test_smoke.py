import math
import os
import subprocess

import numpy as np
import pytest

import fracheat


def test_symbol_is_power_of_modulus():
    assert fracheat.fractional_symbol(1, 0.5, 2.0) == pytest.approx(2.0, rel=1e-12)
    assert fracheat.fractional_symbol(2, 0.3, 3.0, 4.0) == pytest.approx(5.0**0.6, rel=1e-10)


def test_bootstrap_plan():
    plan = fracheat.bootstrap(3, "1/2")
    assert plan["branch"] == "supercritical"
    assert plan["exponent_values"] == [2.0, 6.0]
    assert plan["N"] == 1 and plan["w"] == 3
    assert fracheat.bootstrap(1, "1/2")["reduction"]


def test_first_eigenvalue_half_laplacian():
    lam = fracheat.interval_eigenvalues(0.5, 1.0 / 128, 5)
    assert isinstance(lam, np.ndarray) and lam.shape == (5,)
    assert np.all(np.diff(lam) > 0)
    assert lam[0] == pytest.approx(1.1577738836977, rel=2e-3)


def test_heat_kernel_at_half_is_cauchy():
    x, t = 0.7, 0.4
    assert fracheat.heat_kernel(0.5, x, t) == pytest.approx(t / (math.pi * (x * x + t * t)), rel=1e-8)


def test_default_config_round_trip():
    cfg = fracheat.default_config()
    assert cfg["measure"]["kind"] == "fractional_laplacian"
    assert fracheat.config_hash(cfg) == fracheat.config_hash(None)
    cfg["out"] = "elsewhere"
    assert fracheat.config_hash(cfg) == fracheat.config_hash(None)


def test_run_bootstrap_and_symbol():
    cfg = {"measure": {"kind": "fractional_laplacian", "n": 3, "s": 0.5}}
    report = fracheat.run("bootstrap", cfg)
    assert report["w"] == 3
    report = fracheat.run("symbol")
    assert report["command"] == "symbol"


def test_validation_errors():
    with pytest.raises(ValueError):
        fracheat.run("eig", {"measure": {"kind": "fractional_laplacian", "n": 1, "s": 1.5}})
    with pytest.raises(ValueError):
        fracheat.run("no-such-command")
    with pytest.raises(ValueError):
        fracheat.run("symbol", {"bogus": 1})


def test_written_artifacts(tmp_path):
    cfg = {"out": str(tmp_path)}
    fracheat.run("symbol", cfg, write=True)
    name = "symbol-" + fracheat.config_hash(cfg)
    assert (tmp_path / (name + ".csv")).read_text().startswith("config_hash,")
    assert (tmp_path / (name + ".json")).exists()


@pytest.mark.skipif("FRACHEAT_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_exit_codes(tmp_path):
    cli = os.environ["FRACHEAT_CLI"]
    ok = subprocess.run([cli, "bootstrap", "--n", "3", "--s", "0.5", "--out", str(tmp_path)],
                        capture_output=True, text=True)
    assert ok.returncode == 0
    bad = subprocess.run([cli, "eig", "--s", "1.5", "--out", str(tmp_path)], capture_output=True, text=True)
    assert bad.returncode == 1
    assert '"validation"' in bad.stdout
