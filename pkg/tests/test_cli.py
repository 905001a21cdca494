import subprocess
import sys

import numpy as np
import pytest

from dermmeda import algorithms
from dermmeda.benchmarks import read_pf, sample_true_pf
from dermmeda.cli import main
from dermmeda.core import Problem

CONFIG = """
[experiment]
repeats = 2
[a]
problem = F7
algorithm = de-rm-meda, rm-meda
population = 20
generations = 2
clusters = 2
"""


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text(CONFIG)
    return path


def test_run(config, tmp_path, capsys):
    out = tmp_path / "res"
    assert main(["run", "--config", str(config), "--out", str(out)]) == 0
    assert (out / "summary.csv").exists()
    assert "mean_igd=" in capsys.readouterr().out


def test_run_env_override(config, tmp_path, monkeypatch):
    monkeypatch.setenv("DERMMEDA_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["run", "--config", str(config)]) == 0
    assert (tmp_path / "env" / "summary.csv").exists()


def test_bad_config_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[a]\nproblem = F42\n")
    assert main(["run", "--config", str(bad)]) == 2
    assert "F42" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.ini")]) == 2


class _Nan(Problem):
    def __init__(self, inner):
        self.n_obj, self.bounds = inner.n_obj, inner.bounds

    def _evaluate(self, X):
        return np.full((X.shape[0], self.n_obj), np.inf)


def test_failed_run_exit_1(config, tmp_path, monkeypatch):
    real = algorithms.make_problem
    monkeypatch.setattr(algorithms, "make_problem", lambda pid, n=None: _Nan(real(pid, n)))
    assert main(["run", "--config", str(config), "--out", str(tmp_path / "r")]) == 1


def test_sweep(config, tmp_path):
    out = tmp_path / "sw"
    assert main(["sweep", "--config", str(config), "--param", "K", "--values", "2,3", "--out", str(out)]) == 0
    assert (out / "sweep_K.csv").read_text().count("\n") == 5


def test_sweep_dim_rejected(config, tmp_path, capsys):
    code = main(["sweep", "--config", str(config), "--param", "dim", "--values", "30", "--out", str(tmp_path)])
    assert code == 2
    assert "F7" in capsys.readouterr().err


def test_pf_and_igd(tmp_path, capsys):
    pf = tmp_path / "f1.pf"
    assert main(["pf", "--problem", "F1", "--count", "200", "--out", str(pf)]) == 0
    assert np.array_equal(read_pf(pf), sample_true_pf("F1", 200))

    approx = tmp_path / "approx.csv"
    approx.write_text("f1,f2\n0.5,0.5\n")
    ref = tmp_path / "ref.pf"
    ref.write_text("0 1\n1 0\n")
    capsys.readouterr()
    assert main(["igd", "--approx", str(approx), "--reference", str(ref)]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(np.sqrt(0.5), abs=1e-15)

    np.savetxt(approx, sample_true_pf("F1"), delimiter=",")
    assert main(["igd", "--approx", str(approx), "--problem", "F1"]) == 0
    assert float(capsys.readouterr().out) < 1e-12


def test_igd_dimension_mismatch(tmp_path):
    approx = tmp_path / "a.csv"
    approx.write_text("0.1,0.2,0.3\n")
    assert main(["igd", "--approx", str(approx), "--problem", "F1"]) == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "dermmeda", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "sweep" in res.stdout
