import csv
import json

import numpy as np
import pytest

from dermmeda import algorithms, harness
from dermmeda.algorithms import Algorithm
from dermmeda.core import Problem
from dermmeda.harness import ConfigError, load_config, parse_config, run_experiment, sweep

SMALL = """
[experiment]
repeats = 2
base_seed = 7
trace_stride = 1

[battery]
problem = F7, F8
algorithm = de-rm-meda, nsga2-de
population = 20
generations = 3
clusters = 2
"""


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_parse_cross_product():
    spec = parse_config(SMALL, "out")
    assert spec.repeats == 2 and spec.base_seed == 7
    assert [(c.problem.value, c.algorithm.value) for c in spec.runs] == [
        ("F7", "de-rm-meda"),
        ("F7", "nsga2-de"),
        ("F8", "de-rm-meda"),
        ("F8", "nsga2-de"),
    ]
    assert all(c.N == 20 and c.K == 2 and c.generations == 3 for c in spec.runs)


def test_parse_defaults_and_all_keys():
    text = """
[experiment]
output_dir = elsewhere
generations = 50
[a]
problem = F6
alpha = 0.1
beta = 0.7
de_f = 0.4
de_cr = 0.8
eta = 15
[b]
problem = F1
algorithm = rm-meda
population = 100
"""
    spec = parse_config(text)
    f6, f1 = spec.runs
    assert f6.N == 600 and f6.generations == 50 and spec.repeats == 20
    assert (f6.mix.alpha, f6.mix.beta, f6.de.F, f6.de.CR, f6.de.eta) == (0.1, 0.7, 0.4, 0.8, 15.0)
    assert f1.N == 100 and f1.algorithm is Algorithm.RM_MEDA
    assert str(spec.output_dir) == "elsewhere"


def test_full_battery_has_27_templates():
    text = "[all]\nproblem = F1,F2,F3,F4,F5,F6,F7,F8,F9\nalgorithm = de-rm-meda,rm-meda,nsga2-de\n"
    assert len(parse_config(text).runs) == 27


def test_output_dir_precedence(monkeypatch):
    text = SMALL.replace("trace_stride = 1", "trace_stride = 1\noutput_dir = from_config")
    assert str(parse_config(text).output_dir) == "from_config"
    monkeypatch.setenv(harness.OUTPUT_ENV, "from_env")
    assert str(parse_config(text).output_dir) == "from_env"
    assert str(parse_config(text, "from_arg").output_dir) == "from_arg"


@pytest.mark.parametrize(
    "text",
    [
        "[a]\nalgorithm = rm-meda\n",
        "[a]\nproblem = F10\n",
        "[a]\nproblem = F1\nalgorithm = moead\n",
        "[a]\nproblem = F1\nbogus = 1\n",
        "[experiment]\nrepeats = 0\n[a]\nproblem = F1\n",
        "[experiment]\nrepeats = many\n[a]\nproblem = F1\n",
        "[a]\nproblem = F1\nalpha = 0.6\nbeta = 0.6\n",
        "[a]\nproblem = F1\npopulation = 3\n",
        "no section header\n",
        "[experiment]\nrepeats = 2\n",
    ],
)
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.ini")


@pytest.fixture(scope="module")
def battery(tmp_path_factory):
    out = tmp_path_factory.mktemp("serial")
    rows = run_experiment(parse_config(SMALL, out))
    return out, rows


def test_outputs_written(battery):
    out, rows = battery
    assert len(rows) == 4
    summary = _read(out / "summary.csv")
    assert summary[0] == harness.SUMMARY_COLUMNS
    assert len(summary) == 5
    traces = sorted(p.name for p in (out / "traces").iterdir())
    assert len(traces) == 8 and traces[0] == "F7-de-rm-meda-r000.csv"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed_scheme"] == "seed = base_seed + run_index"
    assert _read(out / "timing.csv")[0] == ["run_id", "problem", "algorithm", "seed", "wall_ms"]


def test_trace_schema_and_seeds(battery):
    out, _ = battery
    rows = harness.read_trace(out / "traces" / "F8-nsga2-de-r001.csv")
    assert list(rows[0]) == harness.TRACE_COLUMNS
    assert [int(r["generation"]) for r in rows] == [0, 1, 2, 3]
    assert {r["seed"] for r in rows} == {"8"}
    assert [int(r["evaluations"]) for r in rows] == [20, 40, 60, 80]


def test_summary_is_derivable_from_traces(battery):
    out, _ = battery
    for row in harness.read_trace(out / "summary.csv"):
        finals = []
        for i in range(int(row["repeats"])):
            trace = harness.read_trace(out / "traces" / f"{row['problem']}-{row['algorithm']}-r{i:03d}.csv")
            finals.append(float(trace[-1]["igd"]))
        assert row["mean_igd"] == harness.fmt(float(np.mean(finals)))
        assert row["std_igd"] == harness.fmt(float(np.std(finals, ddof=1)))


def test_rerun_and_parallel_are_byte_identical(battery, tmp_path):
    out, _ = battery
    again, parallel = tmp_path / "again", tmp_path / "parallel"
    run_experiment(parse_config(SMALL, again))
    run_experiment(parse_config(SMALL, parallel), workers=2)
    for other in (again, parallel):
        assert (other / "summary.csv").read_bytes() == (out / "summary.csv").read_bytes()
        assert (other / "manifest.json").read_bytes() == (out / "manifest.json").read_bytes()
        for trace in (out / "traces").iterdir():
            assert (other / "traces" / trace.name).read_bytes() == trace.read_bytes()


def test_numbers_use_17_digits(battery):
    out, _ = battery
    value = harness.read_trace(out / "summary.csv")[0]["mean_igd"]
    assert float(value) == float(format(float(value), ".17g"))
    assert harness.fmt(0.1) == "0.10000000000000001"


def test_single_repeat_flagged(tmp_path):
    spec = parse_config(SMALL.replace("repeats = 2", "repeats = 1"), tmp_path)
    rows = run_experiment(spec)
    assert all(r.std_igd == 0.0 and "single run" in r.note for r in rows)


class _Nan(Problem):
    def __init__(self, inner):
        self.inner, self.n_obj, self.bounds = inner, inner.n_obj, inner.bounds

    def _evaluate(self, X):
        return np.full((X.shape[0], self.n_obj), np.nan)


def test_failed_runs_recorded(tmp_path, monkeypatch):
    real = algorithms.make_problem
    monkeypatch.setattr(algorithms, "make_problem", lambda pid, n=None: _Nan(real(pid, n)) if pid == "F8" else real(pid, n))
    rows = run_experiment(parse_config(SMALL, tmp_path))
    by = {(r.problem, r.algorithm): r for r in rows}
    assert by["F8", "de-rm-meda"].failed_runs == 2 and np.isnan(by["F8", "de-rm-meda"].mean_igd)
    assert by["F7", "de-rm-meda"].failed_runs == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert len(manifest["failed_runs"]) == 4


def test_sweep_k(tmp_path):
    spec = parse_config(SMALL.replace("F7, F8", "F7").replace(", nsga2-de", ""), tmp_path)
    rows = sweep(spec, "K", ["2", "3"])
    assert [r["value"] for r in rows] == ["2", "3"]
    table = _read(tmp_path / "sweep_K.csv")
    assert table[0] == harness.SWEEP_COLUMNS and len(table) == 3
    assert (tmp_path / "sweep_K" / "3" / "summary.csv").exists()


def test_sweep_alpha_beta_and_dim(tmp_path):
    text = "[experiment]\nrepeats = 1\n[a]\nproblem = F1\npopulation = 20\ngenerations = 2\nclusters = 2\n"
    rows = sweep(parse_config(text, tmp_path), "alpha_beta", ["0.1:0.7", "0.3:0.6"])
    assert [r["value"] for r in rows] == ["0.1:0.7", "0.3:0.6"]
    rows = sweep(parse_config(text, tmp_path), "dim", ["12"])
    assert rows[0]["mean_evaluations"] == 60
    assert (tmp_path / "sweep_dim" / "12" / "traces" / "F1-de-rm-meda-n12-r000.csv").exists()


@pytest.mark.parametrize(
    "problem, algorithm, param, value",
    [
        ("F6", "de-rm-meda", "dim", "30"),
        ("F7", "de-rm-meda", "dim", "30"),
        ("F1", "nsga2-de", "K", "3"),
        ("F1", "rm-meda", "alpha_beta", "0.1:0.7"),
        ("F1", "de-rm-meda", "population", "10"),
    ],
)
def test_sweep_rejections(tmp_path, problem, algorithm, param, value):
    spec = parse_config(f"[a]\nproblem = {problem}\nalgorithm = {algorithm}\n", tmp_path)
    with pytest.raises(ConfigError):
        sweep(spec, param, [value])
    assert not (tmp_path / f"sweep_{param}.csv").exists()


@pytest.mark.parametrize("name, templates, repeats", [("full", 27, 20), ("desk", 27, 5), ("sweep_k", 1, 5)])
def test_shipped_configs(name, templates, repeats):
    from pathlib import Path

    spec = load_config(Path(__file__).parent.parent / "configs" / f"{name}.ini")
    assert len(spec.runs) == templates and spec.repeats == repeats


def test_inline_comments():
    text = "[experiment]  ; battery\nrepeats = 5\n[b]  ; runs\nproblem = F1, F5  ; two\ngenerations = 50  # short\n"
    spec = parse_config(text)
    assert spec.repeats == 5 and [c.problem.value for c in spec.runs] == ["F1", "F5"]
    assert spec.runs[0].generations == 50
