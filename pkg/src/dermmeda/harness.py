"""Seeded experiment batteries: config parsing, execution, CSV output.

Layout written under ``output_dir``::

    summary.csv         problem, algorithm, repeats, generations, mean_igd, std_igd, failed_runs, note
    traces/<run>.csv    run_id, seed, problem, algorithm, generation, igd, evaluations
    timing.csv          run_id, problem, algorithm, seed, wall_ms
    manifest.json       seed scheme and the resolved run templates

Run ``i`` of every template uses seed ``base_seed + i``. Everything except
``timing.csv`` is a pure function of the experiment spec.
"""

from __future__ import annotations

import configparser
import csv
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algorithms import AlgoConfig, Algorithm, run
from .allocation import MixParams
from .benchmarks import ProblemId, make_problem
from .core import EvaluationError
from .de import DeParams

log = logging.getLogger(__name__)

OUTPUT_ENV = "DERMMEDA_OUTPUT_DIR"
EXPERIMENT_KEYS = {"repeats", "base_seed", "trace_stride", "output_dir"}
RUN_KEYS = {"problem", "algorithm", "population", "generations", "clusters", "alpha", "beta", "de_f", "de_cr", "eta"}
TRACE_COLUMNS = ["run_id", "seed", "problem", "algorithm", "generation", "igd", "evaluations"]
SUMMARY_COLUMNS = ["problem", "algorithm", "repeats", "generations", "mean_igd", "std_igd", "failed_runs", "note"]
SWEEP_COLUMNS = ["parameter", "value", "problem", "algorithm", "repeats", "mean_igd", "std_igd", "mean_evaluations"]


class ConfigError(ValueError):
    pass


def fmt(value) -> str:
    """Locale-independent number formatting, 17 significant digits for floats."""
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


@dataclass
class ExperimentSpec:
    runs: list[AlgoConfig]
    repeats: int = 20
    base_seed: int = 0
    output_dir: Path = Path("results")
    trace_stride: int = 1

    def __post_init__(self) -> None:
        if self.repeats < 1:
            raise ConfigError("repeats must be at least 1")
        if not self.runs:
            raise ConfigError("experiment has no runs")
        self.output_dir = Path(self.output_dir)


@dataclass
class SummaryRow:
    problem: str
    algorithm: str
    repeats: int
    generations: int
    mean_igd: float
    std_igd: float
    failed_runs: int = 0
    note: str = ""
    mean_evaluations: float = 0.0
    mean_wall_ms: float = field(default=0.0, compare=False)

    def csv_row(self) -> list[str]:
        return [fmt(getattr(self, c)) for c in SUMMARY_COLUMNS]


# ---------------------------------------------------------------- config


def _parse_list(raw: str) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def _run_templates(section: str, values: dict[str, str], trace_stride: int) -> list[AlgoConfig]:
    try:
        problems = [ProblemId.parse(p) for p in _parse_list(values["problem"])]
        algorithms = [Algorithm.parse(a) for a in _parse_list(values.get("algorithm", "de-rm-meda"))]
        population = values.get("population", "auto").strip().lower()
        de = DeParams(
            F=float(values.get("de_f", 0.5)),
            CR=float(values.get("de_cr", 0.9)),
            eta=float(values.get("eta", 20.0)),
        )
        mix = MixParams(float(values.get("alpha", 0.3)), float(values.get("beta", 0.6)))
        out = []
        for p in problems:
            for a in algorithms:
                out.append(
                    AlgoConfig(
                        problem=p,
                        algorithm=a,
                        N=None if population in ("", "auto") else int(population),
                        generations=int(values.get("generations", 500)),
                        K=int(values.get("clusters", 5)),
                        de=de,
                        mix=mix,
                        trace_stride=trace_stride,
                    )
                )
        return out
    except KeyError as exc:
        raise ConfigError(f"[{section}] is missing required key {exc.args[0]!r}") from None
    except ValueError as exc:
        raise ConfigError(f"[{section}] {exc}") from None


def parse_config(text: str, output_dir: str | os.PathLike | None = None) -> ExperimentSpec:
    """Parse ``key = value`` lines grouped in ``[section]`` blocks.

    ``[experiment]`` carries the battery settings and may also give defaults
    for run keys; every other section describes run templates, with comma
    lists for ``problem`` and ``algorithm`` expanded as a cross product.
    Output directory precedence: argument, environment, config file.
    """
    parser = configparser.ConfigParser(
        default_section="__none__", interpolation=None, inline_comment_prefixes=(";", "#")
    )
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    exp = dict(parser["experiment"]) if parser.has_section("experiment") else {}
    unknown = set(exp) - EXPERIMENT_KEYS - RUN_KEYS
    if unknown:
        raise ConfigError(f"[experiment] has unknown keys: {sorted(unknown)}")
    try:
        repeats = int(exp.get("repeats", 20))
        base_seed = int(exp.get("base_seed", 0))
        trace_stride = int(exp.get("trace_stride", 1))
    except ValueError as exc:
        raise ConfigError(f"[experiment] {exc}") from None
    if trace_stride < 1:
        raise ConfigError("trace_stride must be positive")

    defaults = {k: v for k, v in exp.items() if k in RUN_KEYS}
    runs: list[AlgoConfig] = []
    for section in parser.sections():
        if section == "experiment":
            continue
        values = dict(parser[section])
        unknown = set(values) - RUN_KEYS
        if unknown:
            raise ConfigError(f"[{section}] has unknown keys: {sorted(unknown)}")
        runs.extend(_run_templates(section, {**defaults, **values}, trace_stride))
    if not runs and "problem" in defaults:
        runs = _run_templates("experiment", defaults, trace_stride)

    out = output_dir or os.environ.get(OUTPUT_ENV) or exp.get("output_dir") or "results"
    return ExperimentSpec(runs, repeats, base_seed, Path(out), trace_stride)


def load_config(path, output_dir=None) -> ExperimentSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, output_dir)


# ------------------------------------------------------------- execution


def run_id(cfg: AlgoConfig, index: int) -> str:
    tag = f"{cfg.problem.value}-{cfg.algorithm.value}"
    if cfg.n_var is not None:
        tag += f"-n{cfg.n_var}"
    return f"{tag}-r{index:03d}"


def _execute(task: tuple[str, AlgoConfig]) -> dict:
    rid, cfg = task
    try:
        res = run(cfg)
    except EvaluationError as exc:
        return {"run_id": rid, "error": str(exc)}
    return {
        "run_id": rid,
        "trace": [(g, float(v), int(e)) for g, v, e in res.igd_trace],
        "evaluations": res.evaluations,
        "wall_ms": res.wall_time * 1000.0,
    }


def _tasks(spec: ExperimentSpec) -> list[tuple[str, AlgoConfig]]:
    tasks = []
    for template in spec.runs:
        for i in range(spec.repeats):
            cfg = template.with_(seed=spec.base_seed + i, trace_stride=spec.trace_stride)
            tasks.append((run_id(cfg, i), cfg))
    ids = [t[0] for t in tasks]
    if len(set(ids)) != len(ids):
        raise ConfigError("duplicate run templates in experiment")
    return tasks


def _execute_all(tasks, workers: int) -> list[dict]:
    if workers <= 1 or len(tasks) <= 1:
        return [_execute(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_execute, tasks))


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def summarize(finals: list[float], failed: int, cfg: AlgoConfig, repeats: int) -> SummaryRow:
    notes = []
    if finals:
        mean = float(np.mean(finals))
        std = float(np.std(finals, ddof=1)) if len(finals) > 1 else 0.0
        if len(finals) == 1:
            notes.append("single run: std reported as 0")
    else:
        mean = std = math.nan
    if failed:
        notes.append(f"{failed} run(s) failed")
    return SummaryRow(
        problem=cfg.problem.value,
        algorithm=cfg.algorithm.value,
        repeats=repeats,
        generations=cfg.generations,
        mean_igd=mean,
        std_igd=std,
        failed_runs=failed,
        note="; ".join(notes),
    )


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> list[SummaryRow]:
    """Execute every (template, repeat) pair and write the CSV artifacts."""
    tasks = _tasks(spec)
    log.info("running %d runs with %d worker(s)", len(tasks), workers)
    results = _execute_all(tasks, workers)
    out = spec.output_dir
    out.mkdir(parents=True, exist_ok=True)

    timing = []
    rows = []
    for t_index, template in enumerate(spec.runs):
        chunk = results[t_index * spec.repeats : (t_index + 1) * spec.repeats]
        chunk_tasks = tasks[t_index * spec.repeats : (t_index + 1) * spec.repeats]
        finals, evals, walls, failed = [], [], [], 0
        for (rid, cfg), res in zip(chunk_tasks, chunk):
            if "error" in res:
                failed += 1
                log.error("run %s failed: %s", rid, res["error"])
                continue
            trace_rows = [
                [rid, cfg.seed, cfg.problem.value, cfg.algorithm.value, g, fmt(v), e] for g, v, e in res["trace"]
            ]
            _write_csv(out / "traces" / f"{rid}.csv", TRACE_COLUMNS, trace_rows)
            finals.append(res["trace"][-1][1])
            evals.append(res["evaluations"])
            walls.append(res["wall_ms"])
            timing.append([rid, cfg.problem.value, cfg.algorithm.value, cfg.seed, fmt(res["wall_ms"])])
        row = summarize(finals, failed, template, spec.repeats)
        row.mean_evaluations = float(np.mean(evals)) if evals else math.nan
        row.mean_wall_ms = float(np.mean(walls)) if walls else math.nan
        rows.append(row)

    _write_csv(out / "summary.csv", SUMMARY_COLUMNS, [r.csv_row() for r in rows])
    _write_csv(out / "timing.csv", ["run_id", "problem", "algorithm", "seed", "wall_ms"], timing)
    manifest = {
        "seed_scheme": "seed = base_seed + run_index",
        "base_seed": spec.base_seed,
        "repeats": spec.repeats,
        "trace_stride": spec.trace_stride,
        "runs": [_describe(c) for c in spec.runs],
        "failed_runs": [r["run_id"] for r in results if "error" in r],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return rows


def _describe(cfg: AlgoConfig) -> dict:
    return {
        "problem": cfg.problem.value,
        "algorithm": cfg.algorithm.value,
        "population": cfg.N,
        "generations": cfg.generations,
        "clusters": cfg.K,
        "alpha": cfg.mix.alpha,
        "beta": cfg.mix.beta,
        "de_f": cfg.de.F,
        "de_cr": cfg.de.CR,
        "eta": cfg.de.eta,
        "n_var": cfg.n_var,
    }


# ----------------------------------------------------------------- sweep

SWEEP_PARAMS = ("K", "alpha_beta", "dim")


def _parse_sweep_value(parameter: str, raw) -> object:
    if parameter == "K":
        return int(raw)
    if parameter == "dim":
        return int(raw)
    if isinstance(raw, (tuple, list)):
        a, b = raw
    else:
        a, b = str(raw).replace("/", ":").replace("-", ":").split(":")
    return (float(a), float(b))


def _apply(cfg: AlgoConfig, parameter: str, value) -> AlgoConfig:
    if parameter == "K":
        if cfg.algorithm is Algorithm.NSGA2_DE:
            raise ConfigError("cluster count does not apply to nsga2-de")
        return cfg.with_(K=value)
    if parameter == "alpha_beta":
        if cfg.algorithm is not Algorithm.DE_RM_MEDA:
            raise ConfigError(f"alpha/beta only apply to de-rm-meda, not {cfg.algorithm.value}")
        return cfg.with_(mix=MixParams(*value))
    try:
        make_problem(cfg.problem, value)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.with_(n_var=value)


def sweep(spec: ExperimentSpec, parameter: str, values, workers: int = 1) -> list[dict]:
    """Re-run the experiment once per parameter value; one CSV row per (value, template)."""
    if parameter not in SWEEP_PARAMS:
        raise ConfigError(f"unknown sweep parameter {parameter!r}; expected one of {SWEEP_PARAMS}")
    parsed = [_parse_sweep_value(parameter, v) for v in values]
    plans = [(v, [_apply(c, parameter, v) for c in spec.runs]) for v in parsed]

    rows = []
    for value, runs in plans:
        label = f"{value[0]:g}:{value[1]:g}" if parameter == "alpha_beta" else str(value)
        sub = ExperimentSpec(
            runs=runs,
            repeats=spec.repeats,
            base_seed=spec.base_seed,
            output_dir=spec.output_dir / f"sweep_{parameter}" / label.replace(":", "_"),
            trace_stride=spec.trace_stride,
        )
        for r in run_experiment(sub, workers):
            rows.append(
                {
                    "parameter": parameter,
                    "value": label,
                    "problem": r.problem,
                    "algorithm": r.algorithm,
                    "repeats": r.repeats,
                    "mean_igd": r.mean_igd,
                    "std_igd": r.std_igd,
                    "mean_evaluations": r.mean_evaluations,
                    "failed_runs": r.failed_runs,
                }
            )
    _write_csv(
        spec.output_dir / f"sweep_{parameter}.csv",
        SWEEP_COLUMNS,
        [[fmt(r[c]) for c in SWEEP_COLUMNS] for r in rows],
    )
    return rows


def read_trace(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))
