"""DE/RM-MEDA and the two baselines it is compared against.

All three share initialization (Latin hypercube), offspring budget (N per
generation) and environmental selection (NSGA-II elitism). Randomness comes
from one master seed split into named streams, so e.g. turning the DE arm
off does not shift the draws of the model arm.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .allocation import MixParams, allocate, convergence_ratio
from .benchmarks import ProblemId, default_pf_size, latin_hypercube_init, make_problem, sample_true_pf
from .core import Evaluator, Population
from .de import ClusterTooSmall, DeParams, de_trial_batch, draw_parents, polynomial_mutation, unique_ids
from .local_pca import partition
from .metrics import igd
from .model import build_model, model_volume, sample_model
from .selection import elite_select, rank_and_crowding

STREAMS = ("init", "partition", "model", "de", "mutation")


class Algorithm(str, enum.Enum):
    DE_RM_MEDA = "de-rm-meda"
    RM_MEDA = "rm-meda"
    NSGA2_DE = "nsga2-de"

    @classmethod
    def parse(cls, tag) -> "Algorithm":
        if isinstance(tag, cls):
            return tag
        key = str(tag).strip().lower().replace("/", "-").replace("_", "-").replace("nsga-ii", "nsga2")
        aliases = {"dermmeda": "de-rm-meda", "rmmeda": "rm-meda", "nsga2de": "nsga2-de"}
        key = aliases.get(key.replace("-", ""), key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown algorithm {tag!r}; expected one of {[a.value for a in cls]}") from None


@dataclass(frozen=True)
class AlgoConfig:
    problem: ProblemId
    algorithm: Algorithm = Algorithm.DE_RM_MEDA
    N: int | None = None  # None: 600 for F6, else 300
    generations: int = 500
    K: int = 5
    de: DeParams = field(default_factory=DeParams)
    mix: MixParams = field(default_factory=MixParams)
    seed: int = 0
    trace_stride: int = 1
    n_var: int | None = None
    pf_size: int | None = None
    lpca_max_iters: int = 50
    lpca_restarts: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "problem", ProblemId.parse(self.problem))
        object.__setattr__(self, "algorithm", Algorithm.parse(self.algorithm))
        if self.N is None:
            object.__setattr__(self, "N", 600 if self.problem is ProblemId.F6 else 300)
        if not self.N >= self.K >= 1:
            raise ValueError(f"need N >= K >= 1, got N={self.N}, K={self.K}")
        if self.generations < 0:
            raise ValueError("generations must be non-negative")
        if self.trace_stride < 1:
            raise ValueError("trace_stride must be positive")

    def with_(self, **changes) -> "AlgoConfig":
        return replace(self, **changes)


@dataclass
class RunResult:
    config: AlgoConfig
    final_population: Population
    igd_trace: list[tuple[int, float, int]]  # (generation, igd, evaluations so far)
    evaluations: int
    wall_time: float
    arm_counts: list[tuple[int, int]]  # per generation: (model offspring, DE offspring)

    @property
    def final_igd(self) -> float:
        return self.igd_trace[-1][1]

    def igd_at(self, generation: int) -> float:
        for g, value, _ in self.igd_trace:
            if g == generation:
                return value
        raise KeyError(f"generation {generation} was not traced")


def rng_streams(seed: int) -> dict[str, np.random.Generator]:
    return {
        name: np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(i,)))
        for i, name in enumerate(STREAMS)
    }


class _Run:
    """State shared by the generation loops."""

    def __init__(self, config: AlgoConfig):
        self.cfg = config
        self.problem = make_problem(config.problem, config.n_var)
        self.bounds = self.problem.bounds
        self.m = self.problem.n_obj
        self.evaluator = Evaluator(self.problem)
        self.reference = sample_true_pf(config.problem, config.pf_size or default_pf_size(config.problem))
        self.rng = rng_streams(config.seed)
        self.trace: list[tuple[int, float, int]] = []
        self.arms: list[tuple[int, int]] = []
        self.started = time.perf_counter()
        X = latin_hypercube_init(self.bounds, config.N, self.rng["init"])
        self.evaluator.generation = 0
        self.pop = Population(X, self.evaluator(X))
        self.record(0)

    def record(self, gen: int) -> None:
        if gen % self.cfg.trace_stride == 0 or gen == self.cfg.generations:
            self.trace.append((gen, igd(self.pop.f, self.reference), self.evaluator.count))

    def advance(self, gen: int, offspring: np.ndarray, arms: tuple[int, int]) -> None:
        self.evaluator.generation = gen
        Q = Population(offspring, self.evaluator(offspring))
        self.pop = elite_select(Population.concat(self.pop, Q), self.cfg.N)
        self.arms.append(arms)
        self.record(gen)

    def result(self) -> RunResult:
        return RunResult(
            config=self.cfg,
            final_population=self.pop,
            igd_trace=self.trace,
            evaluations=self.evaluator.count,
            wall_time=time.perf_counter() - self.started,
            arm_counts=self.arms,
        )


def _clustered_offspring(run: _Run, hybrid: bool) -> tuple[np.ndarray, tuple[int, int]]:
    cfg, pop, m = run.cfg, run.pop, run.m
    part = partition(pop, cfg.K, m, run.rng["partition"], cfg.lpca_max_iters, cfg.lpca_restarts)
    clusters = [(c, part.subspaces[k]) for k, c in enumerate(part.clusters) if c.size]
    models = [build_model(pop.x[c], sub, m) for c, sub in clusters]
    volumes = [model_volume(md) for md in models]
    if hybrid:
        ratios = [convergence_ratio(sub.eigenvalues, m) for _, sub in clusters]
        mix = cfg.mix
    else:
        ratios = [1.0] * len(clusters)
        mix = MixParams(1.0, 0.0)
    quotas = allocate(cfg.N, volumes, ratios, mix)

    ids = unique_ids(pop.x)
    rank, _ = rank_and_crowding(pop.f) if hybrid else (None, None)
    nondominated = np.flatnonzero(rank == 0) if hybrid else None
    parts = []
    n_model = n_de = 0
    for (members, _), model, quota in zip(clusters, models, quotas):
        k1, k2 = quota.k1, quota.k2
        if k2:
            try:
                idx = draw_parents(members, pop.x, nondominated, k2, run.rng["de"], ids=ids)
            except ClusterTooSmall:
                k1, k2 = k1 + k2, 0
        if k1:
            parts.append(sample_model(model, k1, run.bounds, run.rng["model"]))
        if k2:
            r1, r2, r3, best = (pop.x[idx[:, j]] for j in range(4))
            trial = de_trial_batch(r1, r2, r3, best, cfg.de, run.rng["de"])
            parts.append(polynomial_mutation(trial, cfg.de, run.bounds, run.rng["mutation"]))
        n_model += k1
        n_de += k2
    return np.vstack(parts), (n_model, n_de)


def _run_clustered(config: AlgoConfig, hybrid: bool) -> RunResult:
    run = _Run(config)
    for gen in range(1, config.generations + 1):
        run.evaluator.generation = gen
        offspring, arms = _clustered_offspring(run, hybrid)
        run.advance(gen, offspring, arms)
    return run.result()


def run_de_rm_meda(config: AlgoConfig) -> RunResult:
    if config.algorithm is not Algorithm.DE_RM_MEDA:
        raise ValueError(f"config is for {config.algorithm.value}")
    return _run_clustered(config, hybrid=True)


def run_rm_meda(config: AlgoConfig) -> RunResult:
    if config.algorithm is not Algorithm.RM_MEDA:
        raise ValueError(f"config is for {config.algorithm.value}")
    return _run_clustered(config, hybrid=False)


def _tournament(rank: np.ndarray, crowd: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    a, b = rng.integers(0, rank.size, size=(2, size))
    b_wins = (rank[b] < rank[a]) | ((rank[b] == rank[a]) & (crowd[b] > crowd[a]))
    return np.where(b_wins, b, a)


def _nsga2_parents(pop: Population, rng: np.random.Generator) -> np.ndarray:
    N = len(pop)
    rank, crowd = rank_and_crowding(pop.f)
    ids = unique_ids(pop.x)
    n_ids = int(ids.max()) + 1
    best = rng.choice(np.flatnonzero(rank == 0), size=N)
    r1 = _tournament(rank, crowd, N, rng)
    if n_ids < 4:
        r23 = rng.integers(0, N, size=(N, 2))
        return np.column_stack([r1, r23, best])
    clash = ids[r1] == ids[best]
    while clash.any():
        r1[clash] = _tournament(rank, crowd, int(clash.sum()), rng)
        clash = ids[r1] == ids[best]
    _, rep = np.unique(ids, return_index=True)
    keys = rng.random((N, n_ids))
    keys[np.arange(N), ids[best]] = np.inf
    keys[np.arange(N), ids[r1]] = np.inf
    pick = np.argsort(keys, axis=1, kind="stable")[:, :2]
    return np.column_stack([r1, rep[pick], best])


def run_nsga2_de(config: AlgoConfig) -> RunResult:
    if config.algorithm is not Algorithm.NSGA2_DE:
        raise ValueError(f"config is for {config.algorithm.value}")
    run = _Run(config)
    for gen in range(1, config.generations + 1):
        run.evaluator.generation = gen
        idx = _nsga2_parents(run.pop, run.rng["de"])
        r1, r2, r3, best = (run.pop.x[idx[:, j]] for j in range(4))
        trial = de_trial_batch(r1, r2, r3, best, config.de, run.rng["de"])
        offspring = polynomial_mutation(trial, config.de, run.bounds, run.rng["mutation"])
        run.advance(gen, offspring, (0, config.N))
    return run.result()


RUNNERS = {
    Algorithm.DE_RM_MEDA: run_de_rm_meda,
    Algorithm.RM_MEDA: run_rm_meda,
    Algorithm.NSGA2_DE: run_nsga2_de,
}


def run(config: AlgoConfig) -> RunResult:
    """Dispatch on ``config.algorithm``."""
    return RUNNERS[config.algorithm](config)
