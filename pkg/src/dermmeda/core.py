"""Decision/objective space primitives shared by every optimizer.

Populations are stored struct-of-arrays: ``x`` is ``(N, n)`` and ``f`` is
``(N, m)``. All arithmetic is float64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class EvaluationError(RuntimeError):
    """An objective function produced a non-finite value."""

    def __init__(self, x: np.ndarray, f: np.ndarray, generation: int | None = None):
        self.x = np.array(x, dtype=float)
        self.f = np.array(f, dtype=float)
        self.generation = generation
        where = "" if generation is None else f" at generation {generation}"
        super().__init__(f"non-finite objective {self.f.tolist()} for x={self.x.tolist()}{where}")


@dataclass(frozen=True)
class BoxBounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lo = np.array(self.lower, dtype=float).reshape(-1)
        hi = np.array(self.upper, dtype=float).reshape(-1)
        if lo.shape != hi.shape or lo.size < 1:
            raise ValueError(f"bounds shape mismatch: {lo.shape} vs {hi.shape}")
        if not np.all(lo < hi):
            raise ValueError("every lower bound must be strictly below its upper bound")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def n(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all((x >= self.lower) & (x <= self.upper)))


def dominates(u, v) -> bool:
    """Pareto dominance for minimization: ``u`` no worse everywhere and ``u != v``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"objective vectors differ in length: {u.shape} vs {v.shape}")
    return bool(np.all(u <= v) and np.any(u < v))


def dominance_matrix(f: np.ndarray) -> np.ndarray:
    """Boolean matrix ``D`` with ``D[i, j]`` true iff row i dominates row j."""
    f = np.atleast_2d(np.asarray(f, dtype=float))
    size = f.shape[0]
    le = np.ones((size, size), dtype=bool)
    lt = np.zeros((size, size), dtype=bool)
    for col in f.T:
        a = col[:, None]
        b = col[None, :]
        le &= a <= b
        lt |= a < b
    return le & lt


def repair(x, bounds: BoxBounds) -> np.ndarray:
    """Clamp each coordinate into the box. Works row-wise on 2-D input."""
    return np.clip(np.asarray(x, dtype=float), bounds.lower, bounds.upper)


class Problem:
    """Box-constrained m-objective minimization problem.

    Subclasses implement ``_evaluate(X)`` for a ``(k, n)`` batch and return
    a ``(k, m)`` array. ``evaluate`` accepts a single vector or a batch.
    """

    name: str = "problem"
    n_obj: int
    bounds: BoxBounds
    multimodal: bool = False

    @property
    def n_var(self) -> int:
        return self.bounds.n

    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return self._evaluate(x[None, :])[0]
        return self._evaluate(x)


@dataclass
class Evaluator:
    """Counts evaluations and rejects non-finite objective values."""

    problem: Problem
    count: int = 0
    generation: int | None = None

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[0] == 0:
            return np.empty((0, self.problem.n_obj))
        F = self.problem.evaluate(X)
        bad = ~np.all(np.isfinite(F), axis=1)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise EvaluationError(X[i], F[i], self.generation)
        self.count += X.shape[0]
        return F


def evaluate(problem: Problem, x, evaluator: Evaluator | None = None) -> np.ndarray:
    """Evaluate a single decision vector, counting it on ``evaluator`` if given."""
    ev = evaluator if evaluator is not None else Evaluator(problem)
    if ev.problem is not problem:
        raise ValueError("evaluator is bound to a different problem")
    return ev(np.asarray(x, dtype=float).reshape(1, -1))[0]


@dataclass(frozen=True)
class Individual:
    x: np.ndarray
    f: np.ndarray


@dataclass(frozen=True)
class Population:
    """Decision vectors ``x`` (N, n) with cached objectives ``f`` (N, m)."""

    x: np.ndarray
    f: np.ndarray

    def __post_init__(self) -> None:
        x = np.array(self.x, dtype=float)
        f = np.array(self.f, dtype=float)
        if x.ndim != 2 or f.ndim != 2 or x.shape[0] != f.shape[0]:
            raise ValueError(f"inconsistent population shapes x{x.shape} f{f.shape}")
        x.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "f", f)

    def __len__(self) -> int:
        return self.x.shape[0]

    def __getitem__(self, i: int) -> Individual:
        return Individual(self.x[i], self.f[i])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def take(self, idx) -> "Population":
        idx = np.asarray(idx, dtype=int)
        return Population(self.x[idx], self.f[idx])

    @classmethod
    def concat(cls, *pops: "Population") -> "Population":
        return cls(np.vstack([p.x for p in pops]), np.vstack([p.f for p in pops]))

    @classmethod
    def from_individuals(cls, members: list[Individual]) -> "Population":
        return cls(np.array([m.x for m in members]), np.array([m.f for m in members]))

