"""Differential-evolution trial vectors and polynomial mutation.

Batched forms operate on ``(k, n)`` arrays of parents; the single-vector
functions are thin wrappers used by callers that build one offspring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BoxBounds, dominance_matrix, repair


class ClusterTooSmall(RuntimeError):
    """Not enough distinct decision vectors to draw four DE parents."""


@dataclass(frozen=True)
class DeParams:
    F: float = 0.5
    CR: float = 0.9
    pm: float | None = None  # None means 1/n
    eta: float = 20.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.CR <= 1.0:
            raise ValueError(f"CR must lie in [0, 1], got {self.CR}")
        if self.pm is not None and not 0.0 <= self.pm <= 1.0:
            raise ValueError(f"pm must lie in [0, 1], got {self.pm}")
        if self.eta <= 0:
            raise ValueError(f"eta must be positive, got {self.eta}")

    def mutation_rate(self, n: int) -> float:
        return 1.0 / n if self.pm is None else self.pm


def de_trial_batch(r1, r2, r3, best, params: DeParams, rng: np.random.Generator) -> np.ndarray:
    """Current-to-best/1 with binomial crossover and one forced mutated index per row."""
    r1 = np.atleast_2d(r1)
    k, n = r1.shape
    mutant = r1 + params.F * (best - r1) + params.F * (r2 - r3)
    cross = rng.random((k, n)) < params.CR
    cross[np.arange(k), rng.integers(0, n, size=k)] = True
    return np.where(cross, mutant, r1)


def de_trial(r1, r2, r3, best, params: DeParams, rng: np.random.Generator) -> np.ndarray:
    args = [np.asarray(v, dtype=float)[None, :] for v in (r1, r2, r3, best)]
    return de_trial_batch(*args, params, rng)[0]


def mutation_delta(r, eta: float) -> np.ndarray:
    """Polynomial-mutation step in [-1, 1] for uniform draws ``r``."""
    r = np.asarray(r, dtype=float)
    e = 1.0 / (eta + 1.0)
    low = np.power(2.0 * r, e) - 1.0
    high = 1.0 - np.power(np.maximum(2.0 - 2.0 * r, 0.0), e)
    return np.where(r < 0.5, low, high)


def polynomial_mutation(v, params: DeParams, bounds: BoxBounds, rng: np.random.Generator) -> np.ndarray:
    """Mutate each coordinate with probability ``pm``; works on one vector or a batch."""
    v = np.asarray(v, dtype=float)
    V = np.atleast_2d(v)
    gate = rng.random(V.shape) < params.mutation_rate(bounds.n)
    delta = mutation_delta(rng.random(V.shape), params.eta)
    out = repair(np.where(gate, V + delta * bounds.width, V), bounds)
    return out[0] if v.ndim == 1 else out


def unique_ids(X: np.ndarray) -> np.ndarray:
    """Label rows so that equal decision vectors share an id."""
    _, inv = np.unique(X, axis=0, return_inverse=True)
    return inv.reshape(-1)


def draw_parents(
    cluster: np.ndarray,
    pop_x: np.ndarray,
    nondominated: np.ndarray,
    count: int,
    rng: np.random.Generator,
    ids: np.ndarray | None = None,
) -> np.ndarray:
    """Indices ``(count, 4)`` into the population for (r1, r2, r3, best).

    ``best`` is uniform over ``nondominated`` members. r1..r3 are uniform
    without replacement over the cluster's distinct vectors, topped up from
    the rest of the population when the cluster runs short. All four rows
    are distinct as decision vectors.
    """
    if ids is None:
        ids = unique_ids(pop_x)
    n_ids = int(ids.max()) + 1
    if n_ids < 4:
        raise ClusterTooSmall(f"population holds only {n_ids} distinct vectors")
    cluster = np.sort(np.asarray(cluster, dtype=int))
    _, rep = np.unique(ids, return_index=True)
    cluster_ids, first = np.unique(ids[cluster], return_index=True)
    rep[cluster_ids] = cluster[first]
    in_cluster = np.zeros(n_ids, dtype=bool)
    in_cluster[cluster_ids] = True

    best = rng.choice(np.asarray(nondominated), size=count)
    keys = rng.random((count, n_ids)) + np.where(in_cluster, 0.0, 1.0)
    keys[np.arange(count), ids[best]] = np.inf
    pick = np.argsort(keys, axis=1, kind="stable")[:, :3]
    return np.column_stack([rep[pick], best])


def pick_de_parents(cluster_x, pop_x, rng: np.random.Generator, pop_f=None):
    """Draw (r1, r2, r3, best) decision vectors for one DE trial.

    ``cluster_x`` holds the cluster's decision vectors; they are located in
    ``pop_x`` to find out which population members belong to the cluster.
    ``pop_f`` supplies objectives for the non-dominated set; without it
    every member counts as non-dominated.
    """
    pop_x = np.asarray(pop_x, dtype=float)
    cluster_x = np.atleast_2d(np.asarray(cluster_x, dtype=float))
    wanted = {tuple(row) for row in cluster_x}
    members = np.array([i for i, row in enumerate(pop_x) if tuple(row) in wanted], dtype=int)
    if len({tuple(row) for row in pop_x[members]}) != len(wanted):
        raise ValueError("every cluster vector must be a population member")
    if pop_f is None:
        nd = np.arange(pop_x.shape[0])
    else:
        nd = np.flatnonzero(~dominance_matrix(np.asarray(pop_f)).any(axis=0))
    idx = draw_parents(members, pop_x, nd, 1, rng)[0]
    return tuple(pop_x[i] for i in idx)
