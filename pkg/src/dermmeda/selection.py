"""Non-dominated sorting, crowding distance and elitist truncation (NSGA-II)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Population, dominance_matrix


@dataclass(frozen=True)
class FrontRanking:
    fronts: list[np.ndarray]
    rank: np.ndarray


def fast_nondominated_sort(objectives) -> FrontRanking:
    """Peel fronts using domination counts ``n_p`` and dominated sets ``S_p``.

    Fronts list indices in ascending original order.
    """
    F = np.atleast_2d(np.asarray(objectives, dtype=float))
    if F.shape[0] == 0:
        raise ValueError("nothing to sort")
    dom = dominance_matrix(F)  # row p holds S_p
    count = dom.sum(axis=0)  # n_p
    rank = np.full(F.shape[0], -1)
    current = np.flatnonzero(count == 0)
    fronts = []
    while current.size:
        rank[current] = len(fronts)
        fronts.append(current)
        count = count - dom[current].sum(axis=0)
        current = np.flatnonzero((count == 0) & (rank < 0))
    return FrontRanking(fronts, rank)


def crowding_distance(front_objectives) -> np.ndarray:
    """Normalized crowding distance; sort-boundary members get ``inf``."""
    F = np.atleast_2d(np.asarray(front_objectives, dtype=float))
    size, m = F.shape
    dist = np.zeros(size)
    if size <= 2:
        dist[:] = np.inf
        return dist
    for k in range(m):
        order = np.argsort(F[:, k], kind="stable")
        vals = F[order, k]
        dist[order[0]] = dist[order[-1]] = np.inf
        span = vals[-1] - vals[0]
        if span == 0.0:
            continue
        dist[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    return dist


def rank_and_crowding(objectives) -> tuple[np.ndarray, np.ndarray]:
    """Front rank and within-front crowding distance for every member."""
    F = np.atleast_2d(np.asarray(objectives, dtype=float))
    ranking = fast_nondominated_sort(F)
    crowd = np.empty(F.shape[0])
    for front in ranking.fronts:
        crowd[front] = crowding_distance(F[front])
    return ranking.rank, crowd


def elite_indices(objectives, N: int) -> np.ndarray:
    """Indices (ascending) of the ``N`` survivors of ``objectives``."""
    F = np.atleast_2d(np.asarray(objectives, dtype=float))
    if F.shape[0] < N:
        raise ValueError(f"cannot select {N} from {F.shape[0]} candidates")
    kept = []
    filled = 0
    for front in fast_nondominated_sort(F).fronts:
        if filled + front.size <= N:
            kept.append(front)
            filled += front.size
            if filled == N:
                break
            continue
        crowd = crowding_distance(F[front])
        order = np.lexsort((front, -crowd))
        kept.append(front[order[: N - filled]])
        break
    return np.sort(np.concatenate(kept)) if kept else np.empty(0, dtype=int)


def elite_select(combined: Population, N: int) -> Population:
    """Keep the best ``N`` by (front rank, crowding distance)."""
    return combined.take(elite_indices(combined.f, N))
