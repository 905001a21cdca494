"""Offspring budget per cluster and its split between the model and DE arms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# absorbs float fuzz such as 300 * 0.6 = 179.99999999999997 before flooring
_FLOOR_SLACK = 1e-9


@dataclass(frozen=True)
class MixParams:
    """Model-arm share is ``alpha + beta * p`` for convergence ratio ``p``."""

    alpha: float = 0.3
    beta: float = 0.6

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha <= 1.0 and 0.0 <= self.beta <= 1.0):
            raise ValueError(f"alpha and beta must lie in [0, 1], got {self.alpha}, {self.beta}")
        if self.alpha + self.beta > 1.0 + 1e-12:
            raise ValueError(f"alpha + beta must not exceed 1, got {self.alpha + self.beta}")

    def model_share(self, p: float) -> float:
        return self.alpha + self.beta * p


@dataclass(frozen=True)
class ClusterQuota:
    k1: int  # model arm
    k2: int  # DE arm
    p: float
    vol_share: float

    @property
    def total(self) -> int:
        return self.k1 + self.k2


def convergence_ratio(eigenvalues, m: int) -> float:
    """Share of the spectrum held by the leading ``m - 1`` eigenvalues (1 for a null spectrum)."""
    lam = np.asarray(eigenvalues, dtype=float)
    total = lam.sum()
    if total <= 0.0:
        return 1.0
    return float(min(max(lam[: m - 1].sum() / total, 0.0), 1.0))


def largest_remainder(N: int, weights) -> np.ndarray:
    """Integer apportionment of ``N`` proportional to ``weights``; ties go to the lower index."""
    w = np.asarray(weights, dtype=float)
    if w.size == 0 or np.any(w < 0) or w.sum() <= 0:
        raise ValueError("weights must be non-negative with a positive sum")
    exact = N * w / w.sum()
    base = np.floor(exact).astype(int)
    short = N - int(base.sum())
    if short > 0:
        order = np.lexsort((np.arange(w.size), -(exact - base)))
        base[order[:short]] += 1
    return base


def allocate(N: int, volumes, ratios, mix: MixParams) -> list[ClusterQuota]:
    volumes = np.asarray(volumes, dtype=float)
    ratios = np.asarray(ratios, dtype=float)
    if volumes.shape != ratios.shape:
        raise ValueError("volumes and ratios must have the same length")
    if np.any(volumes <= 0):
        raise ValueError("volumes must be positive")
    totals = largest_remainder(N, volumes)
    shares = volumes / volumes.sum()
    out = []
    for T, p, s in zip(totals, ratios, shares):
        k1 = min(int(np.floor(T * mix.model_share(p) + _FLOOR_SLACK)), int(T))
        out.append(ClusterQuota(k1=k1, k2=int(T) - k1, p=float(p), vol_share=float(s)))
    return out
