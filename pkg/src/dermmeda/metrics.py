"""Inverted generational distance."""

from __future__ import annotations

import numpy as np

_CHUNK = 2048


def igd(approx, reference) -> float:
    """Mean distance from each reference point to its nearest approximation point.

    Distances are plain Euclidean in raw objective units.
    """
    A = np.atleast_2d(np.asarray(approx, dtype=float))
    R = np.atleast_2d(np.asarray(reference, dtype=float))
    if A.shape[0] == 0 or A.size == 0:
        raise ValueError("approximation set is empty")
    if R.shape[0] == 0 or R.size == 0:
        raise ValueError("reference set is empty")
    if A.shape[1] != R.shape[1]:
        raise ValueError(f"objective counts differ: {A.shape[1]} vs {R.shape[1]}")
    total = 0.0
    for start in range(0, R.shape[0], _CHUNK):
        block = R[start : start + _CHUNK]
        d2 = ((block[:, None, :] - A[None, :, :]) ** 2).sum(axis=2)
        total += np.sqrt(d2.min(axis=1)).sum()
    return float(total / R.shape[0])
