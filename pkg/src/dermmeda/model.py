"""Per-cluster manifold model: a principal segment/patch plus isotropic noise."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BoxBounds, repair
from .local_pca import AffineSubspace

EXTENSION = 0.25
VOLUME_FLOOR = 1e-12


@dataclass(frozen=True)
class ManifoldModel:
    """Sampling region of one cluster.

    Attributes:
        subspace: principal affine subspace of the cluster.
        extents_lo, extents_hi: (m-1,) range of member projections per axis.
        noise_sd: square root of the mean trailing eigenvalue.
    """

    subspace: AffineSubspace
    extents_lo: np.ndarray
    extents_hi: np.ndarray
    noise_sd: float

    @property
    def noise_var(self) -> float:
        return self.noise_sd**2

    def extended_box(self) -> tuple[np.ndarray, np.ndarray]:
        span = self.extents_hi - self.extents_lo
        return self.extents_lo - EXTENSION * span, self.extents_hi + EXTENSION * span


def noise_variance(eigenvalues: np.ndarray, m: int) -> float:
    """Mean of the trailing ``n - m + 1`` eigenvalues."""
    lam = np.asarray(eigenvalues, dtype=float)
    tail = lam[m - 1 :]
    return float(tail.sum() / tail.size) if tail.size else 0.0


def build_model(members, subspace: AffineSubspace, m: int) -> ManifoldModel:
    X = np.atleast_2d(np.asarray(members, dtype=float))
    if X.shape[0] == 0:
        raise ValueError("cluster has no members")
    proj = subspace.project(X)
    return ManifoldModel(
        subspace=subspace,
        extents_lo=proj.min(axis=0),
        extents_hi=proj.max(axis=0),
        noise_sd=float(np.sqrt(noise_variance(subspace.eigenvalues, m))),
    )


def model_volume(model: ManifoldModel) -> float:
    """Length/area/... of the extended sampling region, floored at ``VOLUME_FLOOR``."""
    vol = float(np.prod((1.0 + 2 * EXTENSION) * (model.extents_hi - model.extents_lo)))
    return vol if vol > 0.0 else VOLUME_FLOOR


def sample_parts(model: ManifoldModel, count: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw manifold coefficients ``(count, m-1)`` and noise ``(count, n)``."""
    lo, hi = model.extended_box()
    theta = lo + rng.random((count, lo.size)) * (hi - lo)
    noise = rng.standard_normal((count, model.subspace.mean.size)) * model.noise_sd
    return theta, noise


def sample_model(model: ManifoldModel, count: int, bounds: BoxBounds, rng: np.random.Generator) -> np.ndarray:
    """``count`` new decision vectors from the model, clamped to ``bounds``."""
    if count == 0:
        return np.empty((0, bounds.n))
    theta, noise = sample_parts(model, count, rng)
    X = model.subspace.mean + theta @ model.subspace.basis.T + noise
    return repair(X, bounds)
