"""Local PCA: clustering whose centroids are (m-1)-dimensional affine subspaces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EIG_CLAMP = 1e-12


@dataclass(frozen=True)
class AffineSubspace:
    """``mean + span(basis columns)`` with the full covariance spectrum.

    Attributes:
        mean: (n,) cluster mean.
        basis: (n, d) orthonormal columns, the leading principal directions.
        eigenvalues: (n,) covariance spectrum, descending, clamped at zero.
    """

    mean: np.ndarray
    basis: np.ndarray
    eigenvalues: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def project(self, X: np.ndarray) -> np.ndarray:
        """Coordinates of ``X`` along the basis, relative to the mean."""
        return (np.atleast_2d(X) - self.mean) @ self.basis

    @classmethod
    def point(cls, p: np.ndarray) -> "AffineSubspace":
        p = np.asarray(p, dtype=float)
        return cls(p.copy(), np.zeros((p.size, 0)), np.zeros(p.size))


def cluster_statistics(members, m: int) -> AffineSubspace:
    """Mean, sample covariance spectrum and leading ``m - 1`` principal axes."""
    X = np.atleast_2d(np.asarray(members, dtype=float))
    if X.shape[0] == 0:
        raise ValueError("cluster has no members")
    size, n = X.shape
    d = min(m - 1, n)
    mean = X.mean(axis=0)
    if size == 1:
        return AffineSubspace(mean, np.eye(n)[:, :d], np.zeros(n))
    centered = X - mean
    cov = centered.T @ centered / (size - 1)
    vals, vecs = np.linalg.eigh(cov)
    vals = vals[::-1]
    vecs = vecs[:, ::-1]
    vals = np.where(vals < EIG_CLAMP, 0.0, vals)
    if vals[0] == 0.0:
        return AffineSubspace(mean, np.eye(n)[:, :d], np.zeros(n))
    basis = vecs[:, :d].copy()
    # sign convention: largest-magnitude entry of each axis is positive
    pivot = np.argmax(np.abs(basis), axis=0)
    basis *= np.sign(basis[pivot, np.arange(d)])
    return AffineSubspace(mean, basis, vals)


def distance_to_subspace(x, sub: AffineSubspace) -> np.ndarray | float:
    """Euclidean distance from point(s) to the affine subspace."""
    x = np.asarray(x, dtype=float)
    c = np.atleast_2d(x) - sub.mean
    resid = c - (c @ sub.basis) @ sub.basis.T
    dist = np.linalg.norm(resid, axis=1)
    return float(dist[0]) if x.ndim == 1 else dist


@dataclass(frozen=True)
class Partition:
    """Result of Local PCA.

    ``labels[i]`` is the cluster of population member ``i``; empty clusters
    keep the reseeded subspace they ended with.
    """

    labels: np.ndarray
    subspaces: list[AffineSubspace]
    iterations: int
    converged: bool

    @property
    def clusters(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.labels == k) for k in range(len(self.subspaces))]


def _distance_table(X: np.ndarray, subs: list[AffineSubspace]) -> np.ndarray:
    return np.column_stack([distance_to_subspace(X, s) for s in subs])


def _random_seeds(N: int, K: int, rng: np.random.Generator) -> np.ndarray:
    """K member indices, distinct while ``K <= N``."""
    if K <= N:
        return rng.choice(N, size=K, replace=False)
    return np.concatenate([rng.permutation(N), rng.integers(0, N, size=K - N)])


def _local_pca(X: np.ndarray, K: int, m: int, rng: np.random.Generator, max_iters: int) -> Partition:
    subs = [AffineSubspace.point(X[i]) for i in _random_seeds(X.shape[0], K, rng)]
    labels = np.argmin(_distance_table(X, subs), axis=1)
    converged = False
    it = 0
    while it < max_iters:
        it += 1
        subs = _update(X, labels, subs, m)
        new = np.argmin(_distance_table(X, subs), axis=1)
        if np.array_equal(new, labels):
            converged = True
            break
        labels = new
    if not converged:
        subs = _update(X, labels, subs, m)
    return Partition(labels, subs, it, converged)


def reconstruction_error(X, part: Partition) -> float:
    """Sum of squared distances from each member to its own subspace."""
    X = np.asarray(X, dtype=float)
    own = _distance_table(X, part.subspaces)[np.arange(X.shape[0]), part.labels]
    return float(np.sum(own**2))


def partition(
    population, K: int, m: int, rng: np.random.Generator, max_iters: int = 50, restarts: int = 5
) -> Partition:
    """Split the population into ``K`` clusters around (m-1)-D principal subspaces.

    ``population`` may be a ``Population`` or an ``(N, n)`` array. Each start
    uses zero-dimensional subspaces at ``K`` random distinct members, so the
    first pass assigns by nearest seed point. Of ``restarts`` independent
    starts the one with the smallest reconstruction error is kept (earliest
    on ties).
    """
    X = np.asarray(getattr(population, "x", population), dtype=float)
    if X.shape[0] == 0:
        raise ValueError("population is empty")
    if K < 1:
        raise ValueError("K must be positive")
    if max_iters < 1:
        raise ValueError("max_iters must be positive")
    if restarts < 1:
        raise ValueError("restarts must be positive")

    best, best_err = None, np.inf
    for _ in range(restarts):
        part = _local_pca(X, K, m, rng, max_iters)
        err = reconstruction_error(X, part)
        if best is None or err < best_err:
            best, best_err = part, err
    return best


def _update(X: np.ndarray, labels: np.ndarray, subs: list[AffineSubspace], m: int) -> list[AffineSubspace]:
    out = []
    own = None
    for k in range(len(subs)):
        members = X[labels == k]
        if members.shape[0]:
            out.append(cluster_statistics(members, m))
            continue
        # empty cluster: reseed at the member worst served by its own centroid
        if own is None:
            own = _distance_table(X, subs)[np.arange(X.shape[0]), labels]
        far = int(np.argmax(own))
        own[far] = -1.0
        out.append(AffineSubspace.point(X[far]))
    return out
