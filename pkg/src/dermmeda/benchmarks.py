"""F1-F9 test problems with complicated Pareto sets (Li & Zhang, 2009).

Each problem is written as ``x_j = target_j(head) + y_j`` where ``head`` is
the first one (two for F6) coordinate(s) and ``target`` is the Pareto-set
curve. The objectives are the head shape plus a mean of ``h(y_j)`` over an
index group, so ``y == 0`` places a point exactly on the Pareto front.
"""

from __future__ import annotations

import enum
from math import comb
from pathlib import Path

import numpy as np

from .core import BoxBounds, Problem

__all__ = [
    "ProblemId",
    "LZProblem",
    "make_problem",
    "sample_true_pf",
    "default_pf_size",
    "latin_hypercube_init",
    "write_pf",
    "read_pf",
]


class ProblemId(str, enum.Enum):
    F1 = "F1"
    F2 = "F2"
    F3 = "F3"
    F4 = "F4"
    F5 = "F5"
    F6 = "F6"
    F7 = "F7"
    F8 = "F8"
    F9 = "F9"

    @classmethod
    def parse(cls, tag) -> "ProblemId":
        if isinstance(tag, cls):
            return tag
        try:
            return cls(str(tag).strip().upper())
        except ValueError:
            raise ValueError(f"unknown problem {tag!r}; expected one of F1..F9") from None


# (n_var, n_obj, multimodal, dimension may be changed)
_META = {
    ProblemId.F1: (30, 2, False, True),
    ProblemId.F2: (30, 2, False, True),
    ProblemId.F3: (30, 2, False, True),
    ProblemId.F4: (30, 2, False, True),
    ProblemId.F5: (30, 2, False, True),
    ProblemId.F6: (10, 3, False, False),
    ProblemId.F7: (10, 2, True, False),
    ProblemId.F8: (10, 2, True, False),
    ProblemId.F9: (30, 2, False, True),
}


def _bounds(pid: ProblemId, n: int) -> BoxBounds:
    lo = np.zeros(n)
    hi = np.ones(n)
    if pid in (ProblemId.F1, ProblemId.F7, ProblemId.F8):
        pass
    elif pid is ProblemId.F6:
        lo[2:], hi[2:] = -2.0, 2.0
    else:
        lo[1:] = -1.0
    return BoxBounds(lo, hi)


def _power_curve(x1: np.ndarray, j: np.ndarray, n: int) -> np.ndarray:
    return x1[:, None] ** (0.5 * (1.0 + 3.0 * (j - 2) / (n - 2)))


def _ps_targets(pid: ProblemId, head: np.ndarray, n: int) -> np.ndarray:
    """Pareto-set values for the tail coordinates (j = 2..n, or 3..n for F6)."""
    x1 = head[:, 0]
    if pid is ProblemId.F6:
        j = np.arange(3, n + 1, dtype=float)
        return 2.0 * head[:, 1:2] * np.sin(2.0 * np.pi * x1[:, None] + j * np.pi / n)

    j = np.arange(2, n + 1, dtype=float)
    odd = (np.arange(2, n + 1) % 2) == 1
    phase = 6.0 * np.pi * x1[:, None] + j * np.pi / n
    if pid in (ProblemId.F1, ProblemId.F7, ProblemId.F8):
        return _power_curve(x1, j, n)
    if pid in (ProblemId.F2, ProblemId.F9):
        return np.sin(phase)
    if pid is ProblemId.F3:
        return np.where(odd, 0.8 * x1[:, None] * np.cos(phase), 0.8 * x1[:, None] * np.sin(phase))
    if pid is ProblemId.F4:
        return np.where(odd, 0.8 * x1[:, None] * np.cos(phase / 3.0), 0.8 * x1[:, None] * np.sin(phase))
    if pid is ProblemId.F5:
        amp = 0.3 * x1[:, None] ** 2 * np.cos(24.0 * np.pi * x1[:, None] + 4.0 * j * np.pi / n) + 0.6 * x1[:, None]
        return np.where(odd, amp * np.cos(phase), amp * np.sin(phase))
    raise AssertionError(pid)


class LZProblem(Problem):
    """One member of the F1-F9 suite at a given decision dimension."""

    def __init__(self, pid: ProblemId, n: int):
        self.pid = pid
        self.name = pid.value
        _, self.n_obj, self.multimodal, _ = _META[pid]
        head = 2 if pid is ProblemId.F6 else 1
        if n < head + self.n_obj:
            raise ValueError(f"{pid.value} needs at least {head + self.n_obj} variables, got {n}")
        self.n_head = head
        self.bounds = _bounds(pid, n)
        tail = np.arange(head + 1, n + 1)
        if self.n_obj == 2:
            # J1: odd indices, J2: even indices (both from 2..n)
            self._groups = [tail % 2 == 1, tail % 2 == 0]
        else:
            self._groups = [(tail - 1) % 3 == 0, (tail - 2) % 3 == 0, tail % 3 == 0]
        self._tail_index = tail.astype(float)

    def __repr__(self) -> str:
        return f"LZProblem({self.name}, n={self.n_var})"

    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        n = self.n_var
        head = X[:, : self.n_head]
        y = X[:, self.n_head :] - _ps_targets(self.pid, head, n)
        shape = self.front_shape(head)
        F = np.empty((X.shape[0], self.n_obj))
        for k, mask in enumerate(self._groups):
            F[:, k] = shape[:, k] + self._penalty(y[:, mask], self._tail_index[mask])
        return F

    def _penalty(self, y: np.ndarray, j: np.ndarray) -> np.ndarray:
        size = y.shape[1]
        if self.pid is ProblemId.F7:
            return 2.0 / size * np.sum(4.0 * y**2 - np.cos(8.0 * np.pi * y) + 1.0, axis=1)
        if self.pid is ProblemId.F8:
            prod = np.prod(np.cos(20.0 * y * np.pi / np.sqrt(j)), axis=1)
            return 2.0 / size * (4.0 * np.sum(y**2, axis=1) - 2.0 * prod + 2.0)
        return 2.0 / size * np.sum(y**2, axis=1)

    def front_shape(self, head: np.ndarray) -> np.ndarray:
        """Objective values of the Pareto-optimal point with the given head coordinates."""
        head = np.atleast_2d(head)
        if self.pid is ProblemId.F6:
            a = 0.5 * np.pi * head[:, 0]
            b = 0.5 * np.pi * head[:, 1]
            return np.column_stack([np.cos(a) * np.cos(b), np.cos(a) * np.sin(b), np.sin(a)])
        x1 = head[:, 0]
        return np.column_stack([x1, self.front_curve(x1)])

    def front_curve(self, f1):
        """f2 as a function of f1 along the true front (two-objective problems)."""
        if self.n_obj != 2:
            raise ValueError(f"{self.name} has a {self.n_obj}-objective front")
        f1 = np.asarray(f1, dtype=float)
        if self.pid is ProblemId.F9:
            return 1.0 - f1**2
        return 1.0 - np.sqrt(f1)

    def pareto_set(self, head) -> np.ndarray:
        """Decision vectors on the analytic Pareto set for the given head coordinates."""
        head = np.atleast_2d(np.asarray(head, dtype=float))
        if head.shape[1] != self.n_head:
            head = head.reshape(-1, self.n_head)
        tail = _ps_targets(self.pid, head, self.n_var)
        return np.hstack([head, tail])

    def head_from_front(self, F: np.ndarray) -> np.ndarray:
        """Invert ``front_shape`` for points on the true front."""
        F = np.atleast_2d(F)
        if self.pid is ProblemId.F6:
            a = np.arcsin(np.clip(F[:, 2], -1.0, 1.0))
            b = np.arctan2(F[:, 1], F[:, 0])
            return np.column_stack([a, b]) / (0.5 * np.pi)
        return F[:, :1].copy()


def make_problem(pid, n: int | None = None) -> LZProblem:
    """Build a problem from the registry. ``n`` overrides the dimension of F1-F5, F9."""
    pid = ProblemId.parse(pid)
    default_n, _, _, resizable = _META[pid]
    if n is None or n == default_n:
        return LZProblem(pid, default_n)
    if not resizable:
        raise ValueError(f"{pid.value} has a fixed decision dimension of {default_n}")
    return LZProblem(pid, int(n))


def default_pf_size(pid) -> int:
    return 1000 if _META[ProblemId.parse(pid)][1] == 3 else 500


def _simplex_lattice(count: int) -> np.ndarray:
    h = 1
    while comb(h + 2, 2) < count:
        h += 1
    pts = [(i, j, h - i - j) for i in range(h + 1) for j in range(h + 1 - i)]
    w = np.array(pts, dtype=float) / h
    keep = np.unique(np.round(np.linspace(0, len(w) - 1, count)).astype(int))
    return w[keep]


def sample_true_pf(pid, count: int | None = None) -> np.ndarray:
    """Deterministic reference set on the true front.

    Two-objective fronts use an even grid in f1 over [0, 1]. The F6 sphere
    octant uses a simplex lattice projected radially onto the unit sphere,
    thinned evenly to exactly ``count`` points.
    """
    pid = ProblemId.parse(pid)
    if count is None:
        count = default_pf_size(pid)
    if count < 2:
        raise ValueError("count must be at least 2")
    prob = make_problem(pid)
    if prob.n_obj == 2:
        f1 = np.linspace(0.0, 1.0, count)
        return np.column_stack([f1, prob.front_curve(f1)])
    w = _simplex_lattice(count)
    return w / np.linalg.norm(w, axis=1, keepdims=True)


def latin_hypercube_init(bounds: BoxBounds, size: int, rng: np.random.Generator) -> np.ndarray:
    """Latin hypercube sample of ``size`` points, one per stratum in every dimension."""
    if size < 1:
        raise ValueError("size must be positive")
    n = bounds.n
    strata = np.column_stack([rng.permutation(size) for _ in range(n)])
    u = (strata + rng.random((size, n))) / size
    return bounds.lower + u * bounds.width


def write_pf(path, points: np.ndarray) -> None:
    """Write one point per line, whitespace separated, 17 significant digits."""
    np.savetxt(path, np.atleast_2d(points), fmt="%.17g", delimiter=" ")


def read_pf(path) -> np.ndarray:
    pts = np.loadtxt(Path(path), dtype=float, ndmin=2)
    if pts.size == 0:
        raise ValueError(f"{path}: empty reference front")
    return pts
