import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dermmeda.allocation import MixParams, allocate, convergence_ratio, largest_remainder


def test_ratio_examples():
    assert convergence_ratio([4, 1, 0, 0, 0], 2) == pytest.approx(0.8)
    assert convergence_ratio([3.0] + [0.0] * 9, 2) == 1.0
    assert convergence_ratio([0.7] * 10, 2) == pytest.approx(0.1)
    assert convergence_ratio(np.zeros(6), 3) == 1.0


@given(
    st.lists(st.floats(0, 1e3), min_size=3, max_size=12),
    st.integers(2, 3),
    st.floats(1e-3, 1e3),
)
def test_ratio_range_and_scale_invariance(lam, m, c):
    lam = np.sort(np.array(lam))[::-1]
    p = convergence_ratio(lam, m)
    assert 0.0 <= p <= 1.0
    assert convergence_ratio(c * lam, m) == pytest.approx(p, rel=1e-12, abs=1e-15)


def test_single_cluster_split():
    (q,) = allocate(300, [1.0], [0.5], MixParams(0.3, 0.6))
    assert (q.k1, q.k2) == (180, 120)


def test_share_range_for_alpha_01_beta_07():
    mix = MixParams(0.1, 0.7)
    assert mix.model_share(0.0) == pytest.approx(0.1)
    assert mix.model_share(1.0) == pytest.approx(0.8)
    (lo,) = allocate(100, [1.0], [0.0], mix)
    (hi,) = allocate(100, [1.0], [1.0], mix)
    assert (lo.k1, hi.k1) == (10, 80)


def test_largest_remainder_example():
    assert largest_remainder(9, [2, 1]).tolist() == [6, 3]
    # three equal shares of 10: the remainder goes to the lowest index
    assert largest_remainder(10, [1, 1, 1]).tolist() == [4, 3, 3]


def test_mix_validation():
    with pytest.raises(ValueError):
        MixParams(0.5, 0.6)
    with pytest.raises(ValueError):
        MixParams(-0.1, 0.5)


@given(
    st.integers(1, 1000),
    st.lists(st.tuples(st.floats(1e-12, 1e3), st.floats(0, 1)), min_size=1, max_size=15),
    st.floats(0, 1),
    st.floats(0, 1),
)
def test_conservation(N, clusters, a, b):
    b = min(b, 1.0 - a)
    quotas = allocate(N, [v for v, _ in clusters], [p for _, p in clusters], MixParams(a, b))
    assert sum(q.k1 + q.k2 for q in quotas) == N
    assert all(q.k1 >= 0 and q.k2 >= 0 for q in quotas)


@given(st.integers(1, 500), st.floats(0, 1), st.floats(0, 1), st.floats(0, 0.4), st.floats(0, 0.6))
def test_k1_monotone_in_ratio(N, p, q, a, b):
    lo, hi = sorted((p, q))
    mix = MixParams(a, b)
    (x,) = allocate(N, [1.0], [lo], mix)
    (y,) = allocate(N, [1.0], [hi], mix)
    assert x.k1 <= y.k1
