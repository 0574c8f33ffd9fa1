import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from cbslice.subspace import (
    Subspace,
    SubspaceError,
    direct_sum,
    intersection,
    kernel,
    numerical_rank,
    orthogonal_complement,
)


def _spd(rng, m):
    X = rng.normal(size=(m, m))
    return X @ X.T + m * np.eye(m)


def test_axis_subspace_comes_back_as_axes():
    S = Subspace.span(np.array([[0.0], [3.0], [0.0]]))
    assert_allclose(S.columns, [[0], [1], [0]])


def test_complement_of_x_axis_in_r3():
    S = Subspace.span(np.array([[1.0], [0.0], [0.0]]))
    T = orthogonal_complement(S)
    assert T.dim == 2
    assert_allclose(np.abs(T.columns), [[0, 0], [1, 0], [0, 1]], atol=1e-15)


def test_complement_of_zero_is_everything():
    T = orthogonal_complement(Subspace.zero(4))
    assert T.dim == 4
    assert T.equals(Subspace.full(4))


@pytest.mark.parametrize("seed", range(5))
def test_random_complement_against_projector_oracle(seed):
    rng = np.random.default_rng(seed)
    S = Subspace.span(rng.normal(size=(5, 2)))
    T = orthogonal_complement(S)
    assert T.dim == 3
    P = S.columns @ S.columns.T
    # oracle: the range of I - P_S
    oracle = Subspace.span(np.eye(5) - P)
    assert T.equals(oracle)
    assert np.abs(S.columns.T @ T.columns).max() < 1e-10
    assert T.orthonormality_residual() < 1e-10


@pytest.mark.parametrize("seed", range(3))
def test_complement_with_gram(seed):
    rng = np.random.default_rng(seed)
    M = _spd(rng, 4)
    S = Subspace.span(rng.normal(size=(4, 1)), M)
    T = orthogonal_complement(S, gram=M)
    assert T.orthonormality_residual() < 1e-10
    assert np.abs(S.columns.T @ M @ T.columns).max() < 1e-10


def test_complement_requires_containment():
    S = Subspace.span(np.array([[1.0], [1.0], [0.0]]))
    inside = Subspace.span(np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(SubspaceError):
        orthogonal_complement(S, inside)


def test_kernel_and_rank_threshold():
    A = np.array([[1.0, 0.0, 0.0], [0.0, 1e-12, 0.0]])
    assert numerical_rank(A) == 1
    K = kernel(A)
    assert K.dim == 2
    assert K.contains(Subspace.span(np.array([[0.0], [1.0], [0.0]])))


def test_intersection_and_direct_sum():
    S = Subspace.span(np.eye(4)[:, :2])
    T = Subspace.span(np.eye(4)[:, 1:3])
    I = intersection(S, T)
    assert I.dim == 1
    assert_allclose(np.abs(I.columns[:, 0]), [0, 1, 0, 0], atol=1e-12)
    assert direct_sum(S, T).dim == 3


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_complement_dimension_property(m, r, seed):
    r = min(r, m)
    rng = np.random.default_rng(seed)
    S = Subspace.span(rng.normal(size=(m, r)), ambient=m)
    T = orthogonal_complement(S)
    assert S.dim + T.dim == m
    assert direct_sum(S, T).dim == m
