import numpy as np
import pytest
from numpy.testing import assert_allclose

from cbslice import catalog
from cbslice.actions import standard_representation
from cbslice.liealg import so3
from cbslice.slices import (
    SliceError,
    build_slice_chart,
    check_case_flags,
    isotropy_algebra_config,
    isotropy_algebra_momentum,
    isotropy_algebra_point,
    remark_h_algebra,
)
from cbslice.subspace import Subspace

SO3 = standard_representation(so3())


def _axis(i, n=3):
    return Subspace.span(np.eye(n)[:, [i]])


def test_isotropy_examples():
    G = so3()
    assert isotropy_algebra_config(SO3, np.zeros(3)).dim == 3
    h = isotropy_algebra_point(SO3, np.zeros(3), np.array([1.0, 0, 0]))
    assert h.dim == 1 and h.equals(_axis(0))
    assert isotropy_algebra_momentum(G, np.zeros(3)).dim == 3
    assert isotropy_algebra_momentum(G, np.array([0, 0, 2.0])).equals(_axis(2))


def test_momentum_zero_chart():
    ch = catalog.chart("so3_momentum_zero")
    assert ch.A.dim == 3
    assert_allclose(ch.alpha, [1, 0, 0])
    assert_allclose(ch.B.columns, [[1], [0], [0]])
    assert check_case_flags(ch) == {"K_subset_Gmu": True, "alpha_zero": False, "Gmu_full": True, "H_equals_K": False}


def test_on_axis_chart():
    ch = catalog.chart("so3_on_axis")
    x = np.array([[1.0], [0], [0]])
    assert ch.A.equals(Subspace.span(x))
    assert_allclose(ch.A.columns @ ch.B.columns, x)
    assert ch.h.equals(ch.k) and ch.k.equals(_axis(0))
    assert check_case_flags(ch)["H_equals_K"]


def test_zero_point_chart():
    ch = catalog.chart("so3_origin")
    assert_allclose(ch.alpha, 0)
    assert ch.B.dim == ch.A.dim == 3
    assert ch.h.equals(ch.k)


def test_fixed_configuration_with_zero_momentum():
    ch = build_slice_chart(SO3, np.array([2.0, 0, 0]), np.zeros(3))
    f = check_case_flags(ch)
    assert f["alpha_zero"] and f["H_equals_K"]


def test_torus_always_has_K_in_Gmu():
    rng = np.random.default_rng(0)
    action = catalog.torus_plane_pair()[0]
    for _ in range(10):
        q, p = rng.normal(size=(2, 4))
        q[2:] = 0.0
        assert check_case_flags(build_slice_chart(action, q, p))["K_subset_Gmu"]


@pytest.mark.parametrize("name", list(catalog.POINTS))
def test_chart_invariants(name):
    ch = catalog.chart(name)
    for key, value in ch.invariant_residuals().items():
        assert value < 1e-10, key


@pytest.mark.parametrize("name", list(catalog.POINTS))
def test_h_is_gmu_cap_k_alpha(name):
    ch = catalog.chart(name)
    hk = remark_h_algebra(ch)
    assert hk.equals(ch.h) and hk.dim == ch.h.dim


def test_dimension_error():
    with pytest.raises(SliceError):
        build_slice_chart(SO3, np.zeros(2), np.zeros(3))
