import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from cbslice import catalog
from cbslice.actions import GxAPoint
from cbslice.tube import OutOfScopeError, TubeChart, TubeDomainError

from conftest import subgroup_elements, tube_chart


def _flat(x: GxAPoint):
    return np.concatenate([x.g.ravel(), x.nu, x.a, x.delta])


def test_out_of_scope_point_is_rejected():
    with pytest.raises(OutOfScopeError, match="out of theorem scope"):
        TubeChart(catalog.chart("so3_generic"))


def test_gamma_star_closed_form_momentum_zero():
    # <c, xi x (lam + d) e1> = nubar(xi) for xi in span(e2, e3) gives
    # c = (0, nu3, -nu2) / (lam + d)
    lam = 1.0
    tc = tube_chart("so3_momentum_zero")
    rng = np.random.default_rng(0)
    for _ in range(20):
        nu = np.array([0.0, *rng.normal(size=2)])
        d = rng.uniform(-0.5, 2.0)
        nubar = tc.chart.mk.columns.T @ nu
        c = tc.gamma_star(np.array([d]), nubar)
        assert_allclose(c, np.array([0.0, nu[2], -nu[1]]) / (lam + d), atol=1e-13)


@pytest.mark.parametrize("name", list(catalog.TUBE_POINTS))
def test_gamma_star_of_zero_is_zero(name):
    tc = tube_chart(name)
    c = tc.gamma_star(np.zeros(tc.dim_B), np.zeros(tc.chart.mk.dim))
    assert_allclose(c, 0.0, atol=0)


def test_gamma_star_rejects_singular_delta():
    tc = tube_chart("so3_momentum_zero")
    with pytest.raises(TubeDomainError):
        tc.gamma_star(np.array([-1.0]), np.ones(2))


@pytest.mark.parametrize("name", list(catalog.TUBE_POINTS))
def test_sigma_of_base_point_is_x(name):
    tc = tube_chart(name)
    x = tc.sigma_map(tc.l_map(tc.base_point()))
    assert_allclose(_flat(x), _flat(tc.base_x), atol=1e-15)
    z = tc.tube_evaluate(tc.base_point())
    assert_allclose(z.point, tc.chart.q, atol=1e-14)
    assert_allclose(z.covector, tc.chart.p, atol=1e-14)


def test_no_correction_when_H_equals_K():
    tc = tube_chart("so3_on_axis")
    assert tc.chart.mk.dim == 0
    rng = np.random.default_rng(1)
    m = tc.sample_point(rng)
    x = tc.sigma_map(tc.l_map(m))
    assert_allclose(x.a, tc.a_A(m.a), atol=0)


def test_pushforward_when_K_is_G():
    # q = 0, so K = G, A = Q and phi(g, nu, a, beta) = (g.a, g.beta)
    tc = tube_chart("so3_momentum_zero")
    rng = np.random.default_rng(2)
    for _ in range(10):
        g = tc.group.haar_sample(rng)
        a, beta = rng.normal(size=(2, 3))
        z = tc.phi_pushforward(GxAPoint(g, np.zeros(3), a, beta))
        assert_allclose(z.point, g @ a, atol=1e-14)
        assert_allclose(z.covector, g @ beta, atol=1e-14)


@pytest.mark.parametrize("name", list(catalog.TUBE_POINTS))
def test_l_map_lands_in_zero_H_momentum(name):
    tc = tube_chart(name)
    rng = np.random.default_rng(3)
    for _ in range(10):
        m = tc.sample_point(rng)
        w = tc.l_map(m)
        assert_allclose(w.g, m.g, atol=0)
        assert_allclose(tc.nu_coords(w.nu), m.nu, atol=1e-14)
        assert np.abs(tc.momentum_JH(w)).max(initial=0.0) < 1e-13


@pytest.mark.parametrize("name", list(catalog.TUBE_POINTS))
def test_model_momentum_matches_ambient(name):
    tc = tube_chart(name)
    assert_allclose(tc.model_momentum(tc.base_point()), tc.mu, atol=1e-15)
    rng = np.random.default_rng(4)
    for _ in range(10):
        m = tc.sample_point(rng)
        z = tc.tube_evaluate(m)
        assert_allclose(tc.model_momentum(m), tc.chart.action.momentum(z.point, z.covector), atol=1e-12)


def test_validity_radius():
    # Gamma degenerates exactly when lam + delta = 0, at distance lam
    tc = tube_chart("so3_momentum_zero")
    assert tc.U_bound == pytest.approx(1.0, abs=1e-6)
    assert tube_chart("so3_on_axis").U_bound == np.inf
    assert tube_chart("trivial_plane").U_bound == np.inf


@pytest.mark.parametrize("name", list(catalog.TUBE_POINTS))
def test_equivariance_and_twist_invariance(name):
    tc = tube_chart(name)
    ch = tc.chart
    rng = np.random.default_rng(5)
    hs = subgroup_elements(ch, ch.h, 5, 6)
    for _ in range(5):
        m = tc.sample_point(rng)
        z = tc.tube_evaluate(m)
        g0 = tc.group.haar_sample(rng)
        zg = tc.tube_evaluate(tc.left(g0, m))
        q2, p2 = ch.action.lift(g0, z.point, z.covector)
        assert_allclose(zg.flat(), np.concatenate([q2, p2]), atol=1e-12)
        for h in hs:
            assert_allclose(tc.tube_evaluate(tc.twist(h, m)).flat(), z.flat(), atol=1e-12)


@pytest.mark.parametrize("name", list(catalog.TUBE_POINTS))
def test_alternative_route_agrees(name):
    tc = tube_chart(name)
    rng = np.random.default_rng(7)
    for _ in range(10):
        m = tc.sample_point(rng)
        assert_allclose(tc.tube_alternative(m).flat(), tc.tube_evaluate(m).flat(), atol=1e-11)


@pytest.mark.parametrize("name", list(catalog.TUBE_POINTS))
def test_exchange_correction_matches_gamma_star(name):
    tc = tube_chart(name)
    rng = np.random.default_rng(8)
    for _ in range(10):
        m = tc.sample_point(rng)
        w = tc.l_map(m)
        assert_allclose(tc._gamma_dual(m.delta, w.nu, -m.a), tc.tfform_correction(m.delta, w.nu, -m.a), atol=1e-11)


@pytest.mark.parametrize("name", ["so3_momentum_zero", "so3_two_copies", "product_so2_torus"])
def test_sigma_is_presymplectic(name):
    tc = tube_chart(name)
    rng = np.random.default_rng(9)
    for _ in range(3):
        m = tc.sample_point(rng)
        assert tc.sigma_presymplectic_residual(m, richardson=True) < 1e-8
        assert tc.symplecticity_residual(m, richardson=True) < 1e-8


def test_sigma_rejects_nonzero_H_momentum():
    tc = tube_chart("so3_momentum_zero")
    w = GxAPoint(np.eye(3), np.array([1.0, 0, 0]), np.zeros(1), np.zeros(1))
    with pytest.raises(TubeDomainError):
        tc.sigma_map(w)


def test_tube_is_locally_injective_on_the_quotient():
    """Distinct H-orbits of model points give distinct phase points."""
    tc = tube_chart("so3_on_axis")
    rng = np.random.default_rng(10)
    m = tc.sample_point(rng)
    D = tc._fd_columns(lambda p: tc.tube_evaluate(p).flat(), m, 1e-6)
    # the twist orbit has dimension dim h; the rest must map injectively
    assert np.linalg.matrix_rank(D, tol=1e-6) == tc.covering_dim() - tc.chart.h.dim


small = st.floats(-0.8, 3.0, allow_nan=False)
values = st.floats(-5.0, 5.0, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(small, values, values)
def test_gamma_relation_property(d, n2, n3):
    tc = tube_chart("so3_momentum_zero")
    nubar = np.array([n2, n3])
    delta = np.array([d])
    assert tc.gamma_residual(delta, nubar) < 1e-9 * (1 + abs(n2) + abs(n3))
    assert_allclose(tc.gamma_inverse(delta, tc.gamma_star(delta, nubar)), nubar, atol=1e-9 * (1 + abs(n2) + abs(n3)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_tube_momentum_property(seed):
    tc = tube_chart("torus_plane_pair")
    m = tc.sample_point(seed)
    z = tc.tube_evaluate(m)
    assert_allclose(tc.chart.action.momentum(z.point, z.covector), tc.model_momentum(m), atol=1e-12)

