import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from cbslice.liealg import LieAlgebraError, direct_product, so2, so3, special_orthogonal, torus

GROUPS = [so2(), so3(), torus(2), special_orthogonal(4), direct_product(so3(), torus(1))]
IDS = [G.name for G in GROUPS]


def rodrigues(axis, angle):
    k = np.asarray(axis, float) / np.linalg.norm(axis)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * K @ K


def test_so3_bracket_e1_e2_is_e3():
    G = so3()
    assert_allclose(G.bracket([1, 0, 0], [0, 1, 0]), [0, 0, 1], atol=1e-15)


def test_torus_is_abelian():
    assert_allclose(torus(2).bracket([1, 0], [0, 1]), [0, 0])


@pytest.mark.parametrize("G", GROUPS, ids=IDS)
def test_bracket_antisymmetric(G):
    rng = np.random.default_rng(0)
    xi = rng.normal(size=G.dim)
    assert np.abs(G.bracket(xi, xi)).max() < 1e-14


@pytest.mark.parametrize("G", GROUPS, ids=IDS)
def test_jacobi_identity_of_structure_constants(G):
    c = G.structure
    jac = np.einsum("ijm,mln->ijln", c, c)
    jac = jac + np.transpose(jac, (1, 2, 0, 3)) + np.transpose(jac, (2, 0, 1, 3))
    assert np.abs(jac).max(initial=0.0) < 1e-10


def test_exp_zero_is_identity():
    assert_allclose(so3().exp(np.zeros(3)), np.eye(3))


def test_exp_matches_rodrigues():
    assert_allclose(so3().exp([0, 0, np.pi / 2]), rodrigues([0, 0, 1], np.pi / 2), atol=1e-14)
    rng = np.random.default_rng(3)
    for _ in range(5):
        xi = rng.normal(size=3)
        assert_allclose(so3().exp(xi), rodrigues(xi, np.linalg.norm(xi)), atol=1e-13)


@pytest.mark.parametrize("theta", [0.0, 0.3, -2.0, 7.0])
def test_so2_exp_is_rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    assert_allclose(so2().exp([theta]), [[c, -s], [s, c]], atol=1e-14)


def test_Ad_so3_is_rotation_of_vector():
    G = so3()
    rng = np.random.default_rng(1)
    for _ in range(5):
        g = G.haar_sample(rng)
        xi = rng.normal(size=3)
        assert_allclose(G.Ad(g, xi), g @ xi, atol=1e-14)
    assert_allclose(G.Ad(np.eye(3), [1.0, 2.0, 3.0]), [1, 2, 3])


@pytest.mark.parametrize("G", GROUPS, ids=IDS)
def test_dual_pairings(G):
    rng = np.random.default_rng(2)
    g = G.haar_sample(rng)
    xi, eta, nu = rng.normal(size=(3, G.dim))
    assert abs(G.Ad_star(g, nu) @ xi - nu @ G.Ad(g, xi)) < 1e-12
    assert abs(G.ad_star(xi, nu) @ eta + nu @ G.bracket(eta, xi)) < 1e-12


@pytest.mark.parametrize("G", GROUPS, ids=IDS)
def test_exp_inverse_and_membership(G):
    rng = np.random.default_rng(4)
    for _ in range(100):
        xi = rng.normal(size=G.dim)
        xi *= rng.uniform(0, 5) / np.linalg.norm(xi)
        g = G.exp(xi)
        assert np.abs(g @ G.exp(-xi) - np.eye(G.n)).max() < 1e-10
        assert G.is_member(g)


@pytest.mark.parametrize("G", GROUPS, ids=IDS)
def test_coadjoint_is_an_action(G):
    rng = np.random.default_rng(5)
    for _ in range(20):
        g, h = G.haar_sample(rng), G.haar_sample(rng)
        nu = rng.normal(size=G.dim)
        assert np.abs(G.Ad_star(g, G.Ad_star(np.linalg.inv(g), nu)) - nu).max() < 1e-10
        assert np.abs(G.coadjoint_action(g @ h, nu) - G.coadjoint_action(g, G.coadjoint_action(h, nu))).max() < 1e-10


@pytest.mark.parametrize("G", GROUPS, ids=IDS)
def test_coadjoint_generator_is_minus_ad_star(G):
    """d/dt g(t).nu at t = 0 equals -ad*_xi nu for the left coadjoint action."""
    rng = np.random.default_rng(6)
    t = 1e-5
    for _ in range(10):
        xi, nu = rng.normal(size=(2, G.dim))
        fd = (G.coadjoint_action(G.exp(t * xi), nu) - G.coadjoint_action(G.exp(-t * xi), nu)) / (2 * t)
        assert np.abs(fd + G.ad_star(xi, nu)).max() < 1e-6
        fd_right = (G.Ad_star(G.exp(t * xi), nu) - G.Ad_star(G.exp(-t * xi), nu)) / (2 * t)
        assert np.abs(fd_right - G.ad_star(xi, nu)).max() < 1e-6


def test_haar_sampling_deterministic_and_centered():
    G = so3()
    assert_allclose(G.haar_sample(7), G.haar_sample(7))
    rng = np.random.default_rng(8)
    mean = sum(G.haar_sample(rng) for _ in range(10_000)) / 10_000
    assert np.abs(mean).max() < 0.05


def test_so2_haar_determinant():
    g = so2().haar_sample(9)
    assert abs(np.linalg.det(g) - 1) < 1e-12


def test_metric_is_frobenius_by_default():
    assert_allclose(so3().metric, 2 * np.eye(3))


def test_bad_inputs():
    with pytest.raises(LieAlgebraError):
        so3().bracket([1, 0], [0, 1])
    with pytest.raises(LieAlgebraError):
        torus(0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3), st.lists(st.floats(-3, 3), min_size=3, max_size=3))
def test_so3_bracket_is_cross_product(a, b):
    assert_allclose(so3().bracket(a, b), np.cross(a, b), atol=1e-12)
