import numpy as np
import pytest
from numpy.testing import assert_allclose

from cbslice import catalog
from cbslice.actions import standard_representation
from cbslice.dynamics import (
    HamiltonianSpec,
    IntegrationDomainError,
    bundle_vector_field,
    central_force,
    central_gradient,
    compare_flows,
    free_particle,
    hamiltonian_field_on_normal_space,
    integrate_ambient,
    integrate_model,
    reconstruction_alpha0,
    relative_equilibrium,
    zero_hamiltonian,
)
from cbslice.liealg import so2, so3
from cbslice.normalform import splitting_alpha0
from cbslice.tube import ModelPoint

from conftest import slice_chart, tube_chart


def _mixed_hamiltonian():
    """SO(3)-invariant H built from |q|^2, q.p and |p|^2, with exact gradient."""

    def H(q, p):
        r2, s, p2 = q @ q, q @ p, p @ p
        return 0.5 * p2 + 0.3 * s * p2 / (1 + r2) + 0.25 * r2**2 - 0.4 * s

    def grad(q, p):
        r2, s, p2 = q @ q, q @ p, p @ p
        gq = 0.3 * p2 * (p / (1 + r2) - 2 * s * q / (1 + r2) ** 2) + r2 * q - 0.4 * p
        gp = p + 0.3 * (q * p2 + 2 * s * p) / (1 + r2) - 0.4 * q
        return gq, gp

    return HamiltonianSpec(H, grad, "mixed")


def test_mixed_hamiltonian_gradient_matches_differences():
    hs = _mixed_hamiltonian()
    rng = np.random.default_rng(0)
    q, p = rng.normal(size=(2, 3))
    fd = HamiltonianSpec(hs.ambient)
    assert_allclose(np.concatenate(hs.grad(q, p)), np.concatenate(fd.grad(q, p)), atol=1e-8)


def test_central_gradient_of_quadratic():
    A = np.array([[2.0, 1.0], [1.0, 3.0]])
    x = np.array([0.3, -0.7])
    assert_allclose(central_gradient(lambda v: 0.5 * v @ A @ v, x), A @ x, atol=1e-9)


def test_relative_equilibrium_of_rotation_in_the_plane():
    action = standard_representation(so2())
    q = np.array([2.0, 0.0])
    q0, p0 = relative_equilibrium(action, q, np.array([0.5]))
    # velocity of a rigid rotation: perpendicular to q with speed omega |q|
    assert_allclose(q0, q)
    assert p0 @ q == pytest.approx(0.0, abs=1e-15)
    assert np.linalg.norm(p0) == pytest.approx(1.0)


def test_relative_equilibrium_with_mass_metric():
    action = standard_representation(so2())
    q = np.array([1.0, 0.0])
    M = np.diag([1.0, 3.0])
    _, p = relative_equilibrium(action, q, np.array([1.0]), M)
    _, v = relative_equilibrium(action, q, np.array([1.0]))
    assert_allclose(p, M @ v)
    with pytest.raises(ValueError):
        relative_equilibrium(action, q, np.array([1.0]), np.diag([1.0, -1.0]))


def test_circular_kepler_orbit_stays_circular():
    action, q0, p0 = catalog.so2_circular_orbit(1.0)
    rec = integrate_ambient(action, central_force(-1.0, -1.0), q0, p0, 0.01, 300)
    assert_allclose(np.linalg.norm(rec.ambient_q, axis=1), 1.0, atol=1e-8)


def test_zero_hamiltonian_gives_constant_trajectory():
    tc = tube_chart("so3_momentum_zero")
    m = tc.sample_point(np.random.default_rng(1))
    out = compare_flows(tc, zero_hamiltonian(), m, 0.1, 10)
    assert out["sup_error"] == 0.0
    for s in out["model"].model:
        assert_allclose(s.g, m.g, atol=0)
        assert_allclose(np.concatenate([s.nu, s.a, s.delta]), np.concatenate([m.nu, m.a, m.delta]), atol=0)


def test_bundle_field_of_constant_h_vanishes():
    tc = tube_chart("so3_momentum_zero")
    X, nd, ad, dd = bundle_vector_field(tc, lambda nu, a, d: 2.5, np.array([0.1, 0.2]), np.array([0.3]), np.array([0.1]))
    for part in (X, nd, ad, dd):
        assert_allclose(part, 0.0, atol=0)


def test_bundle_field_of_fiber_kinetic_energy():
    tc = tube_chart("so3_on_axis")
    delta = np.array([0.4])
    X, nd, ad, dd = bundle_vector_field(tc, lambda nu, a, d: 0.5 * d @ d, np.array([0.1, 0.2]), np.array([0.3]), delta)
    assert_allclose(ad, delta, atol=1e-9)
    for part in (X, nd, dd):
        assert_allclose(part, 0.0, atol=1e-9)


def test_abelian_bundle_field_keeps_nu_fixed():
    tc = tube_chart("torus_plane_pair")
    rng = np.random.default_rng(2)
    m = tc.sample_point(rng)
    h = free_particle().model(tc)
    X, nd, _, _ = bundle_vector_field(tc, h, m.nu, m.a, m.delta)
    assert_allclose(nd, 0.0, atol=1e-12)
    assert np.abs(X).max() > 0


def test_noether_drift_is_fourth_order():
    """RK4 on a generic invariant H: angular momentum drift scales like dt^4."""
    action = standard_representation(so3())
    q0, p0 = np.array([1.0, 0.2, -0.3]), np.array([0.1, 0.7, 0.4])
    drift = []
    for dt in (0.05, 0.025):
        rec = integrate_ambient(action, _mixed_hamiltonian(), q0, p0, dt, int(round(2.0 / dt)))
        drift.append(np.abs(rec.momentum - rec.momentum[0]).max())
    assert 10 <= drift[0] / drift[1] <= 24


def test_free_particle_model_matches_ambient():
    tc = tube_chart("so3_on_axis")
    m = ModelPoint(np.eye(3), np.array([0.3, -0.4]), np.array([0.1]), np.array([0.2]))
    out = compare_flows(tc, free_particle(), m, 1e-2, 20)
    assert out["sup_error"] < 1e-6
    assert out["momentum_drift"] < 1e-8


def test_mixed_hamiltonian_model_matches_ambient():
    tc = tube_chart("so3_momentum_zero")
    m = ModelPoint(np.eye(3), np.array([0.1, -0.2]), np.array([0.2]), np.array([0.1]))
    out = compare_flows(tc, _mixed_hamiltonian(), m, 1e-2, 50)
    assert out["sup_error"] < 1e-6


def test_integration_outside_validity_region_raises():
    tc = tube_chart("so3_momentum_zero")
    m = ModelPoint(np.eye(3), np.zeros(2), np.array([0.1]), np.array([-1.0]))
    with pytest.raises(IntegrationDomainError) as info:
        integrate_model(tc, free_particle(), m, 0.1, 5)
    assert info.value.step == 1


@pytest.mark.parametrize("dt, steps", [(0.0, 5), (0.1, 0), (-1.0, 3)])
def test_integrators_reject_bad_steps(dt, steps):
    tc = tube_chart("so2_plane")
    with pytest.raises(ValueError):
        integrate_model(tc, free_particle(), tc.base_point(), dt, steps)
    with pytest.raises(ValueError):
        integrate_ambient(tc.chart.action, free_particle(), tc.chart.q, tc.chart.p, dt, steps)


def test_invariance_residual():
    action = standard_representation(so3())
    assert free_particle().invariance_residual(action) < 1e-12
    assert _mixed_hamiltonian().invariance_residual(action) < 1e-12
    biased = HamiltonianSpec(lambda q, p: float(q[0]))
    assert biased.invariance_residual(action) > 0.1


def test_hamiltonian_field_on_canonical_plane():
    # h = (x^2 + y^2) / 2 on the canonical plane gives X = (y, -x)
    x = np.array([0.3, -0.8])
    X = hamiltonian_field_on_normal_space(np.array([[0.0, 1.0], [-1.0, 0.0]]), x)
    assert_allclose(X, [x[1], -x[0]])


def test_reconstruction_blocks_at_fixed_configuration():
    ch = slice_chart("so2_circular_orbit")
    split = splitting_alpha0(ch)
    n = split.target_dim
    blocks = reconstruction_alpha0(split, np.arange(1.0, n + 1), 0)
    nA = ch.A.dim
    assert blocks["X_orbit"].shape == (0,)
    assert blocks["X_A"].shape == (nA,) and blocks["X_Astar"].shape == (nA,)
    # canonical A + A*: X_A = dh/d(a*), X_A* = -dh/da
    grad = np.arange(1.0, n + 1)
    assert_allclose(blocks["X_A"], grad[nA:])
    assert_allclose(blocks["X_Astar"], -grad[:nA])
