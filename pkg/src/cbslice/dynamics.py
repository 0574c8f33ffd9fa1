"""Bundle equations in tube coordinates, relative equilibria, and fixed-step
integration checked against direct Hamiltonian flow on T*Q."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .actions import LinearAction
from .tube import ModelPoint, TubeChart, TubeDomainError

FD_STEP = 1e-6


class IntegrationDomainError(TubeDomainError):
    def __init__(self, step, message):
        super().__init__(f"step {step}: {message}")
        self.step = step


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """G-invariant Hamiltonian on T*Q, optionally with its gradient."""

    ambient: Callable[[np.ndarray, np.ndarray], float]
    gradient: Callable | None = None
    name: str = ""

    def grad(self, q, p, step=FD_STEP):
        if self.gradient is not None:
            return self.gradient(q, p)
        z = np.concatenate([q, p])
        n = len(q)
        g = central_gradient(lambda v: self.ambient(v[:n], v[n:]), z, step)
        return g[:n], g[n:]

    def model(self, tc: TubeChart):
        """h(nu, a, delta) = H(tube(e, nu, a, delta))."""
        e = tc.group.identity()

        def h(nu, a, delta):
            z = tc.tube_evaluate(ModelPoint(e, nu, a, delta))
            return self.ambient(z.point, z.covector)

        return h

    def invariance_residual(self, action: LinearAction, samples=50, rng=0):
        rng = np.random.default_rng(rng)
        worst = 0.0
        for _ in range(samples):
            q = rng.normal(size=action.dimQ)
            p = rng.normal(size=action.dimQ)
            g = action.group.haar_sample(rng)
            q2, p2 = action.lift(g, q, p)
            worst = max(worst, abs(self.ambient(q2, p2) - self.ambient(q, p)))
        return worst


def central_gradient(f, x, step=FD_STEP):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = step
        out[i] = (f(x + e) - f(x - e)) / (2 * step)
    return out


def free_particle(mass=1.0):
    return HamiltonianSpec(
        lambda q, p: 0.5 * float(p @ p) / mass,
        lambda q, p: (np.zeros_like(q), p / mass),
        f"free(m={mass})",
    )


def central_force(coeff=1.0, power=2.0, mass=1.0):
    """H = |p|^2 / 2m + coeff |q|^power."""

    def H(q, p):
        return 0.5 * float(p @ p) / mass + coeff * float(np.linalg.norm(q)) ** power

    def grad(q, p):
        r = np.linalg.norm(q)
        return coeff * power * r ** (power - 2) * q, p / mass

    return HamiltonianSpec(H, grad, f"central(c={coeff}, n={power}, m={mass})")


def zero_hamiltonian():
    return HamiltonianSpec(lambda q, p: 0.0, lambda q, p: (np.zeros_like(q), np.zeros_like(p)), "zero")


def relative_equilibrium(action: LinearAction, q, xi, mass_metric=None):
    """Phase point z = (q, M xi.q) of a simple mechanical system."""
    q = np.asarray(q, dtype=float)
    M = np.eye(action.dimQ) if mass_metric is None else np.asarray(mass_metric, dtype=float)
    if not np.allclose(M, M.T) or np.linalg.eigvalsh(M).min() <= 0:
        raise ValueError("mass metric must be symmetric positive definite")
    return q, M @ action.infinitesimal_action(xi, q)


def bundle_vector_field(tc: TubeChart, h, nu, a, delta, step=FD_STEP):
    """Right-hand side of the bundle equations when G_mu = G.

    ``h`` is the model Hamiltonian (nu, a, delta) -> float.  Returns
    (X_m as an algebra vector, nu_dot in m* coordinates, a_dot, delta_dot).
    """
    G = tc.group
    dm, nB = tc.dim_m, tc.dim_B
    x = np.concatenate([nu, a, delta])
    grad = central_gradient(lambda v: h(v[:dm], v[dm : dm + nB], v[dm + nB :]), x, step)
    X_m = tc.chart.m.columns @ grad[:dm]
    jn = tc.rep_B.diamond(a, delta, tc.chart.h)
    rho = tc.nu_full(nu)
    nu_dot = tc.nu_coords(G.ad_star(X_m, rho)) + tc.nu_coords(G.ad_star(X_m, tc.h_slot(jn)))
    return X_m, nu_dot, grad[dm + nB :], -grad[dm : dm + nB]


def _dexpinv(G, u, X):
    """Inverse left-trivialized derivative of exp, truncated for fourth order."""
    b1 = G.bracket(u, X)
    return X + 0.5 * b1 + G.bracket(u, b1) / 12.0


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    model: list = field(default_factory=list)
    ambient_q: np.ndarray | None = None
    ambient_p: np.ndarray | None = None
    momentum: np.ndarray | None = None
    energy: np.ndarray | None = None


def integrate_model(tc: TubeChart, hs: HamiltonianSpec, initial: ModelPoint, dt, steps, fd_step=FD_STEP):
    """Runge-Kutta-Munthe-Kaas of order four on G x m* x B x B*."""
    if dt <= 0 or steps < 1:
        raise ValueError("dt must be positive and steps at least one")
    G = tc.group
    h = hs.model(tc)
    dm, nB = tc.dim_m, tc.dim_B

    def field_(y):
        X, nd, ad, dd = bundle_vector_field(tc, h, y[:dm], y[dm : dm + nB], y[dm + nB :], fd_step)
        return X, np.concatenate([nd, ad, dd])

    g = np.asarray(initial.g, dtype=float)
    y = np.concatenate([initial.nu, initial.a, initial.delta]).astype(float)
    states = [ModelPoint(g, y[:dm].copy(), y[dm : dm + nB].copy(), y[dm + nB :].copy())]
    for k in range(steps):
        try:
            X1, f1 = field_(y)
            u2 = 0.5 * dt * X1
            X2, f2 = field_(y + 0.5 * dt * f1)
            d2 = _dexpinv(G, u2, X2)
            u3 = 0.5 * dt * d2
            X3, f3 = field_(y + 0.5 * dt * f2)
            d3 = _dexpinv(G, u3, X3)
            u4 = dt * d3
            X4, f4 = field_(y + dt * f3)
            d4 = _dexpinv(G, u4, X4)
            y = y + dt / 6.0 * (f1 + 2 * f2 + 2 * f3 + f4)
            u = dt / 6.0 * (X1 + 2 * d2 + 2 * d3 + d4)
            g = g @ G.exp(u)
            state = ModelPoint(g, y[:dm].copy(), y[dm : dm + nB].copy(), y[dm + nB :].copy())
            tc.check_delta(state.delta)
        except TubeDomainError as exc:
            raise IntegrationDomainError(k + 1, str(exc)) from exc
        states.append(state)
    return TrajectoryRecord(np.arange(steps + 1) * dt, states)


def integrate_ambient(action: LinearAction, hs: HamiltonianSpec, q0, p0, dt, steps):
    """Classical RK4 on q_dot = dH/dp, p_dot = -dH/dq."""
    if dt <= 0 or steps < 1:
        raise ValueError("dt must be positive and steps at least one")
    n = action.dimQ

    def f(z):
        gq, gp = hs.grad(z[:n], z[n:])
        return np.concatenate([gp, -gq])

    z = np.concatenate([q0, p0]).astype(float)
    traj = [z]
    for _ in range(steps):
        k1 = f(z)
        k2 = f(z + 0.5 * dt * k1)
        k3 = f(z + 0.5 * dt * k2)
        k4 = f(z + dt * k3)
        z = z + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        traj.append(z)
    traj = np.array(traj)
    qs, ps = traj[:, :n], traj[:, n:]
    mom = np.array([action.momentum(q, p) for q, p in zip(qs, ps)])
    energy = np.array([hs.ambient(q, p) for q, p in zip(qs, ps)])
    return TrajectoryRecord(np.arange(steps + 1) * dt, [], qs, ps, mom, energy)


def compare_flows(tc: TubeChart, hs: HamiltonianSpec, initial: ModelPoint, dt, steps, fd_step=FD_STEP):
    model = integrate_model(tc, hs, initial, dt, steps, fd_step)
    z0 = tc.tube_evaluate(initial)
    amb = integrate_ambient(tc.chart.action, hs, z0.point, z0.covector, dt, steps)
    err = 0.0
    for k, m in enumerate(model.model):
        z = tc.tube_evaluate(m).flat()
        err = max(err, float(np.abs(z - np.concatenate([amb.ambient_q[k], amb.ambient_p[k]])).max()))
    return {
        "sup_error": err,
        "momentum_drift": float(np.abs(amb.momentum - amb.momentum[0]).max(initial=0.0)),
        "energy_drift": float(np.abs(amb.energy - amb.energy[0]).max()),
        "model": model,
        "ambient": amb,
    }


def hamiltonian_field_on_normal_space(form, grad):
    """Solve omega(X, .) = dh on a symplectic vector space."""
    form = np.asarray(form, dtype=float)
    if form.size == 0:
        return np.zeros(0)
    return np.linalg.solve(form.T, np.asarray(grad, dtype=float))


def reconstruction_alpha0(split, grad, orbit_dim):
    """Evaluate the normal-space part of the bundle equations when alpha = 0.

    ``split`` is the splitting onto N_s(mu) + A + A*; ``grad`` is the
    derivative of h in those target coordinates.  Returns the reduced-KKS
    block and the A, A* blocks of the Hamiltonian vector field.
    """
    X = hamiltonian_field_on_normal_space(split.target_form, grad)
    nA = (len(X) - orbit_dim) // 2
    return {"X_orbit": X[:orbit_dim], "X_A": X[orbit_dim : orbit_dim + nA], "X_Astar": X[orbit_dim + nA :]}
