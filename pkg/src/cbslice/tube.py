"""Explicit symplectic tube for cotangent-lifted actions at points whose
momentum is fixed by the whole group.

Model points live on the covering space G x m* x B x B*; the tube is
constant on orbits of the twist action of H = G_z.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .actions import GxAPoint, canonical_form_matrix, canonical_form_TstarQ, momentum_JK
from .slices import SliceChart, SliceError, check_case_flags

COND_MAX = 1e8


class TubeDomainError(ValueError):
    """Raised when a model point lies outside the region where the tube is computed."""


class OutOfScopeError(ValueError):
    """The tube construction needs the isotropy of mu to be the whole group."""


@dataclass(frozen=True, eq=False)
class ModelPoint:
    """Point of G x m* x B x B*; nu is in coordinates dual to the basis of m."""

    g: np.ndarray
    nu: np.ndarray
    a: np.ndarray
    delta: np.ndarray


@dataclass(frozen=True, eq=False)
class AmbientCotangent:
    point: np.ndarray
    covector: np.ndarray

    def flat(self):
        return np.concatenate([self.point, self.covector])


class TubeChart:
    """Tube data at a chart whose momentum isotropy is the full group."""

    def __init__(self, chart: SliceChart, rho_max=None, directions=8, seed=0):
        flags = check_case_flags(chart)
        if not flags["Gmu_full"]:
            raise OutOfScopeError(
                "out of theorem scope: the tube requires the isotropy algebra of mu to be all of g (Gmu_full)"
            )
        if chart.mk.dim != chart.Bperp.dim:
            raise SliceError("dimension of m cap k does not match the complement of B")
        self.chart = chart
        self.flags = flags
        self.group = chart.group
        self.mu = chart.mu
        self.alpha = chart.alpha
        self.rep_A = chart.rep_A
        self.rep_B = chart.rep_B
        self.Mm = self.group.metric @ chart.m.columns
        self.Mh = self.group.metric @ chart.h.columns
        mk = chart.mk.columns
        # -rho_A(xi_j)^T for xi_j over the basis of m cap k
        self._mk_dual = -np.einsum("ij,iab->jba", mk, self.rep_A.rho) if mk.size else np.zeros((0, chart.A.dim, chart.A.dim))
        self.base_x = GxAPoint(self.group.identity(), chart.mu.copy(), np.zeros(chart.A.dim), chart.alpha.copy())
        scale = 1.0 + float(np.linalg.norm(chart.alpha))
        self.rho_max = 10.0 * scale if rho_max is None else float(rho_max)
        self.U_bound = self._validity_radius(directions, seed)

    # -- dimensions and coordinates -------------------------------------

    @property
    def dim_m(self):
        return self.chart.m.dim

    @property
    def dim_B(self):
        return self.chart.B.dim

    def nu_full(self, nu_m):
        """Extend a covector on m by zero on h."""
        return self.Mm @ np.asarray(nu_m, dtype=float)

    def nu_coords(self, nu):
        """Restrict a covector on g to m (coordinates dual to m's basis)."""
        return self.chart.m.columns.T @ np.asarray(nu, dtype=float)

    def h_slot(self, y):
        """Covector equal to y on h and zero on m."""
        return self.Mh @ np.asarray(y, dtype=float)

    def delta_A(self, delta):
        return self.chart.B.columns @ np.asarray(delta, dtype=float)

    def a_A(self, a):
        return self.chart.B.columns @ np.asarray(a, dtype=float)

    def base_point(self):
        G = self.group
        return ModelPoint(G.identity(), np.zeros(self.dim_m), np.zeros(self.dim_B), np.zeros(self.dim_B))

    # -- Gamma ---------------------------------------------------------

    def gamma_matrix(self, delta):
        """Matrix of (xi, eps) -> xi.(alpha + delta) + eps on (m cap k) + B*."""
        return np.hstack([self._mk_alpha(delta), self.chart.B.columns])

    def _mk_alpha(self, delta):
        beta = self.alpha + self.delta_A(delta)
        return np.einsum("jab,b->aj", self._mk_dual, beta)

    def condition(self, delta):
        M = self.gamma_matrix(delta)
        return float(np.linalg.cond(M)) if M.size else 1.0

    def check_delta(self, delta):
        c = self.condition(delta)
        if not np.isfinite(c) or c >= COND_MAX:
            raise TubeDomainError(f"delta outside the validity region (condition number {c:.3g})")
        return c

    def gamma_star(self, delta, nubar):
        """The c in B-perp with <c, xi.(alpha + delta) + eps> = <nubar, xi>.

        ``nubar`` holds the values on the basis of m cap k; the result is an
        A-coordinate vector.
        """
        nubar = np.asarray(nubar, dtype=float)
        if self.chart.mk.dim == 0:
            return np.zeros(self.chart.A.dim)
        self.check_delta(delta)
        system = (self.chart.Bperp.columns.T @ self._mk_alpha(delta)).T
        c = np.linalg.solve(system, nubar)
        return self.chart.Bperp.columns @ c

    def gamma_inverse(self, delta, c_A):
        """c -> -c <>_{m cap k} (alpha + delta)."""
        beta = self.alpha + self.delta_A(delta)
        return -self.rep_A.diamond(np.asarray(c_A, float), beta, self.chart.mk)

    def gamma_residual(self, delta, nubar):
        """Max violation of the defining relation over basis pairs (xi, eps)."""
        c = self.gamma_star(delta, nubar)
        M = self.gamma_matrix(delta)
        target = np.concatenate([np.asarray(nubar, float), np.zeros(self.dim_B)])
        return float(np.abs(M.T @ c - target).max(initial=0.0))

    # -- maps on the covering space ------------------------------------

    def momentum_JH(self, w: GxAPoint):
        """J_H on G x g* x B x B*."""
        h = self.chart.h
        return -h.columns.T @ w.nu + self.rep_B.diamond(w.a, w.delta, h)

    def l_map(self, m: ModelPoint):
        """(g, sigma, a, delta) -> (g, sigma + a <>_h delta, a, delta)."""
        jn = self.rep_B.diamond(np.asarray(m.a, float), np.asarray(m.delta, float), self.chart.h)
        return GxAPoint(np.asarray(m.g, float), self.nu_full(m.nu) + self.h_slot(jn), np.asarray(m.a, float), np.asarray(m.delta, float))

    def sigma_map(self, w: GxAPoint, check=True):
        """(g, nu, a, delta) -> (g, mu + nu, a + Gamma*(-nu|mk + a <>mk delta), alpha + delta)."""
        if check:
            r = np.abs(self.momentum_JH(w)).max(initial=0.0)
            if r > 1e-9:
                raise TubeDomainError(f"point is not in the zero level of the H momentum (residual {r:.3g})")
        mk = self.chart.mk
        aA, dA = self.a_A(w.a), self.delta_A(w.delta)
        nubar = -mk.columns.T @ w.nu + self.rep_A.diamond(aA, dA, mk)
        corr = self.gamma_star(w.delta, nubar)
        return GxAPoint(w.g, self.mu + w.nu, aA + corr, self.alpha + dA)

    def momentum_JK(self, x: GxAPoint):
        return momentum_JK(self.rep_A, x, self.chart.k)

    def phi_pushforward(self, x: GxAPoint):
        try:
            q, p = self.chart.pushforward(x.g, x.nu, x.a, x.delta)
        except SliceError as exc:
            raise TubeDomainError(str(exc)) from exc
        return AmbientCotangent(q, p)

    def tube_evaluate(self, m: ModelPoint):
        self.check_delta(m.delta)
        return self.phi_pushforward(self.sigma_map(self.l_map(m), check=False))

    def tube_alternative(self, m: ModelPoint):
        """Same tube through the exchange maps and the inverse cotangent lift of F."""
        self.check_delta(m.delta)
        w = self.l_map(m)
        g, rho, b, beta = w.g, w.nu, w.a, w.delta
        # exchange on T*B: (b, beta) -> (beta, -b)
        base_dual, fiber = beta, -b
        base_A = self.alpha + self.delta_A(base_dual)
        fiber_A = self.a_A(fiber) + self._gamma_dual(base_dual, rho, fiber)
        # undo the exchange on T*A: (alpha', a') -> (-a', alpha'), then shift by mu
        x = GxAPoint(g, self.mu + rho, -fiber_A, base_A)
        return self.phi_pushforward(x)

    def _gamma_dual(self, delta, rho, fiber):
        """Fiber correction c in B-perp making the dual-side K momentum vanish on m cap k.

        Solved directly from -rho|_mk + (alpha + delta) <>_mk (a + c) = 0 with
        A* carrying the contragredient action, independently of gamma_star.
        """
        mk = self.chart.mk
        if mk.dim == 0:
            return np.zeros(self.chart.A.dim)
        base = self.alpha + self.delta_A(delta)
        dual = self.rep_A.dual()
        Bp = self.chart.Bperp.columns
        cols = np.column_stack([dual.diamond(base, Bp[:, j], mk) for j in range(Bp.shape[1])])
        rhs = mk.columns.T @ rho - dual.diamond(base, self.a_A(fiber), mk)
        return Bp @ np.linalg.solve(cols, rhs)

    def tfform_correction(self, delta, rho, fiber):
        """The same correction written with gamma_star: Gamma*(rho|mk + a <>mk delta)."""
        mk = self.chart.mk
        nubar = mk.columns.T @ rho + self.rep_A.diamond(self.a_A(fiber), self.delta_A(delta), mk)
        return self.gamma_star(delta, nubar)

    def dual_momentum_JK(self, g, nu, base_dual_A, fiber_A):
        """J_K on T*(G x A*): -nu|_k + base <> fiber with A* carrying the dual action."""
        k = self.chart.k
        return -k.columns.T @ nu + self.rep_A.dual().diamond(base_dual_A, fiber_A, k)

    def model_momentum(self, m: ModelPoint):
        """Ad*_{g^{-1}}(mu + sigma + J_Ns(v))."""
        w = self.l_map(m)
        return self.group.coadjoint_action(w.g, self.mu + w.nu)

    def twist(self, h, m: ModelPoint):
        """h . (g, nu, a, delta) = (g h^{-1}, h.nu, h.a, h.delta)."""
        MB = self.rep_B.act(h)
        nu = self.nu_coords(self.group.coadjoint_action(h, self.nu_full(m.nu)))
        return ModelPoint(m.g @ np.linalg.inv(h), nu, MB @ m.a, np.linalg.solve(MB.T, m.delta))

    def left(self, g0, m: ModelPoint):
        return ModelPoint(np.asarray(g0) @ m.g, m.nu, m.a, m.delta)

    # -- validity radius -----------------------------------------------

    def _validity_radius(self, directions, seed):
        nB = self.dim_B
        if self.chart.mk.dim == 0 or nB == 0:
            return float("inf")
        rng = np.random.default_rng(seed)
        dirs = [s * e for e in np.eye(nB) for s in (1.0, -1.0)]
        for _ in range(directions):
            u = rng.normal(size=nB)
            dirs.append(u / np.linalg.norm(u))
        return min(self._ray_radius(u) for u in dirs)

    def _ray_radius(self, u, samples=200):
        def logcond(t):
            c = self.condition(t * u)
            return np.log(c) if np.isfinite(c) else np.inf

        limit = np.log(COND_MAX)
        ts = np.linspace(0.0, self.rho_max, samples + 1)
        vals = np.array([logcond(t) for t in ts])
        for i in range(1, len(ts)):
            bad = None
            if vals[i] >= limit:
                bad = ts[i]
            elif i + 1 < len(ts) and vals[i] >= vals[i - 1] and vals[i] >= vals[i + 1]:
                res = minimize_scalar(lambda t: -logcond(t), bounds=(ts[i - 1], ts[i + 1]), method="bounded", options={"xatol": 1e-14})
                if -res.fun >= limit:
                    bad = res.x
            if bad is not None:
                lo, hi = ts[i - 1], bad
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    if logcond(mid) < limit:
                        lo = mid
                    else:
                        hi = mid
                return float(lo)
        return float(self.rho_max)

    # -- finite-difference pullbacks ---------------------------------------

    def covering_dim(self):
        return self.group.dim + self.dim_m + 2 * self.dim_B

    def _perturb(self, m: ModelPoint, theta):
        d, dm, nB = self.group.dim, self.dim_m, self.dim_B
        eta = theta[:d]
        return ModelPoint(
            m.g @ self.group.exp(eta),
            m.nu + theta[d : d + dm],
            m.a + theta[d + dm : d + dm + nB],
            m.delta + theta[d + dm + nB :],
        )

    def _fd_columns(self, fun, m, step, richardson=False):
        def central(h):
            cols = []
            for i in range(self.covering_dim()):
                e = np.zeros(self.covering_dim())
                e[i] = h
                cols.append((fun(self._perturb(m, e)) - fun(self._perturb(m, -e))) / (2 * h))
            return np.column_stack(cols)

        D = central(step)
        if richardson:
            D = (4.0 * central(step / 2) - D) / 3.0
        return D

    def _trivialized(self, D, fiber_slice):
        """Left-trivialized tangent columns: exact group part, differenced fibers."""
        d = self.group.dim
        n = self.covering_dim()
        gpart = np.zeros((d, n))
        gpart[:, :d] = np.eye(d)
        return np.vstack([gpart, D[fiber_slice]])

    def pullback_tube(self, m: ModelPoint, step=1e-5, richardson=False):
        """Pullback of the canonical form on T*Q through the tube."""
        D = self._fd_columns(lambda p: self.tube_evaluate(p).flat(), m, step, richardson)
        return D.T @ canonical_form_TstarQ(self.chart.action.dimQ) @ D

    def pullback_model(self, m: ModelPoint, step=1e-5, richardson=False):
        """Pullback of the canonical form on T*(G x B) through l."""
        def fun(p):
            w = self.l_map(p)
            return np.concatenate([w.nu, w.a, w.delta])

        D = self._trivialized(self._fd_columns(fun, m, step, richardson), slice(None))
        w = self.l_map(m)
        return D.T @ canonical_form_matrix(self.group, w.nu, self.dim_B) @ D

    def pullback_sigma(self, m: ModelPoint, step=1e-5, richardson=False):
        """Pullback of the canonical form on T*(G x A) through sigma composed with l."""
        def fun(p):
            x = self.sigma_map(self.l_map(p), check=False)
            return np.concatenate([x.nu, x.a, x.delta])

        D = self._trivialized(self._fd_columns(fun, m, step, richardson), slice(None))
        x = self.sigma_map(self.l_map(m), check=False)
        return D.T @ canonical_form_matrix(self.group, x.nu, self.chart.A.dim) @ D

    def symplecticity_residual(self, m: ModelPoint, step=1e-5, richardson=False):
        return float(np.abs(self.pullback_tube(m, step, richardson) - self.pullback_model(m, step, richardson)).max())

    def sigma_presymplectic_residual(self, m: ModelPoint, step=1e-5, richardson=False):
        return float(np.abs(self.pullback_sigma(m, step, richardson) - self.pullback_model(m, step, richardson)).max())

    # -- sampling ------------------------------------------------------

    def sample_point(self, rng, scale=0.3, delta_fraction=0.5):
        """Random model point with |delta| inside a fraction of the validity radius."""
        rng = np.random.default_rng(rng)
        g = self.group.haar_sample(rng)
        nu = rng.normal(size=self.dim_m) * scale
        a = rng.normal(size=self.dim_B) * scale
        delta = rng.normal(size=self.dim_B)
        radius = min(scale, delta_fraction * self.U_bound)
        if self.dim_B:
            delta *= radius * rng.uniform(0.0, 1.0) / max(np.linalg.norm(delta), 1e-300)
        return ModelPoint(g, nu, a, delta)
