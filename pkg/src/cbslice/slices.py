"""Isotropy algebras, linear slices and the case flags at a point z = (q, p)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .actions import LinearAction
from .liealg import LieGroupModel
from .subspace import (
    CONTAIN_TOL,
    Subspace,
    intersection,
    kernel,
    orthogonal_complement,
)


class SliceError(ValueError):
    pass


def isotropy_algebra_config(action: LinearAction, q):
    """k = ker(xi -> xi.q)."""
    return kernel(action.orbit_matrix(q), action.group.metric, ncols=action.group.dim)


def isotropy_algebra_point(action: LinearAction, q, p):
    """h = ker(xi -> (xi.q, xi.p))."""
    dual = action.dual()
    stacked = np.vstack([action.orbit_matrix(q), dual.orbit_matrix(p)])
    return kernel(stacked, action.group.metric, ncols=action.group.dim)


def coadjoint_orbit_matrix(group: LieGroupModel, mu):
    """Columns ad*_{E_i} mu."""
    mu = np.asarray(mu, dtype=float)
    return np.column_stack([group.ad_star(e, mu) for e in np.eye(group.dim)]) if group.dim else np.zeros((0, 0))


def isotropy_algebra_momentum(group: LieGroupModel, mu):
    """g_mu = ker(xi -> ad*_xi mu)."""
    return kernel(coadjoint_orbit_matrix(group, mu), group.metric, ncols=group.dim)


@dataclass(frozen=True, eq=False)
class SliceChart:
    """All point-local data at z = (q, p).

    A is a Euclidean-orthonormal basis of Q; B and Bperp are given in
    A-coordinates; k, h, gmu, m, mk are metric-orthonormal in g.
    """

    action: LinearAction
    q: np.ndarray
    p: np.ndarray
    mu: np.ndarray
    k: Subspace
    h: Subspace
    gmu: Subspace
    A: Subspace
    alpha: np.ndarray
    B: Subspace
    Bperp: Subspace
    m: Subspace
    mk: Subspace

    @property
    def group(self):
        return self.action.group

    @cached_property
    def rep_A(self):
        """The action written in A-coordinates (meaningful for the k-part)."""
        return self.action.restrict(self.A)

    @cached_property
    def rep_B(self):
        """The action written in B-coordinates (meaningful for the h-part)."""
        return self.rep_A.restrict(self.B)

    def k_alpha_matrix(self):
        """Columns xi.alpha in A* for xi running over the basis of k."""
        rep = self.rep_A.dual()
        cols = [rep.infinitesimal_action(self.k.columns[:, j], self.alpha) for j in range(self.k.dim)]
        return np.column_stack(cols) if cols else np.zeros((self.A.dim, 0))

    def mk_alpha_matrix(self, delta_A):
        """Columns xi.(alpha + delta) for xi over the basis of m cap k."""
        rep = self.rep_A.dual()
        beta = self.alpha + delta_A
        cols = [rep.infinitesimal_action(self.mk.columns[:, j], beta) for j in range(self.mk.dim)]
        return np.column_stack(cols) if cols else np.zeros((self.A.dim, 0))

    @cached_property
    def kperp(self):
        """Metric-orthogonal complement of k in g."""
        return orthogonal_complement(self.k, gram=self.group.metric)

    def pushforward_system(self, a_A):
        """Square matrix whose columns are xi_perp.(q + a) over k-perp, then A."""
        y = self.q + self.A.columns @ a_A
        kp = self.kperp.columns
        orbit = self.action.orbit_matrix(y) @ kp
        return np.hstack([orbit, self.A.columns]), kp

    def pushforward(self, g, nu, a_A, beta_A):
        """Image in T*Q of a point of T*(G x A) with J_K = 0, for linear Q.

        The base point is g.(q + a).  The covector p is fixed by
        <p, g.(xi.(q + a) + a_dot)> = <nu, xi> + <beta, a_dot>
        for xi in the complement of k and a_dot in A.
        """
        S, kp = self.pushforward_system(a_A)
        rhs = np.concatenate([kp.T @ nu, beta_A])
        cond = np.linalg.cond(S) if S.size else 1.0
        if not np.isfinite(cond) or cond > 1e12:
            raise SliceError("pushforward system is singular at this point")
        p0 = np.linalg.solve(S.T, rhs)
        M = self.action.act(g)
        y = self.q + self.A.columns @ a_A
        return M @ y, np.linalg.solve(M.T, p0)

    def pushforward_tangent(self, nu, a_A, beta_A, g_dot, nu_dot, a_dot, beta_dot):
        """Derivative of ``pushforward`` at (e, nu, a, beta), left-trivialized."""
        S, kp = self.pushforward_system(a_A)
        rhs = np.concatenate([kp.T @ nu, beta_A])
        p0 = np.linalg.solve(S.T, rhs)
        y = self.q + self.A.columns @ a_A
        da = self.A.columns @ a_dot
        dS = np.hstack([self.action.orbit_matrix(da) @ kp, np.zeros_like(self.A.columns)])
        drhs = np.concatenate([kp.T @ nu_dot, beta_dot])
        R = self.action.rho_matrix(g_dot)
        dq = R @ y + da
        dp = -R.T @ p0 + np.linalg.solve(S.T, drhs - dS.T @ p0)
        return dq, dp

    def invariant_residuals(self):
        """Residuals of the structural identities that every chart satisfies."""
        G = self.group
        res = {}
        res["h_in_k"] = self.k.residual(self.h.columns)
        res["h_in_gmu"] = self.gmu.residual(self.h.columns)
        res["mu_vanishes_on_k"] = float(np.abs(self.k.columns.T @ self.mu).max(initial=0.0))
        orbit = self.action.orbit_matrix(self.q)
        res["A_perp_orbit"] = float(np.abs(self.A.columns.T @ orbit).max(initial=0.0))
        rank_orbit = self.action.dimQ - self.A.dim
        res["orbit_dim_identity"] = float(abs(rank_orbit - (G.dim - self.k.dim)))
        kalpha = self.k_alpha_matrix()
        res["B_annihilates_k_alpha"] = float(np.abs(self.B.columns.T @ kalpha).max(initial=0.0))
        kalpha_dim = Subspace.span(kalpha, ambient=self.A.dim).dim
        res["B_dimension"] = float(abs(self.B.dim + kalpha_dim - self.A.dim))
        k_rebuilt = Subspace.span(np.hstack([self.mk.columns, self.h.columns]), G.metric, ambient=G.dim)
        res["k_equals_mk_plus_h"] = float(
            max(k_rebuilt.residual(self.k.columns), self.k.residual(k_rebuilt.columns), abs(k_rebuilt.dim - self.k.dim))
        )
        res["mk_perp_h"] = float(np.abs(self.mk.columns.T @ G.metric @ self.h.columns).max(initial=0.0))
        k_alpha = remark_h_algebra(self)
        res["h_equals_gmu_cap_kalpha"] = float(
            max(k_alpha.residual(self.h.columns), self.h.residual(k_alpha.columns), abs(k_alpha.dim - self.h.dim))
        )
        return res


def remark_h_algebra(chart: SliceChart):
    """g_mu cap k_alpha, where k_alpha = {xi in k : xi.alpha = 0}."""
    kalpha = chart.k_alpha_matrix()
    coeffs = kernel(kalpha, ncols=chart.k.dim)
    k_alpha = Subspace.span(chart.k.columns @ coeffs.columns, chart.group.metric, ambient=chart.group.dim)
    return intersection(k_alpha, chart.gmu)


def metric_invariance_residual(action: LinearAction, sub: Subspace, samples=50, rng=0):
    """Spot-check that exp(sub) acts by Euclidean isometries on Q."""
    rng = np.random.default_rng(rng)
    worst = 0.0
    if sub.dim == 0:
        return 0.0
    for _ in range(samples):
        xi = sub.columns @ rng.normal(size=sub.dim) * 2.0
        M = action.act(action.group.exp(xi))
        worst = max(worst, float(np.abs(M.T @ M - np.eye(action.dimQ)).max()))
    return worst


def build_slice_chart(action: LinearAction, q, p, check_metric=True):
    G = action.group
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if q.shape != (action.dimQ,) or p.shape != (action.dimQ,):
        raise SliceError(f"q and p must have length {action.dimQ}")
    mu = action.momentum(q, p)
    k = isotropy_algebra_config(action, q)
    h = isotropy_algebra_point(action, q, p)
    gmu = isotropy_algebra_momentum(G, mu)
    if check_metric and metric_invariance_residual(action, k) > 1e-9:
        raise SliceError("the Euclidean metric on Q is not invariant under the isotropy of q")
    orbit = Subspace.span(action.orbit_matrix(q), ambient=action.dimQ)
    A = orthogonal_complement(orbit)
    alpha = A.columns.T @ p
    m = orthogonal_complement(h, gram=G.metric)
    mk = orthogonal_complement(h, k, gram=G.metric)
    chart = SliceChart(action, q, p, mu, k, h, gmu, A, alpha, Subspace.zero(A.dim), Subspace.zero(A.dim), m, mk)
    kalpha = chart.k_alpha_matrix()
    B = kernel(kalpha.T, ncols=A.dim)
    Bperp = orthogonal_complement(B)
    return SliceChart(action, q, p, mu, k, h, gmu, A, alpha, B, Bperp, m, mk)


def check_case_flags(chart: SliceChart, tol=CONTAIN_TOL):
    return {
        "K_subset_Gmu": chart.gmu.contains(chart.k, tol),
        "alpha_zero": bool(np.linalg.norm(chart.alpha) < tol),
        "Gmu_full": chart.gmu.dim == chart.group.dim,
        "H_equals_K": chart.h.dim == chart.k.dim and chart.h.contains(chart.k, tol),
    }
