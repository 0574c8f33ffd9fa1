"""Symplectic normal spaces, the Witt-Artin decomposition, KKS forms and the
linear symplectomorphisms that split the normal space at a cotangent point."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import block_diag

from .actions import canonical_form_matrix, canonical_form_TstarQ
from .slices import SliceChart, check_case_flags, coadjoint_orbit_matrix
from .subspace import (
    Subspace,
    direct_sum,
    kernel,
    numerical_rank,
    orthogonal_complement,
    smallest_retained_singular_value,
)


class NormalFormError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class NormalSpaceData:
    """Quotient ker(dJ) / orbit, represented by the orthogonal complement."""

    kerdJ: Subspace
    orbit_gmu: Subspace
    reps: Subspace
    omega_red: np.ndarray
    form: np.ndarray
    min_singular: float = float("inf")

    @property
    def dim(self):
        return self.reps.dim

    def coords(self, v):
        """Representative coordinates of a vector of ker(dJ)."""
        return self.reps.coords(v)

    def invariant_residuals(self):
        res = {
            "orbit_in_kernel": self.kerdJ.residual(self.orbit_gmu.columns),
            "dimension_count": float(abs(self.reps.dim - (self.kerdJ.dim - self.orbit_gmu.dim))),
            "antisymmetry": float(np.abs(self.omega_red + self.omega_red.T).max(initial=0.0)),
            "even_dimension": float(self.reps.dim % 2),
        }
        rank = numerical_rank(self.omega_red) if self.reps.dim else 0
        res["nondegeneracy"] = float(self.reps.dim - rank)
        return res


def reduce_linear(form, constraint, orbit_vectors, gram=None):
    """Normal space ker(constraint) / span(orbit_vectors) with reduced form."""
    n = form.shape[0]
    kerdJ = kernel(constraint, gram, ncols=n)
    orbit = Subspace.span(orbit_vectors, gram, ambient=n)
    reps = orthogonal_complement(orbit, kerdJ, gram)
    omega_red = reps.columns.T @ form @ reps.columns
    sv = smallest_retained_singular_value(orbit_vectors) if np.size(orbit_vectors) else float("inf")
    return NormalSpaceData(kerdJ, orbit, reps, omega_red, form, sv)


def momentum_derivative_matrix(chart: SliceChart):
    """Rows dJ_i(dq, dp) = <p, rho_i dq> + <dp, rho_i q>."""
    rho = chart.action.rho
    left = np.einsum("iab,a->ib", rho, chart.p)
    right = np.einsum("iab,b->ia", rho, chart.q)
    return np.hstack([left, right])


def lifted_orbit_vectors(chart: SliceChart, sub: Subspace):
    """Columns (xi.q, xi.p) for xi over the basis of ``sub``."""
    action = chart.action
    cols = []
    for j in range(sub.dim):
        xi = sub.columns[:, j]
        cols.append(np.concatenate([action.infinitesimal_action(xi, chart.q), action.infinitesimal_dual_action(xi, chart.p)]))
    n2 = 2 * action.dimQ
    return np.column_stack(cols) if cols else np.zeros((n2, 0))


def symplectic_normal_space(chart: SliceChart):
    n = chart.action.dimQ
    return reduce_linear(
        canonical_form_TstarQ(n),
        momentum_derivative_matrix(chart),
        lifted_orbit_vectors(chart, chart.gmu),
    )


def lifted_group_matrix(chart: SliceChart, g):
    """Cotangent-lifted action of g on T_z(T*Q) = Q + Q*."""
    M = chart.action.act(g)
    return block_diag(M, np.linalg.inv(M).T)


def symplectic_complement(form, sub: Subspace):
    n = form.shape[0]
    if sub.dim == 0:
        return Subspace.full(n)
    return kernel(sub.columns.T @ form, ncols=n)


@dataclass(frozen=True, eq=False)
class WittArtinData:
    T1: Subspace
    T0: Subspace
    N0: Subspace
    N1: Subspace
    form: np.ndarray

    def dims(self):
        return {"T1": self.T1.dim, "T0": self.T0.dim, "N0": self.N0.dim, "N1": self.N1.dim}

    def invariant_residuals(self, chart: SliceChart):
        """Residuals of the decomposition invariants (zero means exact)."""
        w = self.form
        n = w.shape[0]
        orbit_full = Subspace.span(lifted_orbit_vectors(chart, chart.group.algebra()), ambient=n)
        kerdJ = kernel(momentum_derivative_matrix(chart), ncols=n)

        def same(S, T):
            return max(S.residual(T.columns), T.residual(S.columns), abs(S.dim - T.dim))

        def restricted(S, T=None):
            T = S if T is None else T
            return S.columns.T @ w @ T.columns

        def defect(mat):
            return float(min(mat.shape) - numerical_rank(mat)) if mat.size else 0.0

        res = {
            "T1_plus_T0_is_orbit": float(same(direct_sum(self.T1, self.T0), orbit_full)),
            "N1_plus_T0_is_kernel": float(same(direct_sum(self.N1, self.T0), kerdJ)),
            "T0_isotropic": float(np.abs(restricted(self.T0)).max(initial=0.0)),
            "N0_isotropic": float(np.abs(restricted(self.N0)).max(initial=0.0)),
            "T1_symplectic": defect(restricted(self.T1)),
            "N1_symplectic": defect(restricted(self.N1)),
            "T0_N0_pairing": defect(restricted(self.T0, self.N0)) + abs(self.T0.dim - self.N0.dim),
        }
        total = np.hstack([self.T1.columns, self.T0.columns, self.N0.columns, self.N1.columns])
        res["direct_sum_full"] = float(abs(numerical_rank(total) - n) + abs(total.shape[1] - n))
        return res


def compatible_complex_structure(omega):
    """J0 from the polar decomposition omega = J0 P (J0 orthogonal, J0^2 = -1)."""
    if omega.size == 0:
        return omega
    S = omega.T @ omega
    vals, vecs = np.linalg.eigh(S)
    inv_sqrt = vecs @ np.diag(vals ** -0.5) @ vecs.T
    return omega @ inv_sqrt


def witt_artin(chart: SliceChart, nsd: NormalSpaceData | None = None):
    nsd = symplectic_normal_space(chart) if nsd is None else nsd
    w = nsd.form
    n = w.shape[0]
    orbit_full = Subspace.span(lifted_orbit_vectors(chart, chart.group.algebra()), ambient=n)
    T0 = nsd.orbit_gmu
    T1 = orthogonal_complement(T0, orbit_full)
    N1 = nsd.reps
    W = symplectic_complement(w, direct_sum(T1, N1))
    if T0.dim == 0:
        N0 = Subspace.zero(n)
    else:
        omega_W = W.columns.T @ w @ W.columns
        J0 = compatible_complex_structure(omega_W)
        t0 = W.columns.T @ T0.columns
        N0 = Subspace.span(W.columns @ (J0 @ t0), ambient=n)
    return WittArtinData(T1, T0, N0, N1, w)


def kks_form(group, mu, sign, xi, eta):
    """sign * <mu, [xi, eta]>."""
    if sign not in (1, -1, "+", "-"):
        raise NormalFormError("sign must be +1 or -1")
    s = 1.0 if sign in (1, "+") else -1.0
    return s * float(np.asarray(mu, float) @ group.bracket(xi, eta))


@dataclass(frozen=True, eq=False)
class SplittingMap:
    """Linear map between normal-space representatives with both forms."""

    matrix: np.ndarray
    source_form: np.ndarray
    target_form: np.ndarray
    name: str = ""
    source_action: Callable | None = field(default=None, repr=False)
    target_action: Callable | None = field(default=None, repr=False)

    @property
    def source_dim(self):
        return self.matrix.shape[1]

    @property
    def target_dim(self):
        return self.matrix.shape[0]

    def congruence_residual(self):
        M = self.matrix
        if M.size == 0:
            return 0.0
        return float(np.abs(M.T @ self.target_form @ M - self.source_form).max())

    def is_invertible(self):
        return self.source_dim == self.target_dim and numerical_rank(self.matrix) == self.source_dim

    def equivariance_residual(self, elements):
        if self.source_action is None or self.target_action is None:
            raise NormalFormError("splitting map carries no group actions")
        worst = 0.0
        for h in elements:
            lhs = self.matrix @ self.source_action(h)
            rhs = self.target_action(h) @ self.matrix
            worst = max(worst, float(np.abs(lhs - rhs).max(initial=0.0)))
        return worst


@dataclass(frozen=True, eq=False)
class OrbitModel:
    """The product of the coadjoint orbit through mu (minus KKS form) with T*A."""

    chart: SliceChart
    orbit_algebra: Subspace
    tangent_basis: np.ndarray
    kks_minus: np.ndarray

    @property
    def orbit_dim(self):
        return self.orbit_algebra.dim

    @property
    def form(self):
        return block_diag(self.kks_minus, canonical_form_TstarQ(self.chart.A.dim))

    def orbit_coords(self, v):
        """Coordinates c of a tangent vector v = sum_j c_j (-ad*_{xi_j} mu)."""
        if self.orbit_dim == 0:
            return np.zeros(0)
        return np.linalg.lstsq(self.tangent_basis, v, rcond=None)[0]

    def momentum_K(self, nu, a, delta):
        """J'_K(nu, a, delta) = -nu|_k + a <>_k delta."""
        ch = self.chart
        return -ch.k.columns.T @ nu + ch.rep_A.diamond(a, delta, ch.k)

    def constraint(self):
        """Derivative of J'_K at (mu, 0, alpha) in coordinates (c, a_dot, delta_dot)."""
        ch = self.chart
        K = ch.k.columns
        nA = ch.A.dim
        dmu = -K.T @ self.tangent_basis if self.orbit_dim else np.zeros((ch.k.dim, 0))
        dalpha = K.T @ np.einsum("iab,a->ib", ch.rep_A.rho, ch.alpha) if ch.group.dim else np.zeros((0, nA))
        return np.hstack([dmu, dalpha, np.zeros((ch.k.dim, nA))])

    def k_orbit_vectors(self):
        ch = self.chart
        rep = ch.rep_A.dual()
        cols = []
        for j in range(ch.k.dim):
            z = ch.k.columns[:, j]
            c = self.orbit_coords(-ch.group.ad_star(z, ch.mu))
            cols.append(np.concatenate([c, np.zeros(ch.A.dim), rep.infinitesimal_action(z, ch.alpha)]))
        size = self.orbit_dim + 2 * ch.A.dim
        return np.column_stack(cols) if cols else np.zeros((size, 0))

    def group_matrix(self, h):
        """Action of h in G_mu cap K on tangent coordinates (c, a_dot, delta_dot)."""
        ch = self.chart
        G = ch.group
        if self.orbit_dim:
            moved = np.column_stack([G.coadjoint_action(h, self.tangent_basis[:, j]) for j in range(self.orbit_dim)])
            Oc = np.column_stack([self.orbit_coords(moved[:, j]) for j in range(self.orbit_dim)])
        else:
            Oc = np.zeros((0, 0))
        MA = ch.rep_A.act(h)
        return block_diag(Oc, MA, np.linalg.inv(MA).T)


def model_OmuTA(chart: SliceChart):
    G = chart.group
    comp = orthogonal_complement(chart.gmu, gram=G.metric)
    if comp.dim:
        basis = np.column_stack([-G.ad_star(comp.columns[:, j], chart.mu) for j in range(comp.dim)])
        W = np.array(
            [[kks_form(G, chart.mu, -1, comp.columns[:, i], comp.columns[:, j]) for j in range(comp.dim)] for i in range(comp.dim)]
        )
    else:
        basis = np.zeros((G.dim, 0))
        W = np.zeros((0, 0))
    return OrbitModel(chart, comp, basis, W)


def model_normal_space(model: OrbitModel):
    """Symplectic normal space of the K-action on the orbit model at (mu, 0, alpha)."""
    return reduce_linear(model.form, model.constraint(), model.k_orbit_vectors())


def _rep_action(nsd: NormalSpaceData, tangent_matrix, gram=None):
    """Action on representative coordinates: act, then reproject."""
    R = nsd.reps.columns
    G = np.eye(R.shape[0]) if gram is None else gram

    def act(h):
        return R.T @ G @ tangent_matrix(h) @ R

    return act


def _h_elements(chart: SliceChart, count, rng):
    rng = np.random.default_rng(rng)
    out = []
    for _ in range(count):
        xi = chart.h.columns @ rng.normal(size=chart.h.dim) * 2.0 if chart.h.dim else np.zeros(chart.group.dim)
        out.append(chart.group.exp(xi))
    return out


@dataclass(frozen=True, eq=False)
class TangentChain:
    """Normal space at x = (e, mu, 0, alpha) in T*(G x A) and the maps out of it."""

    nsd_x: NormalSpaceData
    nsd_z: NormalSpaceData
    nsd_model: NormalSpaceData
    model: OrbitModel
    gram_x: np.ndarray
    map_piK: SplittingMap
    map_piGmu: SplittingMap
    map_theta: SplittingMap

    def triangle_residual(self):
        M = self.map_theta.matrix @ self.map_piK.matrix - self.map_piGmu.matrix
        return float(np.abs(M).max(initial=0.0))

    def as_dict(self):
        return {"map_piK": self.map_piK, "map_piGmu": self.map_piGmu, "map_theta": self.map_theta}


def product_normal_space(chart: SliceChart):
    """N_s(x) for the left G action and the twisted K action on T*(G x A)."""
    G = chart.group
    d, nA = G.dim, chart.A.dim
    K = chart.k.columns
    form = canonical_form_matrix(G, chart.mu, nA)
    gram = block_diag(G.metric, np.linalg.inv(G.metric), np.eye(nA), np.eye(nA))
    admu = coadjoint_orbit_matrix(G, chart.mu)
    Dalpha = np.einsum("iab,a->ib", chart.rep_A.rho, chart.alpha) if d else np.zeros((0, nA))
    dJG = np.hstack([-admu, np.eye(d), np.zeros((d, 2 * nA))])
    dJK = np.hstack([np.zeros((chart.k.dim, d)), -K.T, K.T @ Dalpha, np.zeros((chart.k.dim, nA))])
    constraint = np.vstack([dJG, dJK])
    rep_dual = chart.rep_A.dual()
    cols = []
    for j in range(chart.gmu.dim):
        eta = chart.gmu.columns[:, j]
        cols.append(np.concatenate([eta, np.zeros(d), np.zeros(2 * nA)]))
    for j in range(chart.k.dim):
        z = K[:, j]
        cols.append(np.concatenate([-z, -G.ad_star(z, chart.mu), np.zeros(nA), rep_dual.infinitesimal_action(z, chart.alpha)]))
    orbit = np.column_stack(cols) if cols else np.zeros((form.shape[0], 0))
    return reduce_linear(form, constraint, orbit, gram), gram


def _product_group_matrix(chart: SliceChart, h):
    """Diagonal action of h in H on tangent coordinates at x: left times twist."""
    G = chart.group
    Ad = G.Ad_matrix(h)
    MA = chart.rep_A.act(h)
    return block_diag(Ad, np.linalg.inv(Ad).T, MA, np.linalg.inv(MA).T)


def tangent_level_chain(chart: SliceChart, nsd_z: NormalSpaceData | None = None):
    nsd_z = symplectic_normal_space(chart) if nsd_z is None else nsd_z
    nsd_x, gram_x = product_normal_space(chart)
    model = model_OmuTA(chart)
    nsd_m = model_normal_space(model)
    G = chart.group
    d, nA = G.dim, chart.A.dim
    Rx = nsd_x.reps.columns
    zero_nu = chart.mu
    zero_a = np.zeros(nA)

    piK_cols, piG_cols = [], []
    for j in range(Rx.shape[1]):
        w = Rx[:, j]
        g_dot, nu_dot, a_dot, b_dot = w[:d], w[d : 2 * d], w[2 * d : 2 * d + nA], w[2 * d + nA :]
        dq, dp = chart.pushforward_tangent(zero_nu, zero_a, chart.alpha, g_dot, nu_dot, a_dot, b_dot)
        piK_cols.append(nsd_z.coords(np.concatenate([dq, dp])))
        theta = np.concatenate([model.orbit_coords(nu_dot), a_dot, b_dot])
        piG_cols.append(nsd_m.coords(theta))
    shape_z = (nsd_z.dim, 0)
    shape_m = (nsd_m.dim, 0)
    PK = np.column_stack(piK_cols) if piK_cols else np.zeros(shape_z)
    PG = np.column_stack(piG_cols) if piG_cols else np.zeros(shape_m)

    act_x = _rep_action(nsd_x, lambda h: _product_group_matrix(chart, h), gram_x)
    act_z = _rep_action(nsd_z, lambda h: lifted_group_matrix(chart, h))
    act_m = _rep_action(nsd_m, model.group_matrix)

    map_piK = SplittingMap(PK, nsd_x.omega_red, nsd_z.omega_red, "piK", act_x, act_z)
    map_piGmu = SplittingMap(PG, nsd_x.omega_red, nsd_m.omega_red, "piGmu", act_x, act_m)
    theta = PG @ np.linalg.inv(PK) if PK.size else np.zeros((nsd_m.dim, nsd_z.dim))
    map_theta = SplittingMap(theta, nsd_z.omega_red, nsd_m.omega_red, "theta", act_z, act_m)
    return TangentChain(nsd_x, nsd_z, nsd_m, model, gram_x, map_piK, map_piGmu, map_theta)


def splitting_K_subset_Gmu(chart: SliceChart, nsd: NormalSpaceData | None = None, chain: TangentChain | None = None):
    """N_s(z) -> T_mu O_mu + B + B*, with target form KKS(-) + canonical."""
    if not check_case_flags(chart)["K_subset_Gmu"]:
        raise NormalFormError("the isotropy of q is not contained in the isotropy of mu")
    chain = tangent_level_chain(chart, nsd) if chain is None else chain
    model = chain.model
    nO, nB = model.orbit_dim, chart.B.dim
    Bc = chart.B.columns
    L = block_diag(np.eye(nO), Bc.T, Bc.T) @ chain.nsd_model.reps.columns
    M = L @ chain.map_theta.matrix
    target = block_diag(model.kks_minus, canonical_form_TstarQ(nB))

    def target_action(h):
        full = model.group_matrix(h)
        O = full[:nO, :nO]
        MB = Bc.T @ chart.rep_A.act(h) @ Bc
        return block_diag(O, MB, np.linalg.inv(MB).T)

    return SplittingMap(M, chain.nsd_z.omega_red, target, "K_subset_Gmu", chain.map_theta.source_action, target_action)


def orbit_normal_space(model: OrbitModel):
    """N_s(mu) = (k.mu)^{omega-} / (k.mu) inside T_mu O_mu."""
    ch = model.chart
    K = ch.k.columns
    constraint = K.T @ model.tangent_basis if model.orbit_dim else np.zeros((ch.k.dim, 0))
    cols = [model.orbit_coords(-ch.group.ad_star(K[:, j], ch.mu)) for j in range(ch.k.dim)]
    orbit = np.column_stack(cols) if cols else np.zeros((model.orbit_dim, 0))
    return reduce_linear(model.kks_minus, constraint, orbit)


def splitting_alpha0(chart: SliceChart, nsd: NormalSpaceData | None = None, chain: TangentChain | None = None):
    """N_s(z) -> N_s(mu) + A + A*, with target form reduced KKS(-) + canonical."""
    if not check_case_flags(chart)["alpha_zero"]:
        raise NormalFormError("alpha is not zero at this point")
    chain = tangent_level_chain(chart, nsd) if chain is None else chain
    model = chain.model
    nsd_mu = orbit_normal_space(model)
    nO, nA = model.orbit_dim, chart.A.dim
    Rmu = nsd_mu.reps.columns if nO else np.zeros((0, 0))
    L = block_diag(Rmu.T, np.eye(nA), np.eye(nA)) @ chain.nsd_model.reps.columns
    M = L @ chain.map_theta.matrix
    target = block_diag(nsd_mu.omega_red, canonical_form_TstarQ(nA))

    def target_action(h):
        full = model.group_matrix(h)
        O = Rmu.T @ full[:nO, :nO] @ Rmu if nO else np.zeros((0, 0))
        MA = chart.rep_A.act(h)
        return block_diag(O, MA, np.linalg.inv(MA).T)

    return SplittingMap(M, chain.nsd_z.omega_red, target, "alpha0", chain.map_theta.source_action, target_action)


def direct_splitting_residual(chart: SliceChart, split: SplittingMap, chain: TangentChain):
    """Compare a splitting with an independent route through the full kernel.

    The independent route inverts the tangent pushforward on all of
    ker dJ_{G x K}(x) by least squares (no representatives), applies the
    orbit-model projection and compares forms.  Returns the congruence
    residual of S = direct^{-1} composite as a symplectic automorphism.
    """
    K = chain.nsd_x.kerdJ.columns
    d, nA = chart.group.dim, chart.A.dim
    imgs, thetas = [], []
    for j in range(K.shape[1]):
        w = K[:, j]
        dq, dp = chart.pushforward_tangent(chart.mu, np.zeros(nA), chart.alpha, w[:d], w[d : 2 * d], w[2 * d : 2 * d + nA], w[2 * d + nA :])
        imgs.append(chain.nsd_z.coords(np.concatenate([dq, dp])))
        thetas.append(chain.nsd_model.coords(np.concatenate([chain.model.orbit_coords(w[d : 2 * d]), w[2 * d : 2 * d + nA], w[2 * d + nA :]])))
    if not imgs:
        return 0.0
    P = np.column_stack(imgs)
    T = np.column_stack(thetas)
    direct_theta = T @ np.linalg.pinv(P)
    S = np.linalg.solve(direct_theta, chain.map_theta.matrix) if direct_theta.size else np.zeros((0, 0))
    if S.size == 0:
        return 0.0
    src = split.source_form
    return float(np.abs(S.T @ src @ S - src).max())
