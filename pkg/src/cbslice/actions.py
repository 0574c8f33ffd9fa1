"""Linear actions on Q = R^n and their lifts: diamond products, momentum maps,
and the left-trivialized canonical form on T*(G x A)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import block_diag

from .liealg import LieGroupModel
from .subspace import Subspace


class ActionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LinearAction:
    """Representation of ``group`` on R^n.

    ``rho`` holds one n x n matrix per algebra basis element and ``act``
    maps a group matrix to its representing matrix.
    """

    group: LieGroupModel
    rho: np.ndarray
    act: Callable[[np.ndarray], np.ndarray]
    name: str = ""

    @property
    def dimQ(self):
        return self.rho.shape[1]

    def rho_matrix(self, xi):
        xi = self.group._check(xi)
        return np.tensordot(xi, self.rho, 1) if len(xi) else np.zeros((self.dimQ, self.dimQ))

    def infinitesimal_action(self, xi, a):
        return self.rho_matrix(xi) @ self._vec(a)

    def infinitesimal_dual_action(self, xi, alpha):
        """xi . alpha = -rho(xi)^T alpha, so <xi.alpha, b> = -<alpha, xi.b>."""
        return -self.rho_matrix(xi).T @ self._vec(alpha)

    def orbit_matrix(self, q):
        """Columns rho_i q; the image is the orbit tangent g.q."""
        q = self._vec(q)
        if self.group.dim == 0:
            return np.zeros((self.dimQ, 0))
        return np.einsum("iab,b->ai", self.rho, q)

    def diamond(self, a, alpha, l: Subspace | None = None):
        """a <> alpha restricted to ``l``, in l's basis coordinates.

        <a <> alpha, xi> = <alpha, xi . a>.
        """
        full = self.orbit_matrix(a).T @ self._vec(alpha)
        return full if l is None else l.columns.T @ full

    def momentum(self, q, p):
        """J(q, p) = q <> p."""
        return self.diamond(q, p)

    def lift(self, g, q, p):
        """Cotangent lift of g to T*Q."""
        M = self.act(g)
        return M @ self._vec(q), np.linalg.solve(M.T, self._vec(p))

    def dual(self):
        """The contragredient action on Q*."""
        rho = -np.transpose(self.rho, (0, 2, 1))
        return LinearAction(self.group, rho, lambda g: np.linalg.inv(self.act(g)).T, self.name + "*")

    def restrict(self, sub: Subspace):
        """Action matrices written in the orthonormal basis of an invariant subspace."""
        A = sub.columns
        rho = np.einsum("ab,ibc,cd->iad", A.T, self.rho, A)
        return LinearAction(self.group, rho, lambda g: A.T @ self.act(g) @ A, self.name + "|A")

    def _vec(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dimQ,):
            raise ActionError(f"expected a vector of length {self.dimQ}, got shape {v.shape}")
        return v


def standard_representation(group: LieGroupModel, copies=1, trivial=0):
    """``copies`` of the defining representation plus ``trivial`` fixed coordinates."""
    if copies < 0 or trivial < 0 or copies + trivial == 0:
        raise ActionError("representation must have positive dimension")
    n = group.n
    rho = np.array(
        [block_diag(*([E] * copies), np.zeros((trivial, trivial))) for E in group.basis]
    ).reshape(group.dim, copies * n + trivial, copies * n + trivial)

    def act(g):
        return block_diag(*([np.asarray(g, float)] * copies), np.eye(trivial))

    name = f"{copies}x{group.name}" + (f"+R^{trivial}" if trivial else "")
    return LinearAction(group, rho, act, name)


@dataclass(frozen=True, eq=False)
class GxAPoint:
    """Point of T*(G x A) = G x g* x A x A* in left trivialization."""

    g: np.ndarray
    nu: np.ndarray
    a: np.ndarray
    delta: np.ndarray

    def flat(self):
        return np.concatenate([np.ravel(self.g), self.nu, self.a, self.delta])


def momentum_JG(group: LieGroupModel, x: GxAPoint):
    """J_G(g, nu, a, delta) = Ad*_{g^{-1}} nu."""
    return group.coadjoint_action(x.g, x.nu)


def momentum_JK(rep_A: LinearAction, x: GxAPoint, k: Subspace):
    """J_K(g, nu, a, delta) = -nu|_k + a <>_k delta, in k's basis coordinates.

    ``rep_A`` is the action written in A-coordinates (only its k-part is used).
    """
    return -k.columns.T @ x.nu + rep_A.diamond(x.a, x.delta, k)


def twist(group: LieGroupModel, rep_A: LinearAction, h, x: GxAPoint):
    """Twist action h . (g, nu, a, delta) = (g h^{-1}, Ad*_{h^{-1}} nu, h.a, h.delta)."""
    M = rep_A.act(h)
    return GxAPoint(
        x.g @ np.linalg.inv(h),
        group.coadjoint_action(h, x.nu),
        M @ x.a,
        np.linalg.solve(M.T, x.delta),
    )


def left_translate(group: LieGroupModel, g0, x: GxAPoint):
    return GxAPoint(np.asarray(g0) @ x.g, x.nu, x.a, x.delta)


def canonical_form_matrix(group: LieGroupModel, nu, dimA):
    """Matrix of the left-trivialized canonical form at a point with fiber value nu.

    Tangent coordinates are ordered (g_dot, nu_dot, a_dot, delta_dot).
    """
    d = group.dim
    nu = group._check(nu)
    bracket_term = np.einsum("k,ijk->ij", nu, group.structure)
    I = np.eye(d)
    Z = np.zeros((d, d))
    top = np.block([[bracket_term, I], [-I, Z]])
    Ia = np.eye(dimA)
    Za = np.zeros((dimA, dimA))
    bottom = np.block([[Za, Ia], [-Ia, Za]])
    return block_diag(top, bottom)


def canonical_form_left_trivialized(group: LieGroupModel, x: GxAPoint, v1, v2):
    """<g1, nu2> - <g2, nu1> + <nu, [g1, g2]> + <a1, delta2> - <a2, delta1>.

    Tangent vectors are tuples (g_dot, nu_dot, a_dot, delta_dot).
    """
    g1, n1, a1, d1 = (np.asarray(t, float) for t in v1)
    g2, n2, a2, d2 = (np.asarray(t, float) for t in v2)
    return float(
        g1 @ n2 - g2 @ n1 + x.nu @ group.bracket(g1, g2) + a1 @ d2 - a2 @ d1
    )


def canonical_form_TstarQ(n):
    """omega((u1, v1), (u2, v2)) = <v2, u1> - <v1, u2> on Q + Q*."""
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])
