"""Matrix Lie groups: algebra bases, brackets, exponential and (co)adjoint operators.

Algebra elements are coordinate vectors in the model's basis.  Dual vectors
are coordinates in the dual basis, so pairings are plain dot products.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag, expm

from .subspace import Subspace, numerical_rank

MEMBERSHIP_TOL = 1e-10


class LieAlgebraError(ValueError):
    pass


def _skew2():
    return np.array([[0.0, -1.0], [1.0, 0.0]])


def so3_hat(xi):
    """Standard hat map R^3 -> so(3): hat(x) @ v == cross(x, v)."""
    x1, x2, x3 = xi
    return np.array([[0.0, -x3, x2], [x3, 0.0, -x1], [-x2, x1, 0.0]])


@dataclass(frozen=True, eq=False)
class LieGroupModel:
    """Compact matrix group given by a basis of its Lie algebra.

    ``factors`` records the block structure, as ``("SO", n)`` and
    ``("T", k)`` entries, used for Haar sampling and membership checks.
    """

    name: str
    basis: np.ndarray
    factors: tuple
    metric: np.ndarray | None = None
    structure: np.ndarray = field(init=False, repr=False)
    _flat_pinv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 3 or basis.shape[1] != basis.shape[2]:
            raise LieAlgebraError("basis must be a stack of square matrices")
        d, n, _ = basis.shape
        flat = basis.reshape(d, n * n).T
        if d and numerical_rank(flat) != d:
            raise LieAlgebraError("basis matrices are linearly dependent")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "_flat_pinv", np.linalg.pinv(flat) if d else np.zeros((0, n * n)))
        if self.metric is None:
            metric = np.einsum("iab,jab->ij", basis, basis)
        else:
            metric = np.asarray(self.metric, dtype=float)
        if metric.shape != (d, d) or not np.allclose(metric, metric.T, atol=1e-12):
            raise LieAlgebraError("metric must be a symmetric d x d matrix")
        if d and np.linalg.eigvalsh(metric).min() <= 0:
            raise LieAlgebraError("metric must be positive definite")
        object.__setattr__(self, "metric", metric)
        c = np.zeros((d, d, d))
        for i in range(d):
            for j in range(d):
                comm = basis[i] @ basis[j] - basis[j] @ basis[i]
                coeffs = self._flat_pinv @ comm.ravel()
                if np.linalg.norm(np.tensordot(coeffs, basis, 1) - comm) > 1e-10:
                    raise LieAlgebraError("basis is not closed under the commutator")
                c[i, j] = coeffs
        object.__setattr__(self, "structure", c)

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def n(self):
        return self.basis.shape[1]

    # -- algebra level -------------------------------------------------

    def hat(self, xi):
        xi = self._check(xi)
        return np.tensordot(xi, self.basis, 1) if self.dim else np.zeros((self.n, self.n))

    def vee(self, X):
        return self._flat_pinv @ np.asarray(X, dtype=float).ravel()

    def bracket(self, xi, eta):
        """Coordinates of the matrix commutator [xi, eta]."""
        xi, eta = self._check(xi), self._check(eta)
        X, Y = self.hat(xi), self.hat(eta)
        return self.vee(X @ Y - Y @ X)

    def ad_matrix(self, xi):
        """Matrix of eta -> [xi, eta] in basis coordinates."""
        return np.einsum("i,ijk->kj", self._check(xi), self.structure)

    def ad_star(self, xi, nu):
        """<ad_star(xi, nu), eta> = <nu, [xi, eta]>."""
        return self.ad_matrix(xi).T @ self._check(nu)

    def inner(self, xi, eta):
        return float(self._check(xi) @ self.metric @ self._check(eta))

    # -- group level ---------------------------------------------------

    def exp(self, xi):
        return expm(self.hat(xi))

    def identity(self):
        return np.eye(self.n)

    def Ad_matrix(self, g):
        g = np.asarray(g, dtype=float)
        ginv = np.linalg.inv(g)
        cols = [self.vee(g @ E @ ginv) for E in self.basis]
        return np.column_stack(cols) if cols else np.zeros((0, 0))

    def Ad(self, g, xi):
        """Coordinates of g Xi g^{-1}."""
        return self.Ad_matrix(g) @ self._check(xi)

    def Ad_star(self, g, nu):
        """<Ad_star(g, nu), xi> = <nu, Ad(g, xi)>."""
        return self.Ad_matrix(g).T @ self._check(nu)

    def coadjoint_action(self, g, nu):
        """Left coadjoint action g . nu = Ad_star(g^{-1}, nu)."""
        return self.Ad_star(np.linalg.inv(g), nu)

    def membership_residual(self, g):
        """Max deviation from the block-orthogonal structure of the catalog group."""
        g = np.asarray(g, dtype=float)
        sizes = [2 * k if kind == "T" else k for kind, k in self.factors]
        pattern = block_diag(*[np.ones((s, s)) for s in sizes])
        res = float(np.abs(g[pattern == 0]).max(initial=0.0))
        off = 0
        for (kind, k), size in zip(self.factors, sizes):
            block = g[off : off + size, off : off + size]
            res = max(res, np.abs(block.T @ block - np.eye(size)).max(), abs(np.linalg.det(block) - 1.0))
            if kind == "T":
                rot = block_diag(*[np.ones((2, 2))] * k)
                res = max(res, np.abs(block[rot == 0]).max(initial=0.0))
            elif kind == "E":
                res = max(res, np.abs(block - np.eye(size)).max(initial=0.0))
            off += size
        return res

    def is_member(self, g, tol=MEMBERSHIP_TOL):
        return self.membership_residual(g) < tol

    def haar_sample(self, rng):
        """Haar-distributed element; ``rng`` is a seed or a numpy Generator."""
        rng = np.random.default_rng(rng)
        blocks = []
        for kind, k in self.factors:
            if kind == "SO":
                blocks.append(_haar_so(k, rng))
            elif kind == "T":
                angles = rng.uniform(0.0, 2.0 * np.pi, size=k)
                blocks.extend(_rot2(t) for t in angles)
            elif kind == "E":
                blocks.append(np.eye(k))
            else:
                raise LieAlgebraError(f"unsupported group factor {kind!r}")
        return block_diag(*blocks) if blocks else np.zeros((0, 0))

    def algebra(self):
        """The whole algebra as a metric-orthonormal subspace."""
        return Subspace.full(self.dim, self.metric)

    def _check(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise LieAlgebraError(f"expected a vector of length {self.dim}, got shape {v.shape}")
        return v


def _rot2(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _haar_so(n, rng):
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def _so_basis(n):
    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n))
            E[j, i], E[i, j] = 1.0, -1.0
            basis.append(E)
    return basis


def so2():
    return LieGroupModel("SO(2)", np.array([_skew2()]), (("SO", 2),))


def so3():
    return LieGroupModel("SO(3)", np.array([so3_hat(e) for e in np.eye(3)]), (("SO", 3),))


def torus(k):
    """k-torus as block-diagonal 2x2 rotations."""
    if k < 1:
        raise LieAlgebraError("torus dimension must be positive")
    basis = []
    for b in range(k):
        E = np.zeros((2 * k, 2 * k))
        E[2 * b : 2 * b + 2, 2 * b : 2 * b + 2] = _skew2()
        basis.append(E)
    return LieGroupModel(f"T^{k}", np.array(basis), (("T", k),))


def trivial_group(n):
    """The one-element group acting on R^n; its algebra is zero."""
    return LieGroupModel("{e}", np.zeros((0, n, n)), (("E", n),))


def special_orthogonal(n):
    if n == 2:
        return so2()
    if n == 3:
        return so3()
    return LieGroupModel(f"SO({n})", np.array(_so_basis(n)), (("SO", n),))


def direct_product(*models):
    """Block-diagonal direct product of catalog groups."""
    sizes = [m.n for m in models]
    total = sum(sizes)
    basis = []
    off = 0
    for m in models:
        for E in m.basis:
            big = np.zeros((total, total))
            big[off : off + m.n, off : off + m.n] = E
            basis.append(big)
        off += m.n
    factors = tuple(f for m in models for f in m.factors)
    name = " x ".join(m.name for m in models)
    return LieGroupModel(name, np.array(basis), factors)
