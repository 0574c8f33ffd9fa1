"""Orthonormal subspace bases, SVD kernels and projector-based containment tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RANK_RTOL = 1e-9
CONTAIN_TOL = 1e-9


class SubspaceError(ValueError):
    pass


def rank_threshold(singular_values):
    """Scale-aware cutoff: 1e-9 times the largest singular value, floored at 1."""
    smax = float(singular_values[0]) if len(singular_values) else 0.0
    return RANK_RTOL * max(smax, 1.0)


def numerical_rank(mat):
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(s > rank_threshold(s)))


def _gram_or_eye(gram, m):
    if gram is None:
        return np.eye(m)
    return np.asarray(gram, dtype=float)


def canonical_basis(vectors, gram=None):
    """Orthonormalize the span of ``vectors`` (columns) against ``gram``.

    The result is deterministic and aligned with coordinate axes where
    possible: pivoted Gram-Schmidt on the projections of the standard
    basis vectors, largest residual first.  A subspace spanned by
    coordinate axes comes back as exactly those axes with positive sign.
    """
    vectors = np.asarray(vectors, dtype=float)
    m = vectors.shape[0]
    G = _gram_or_eye(gram, m)
    if vectors.shape[1] == 0:
        return np.zeros((m, 0))
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    r = int(np.sum(s > rank_threshold(s)))
    if r == 0:
        return np.zeros((m, 0))
    V = u[:, :r]
    # G-orthogonal projector onto span(V)
    P = V @ np.linalg.solve(V.T @ G @ V, V.T @ G)
    candidates = P.copy()
    chosen = []
    for _ in range(r):
        norms = np.sqrt(np.maximum(np.einsum("ij,ik,kj->j", candidates, G, candidates), 0.0))
        j = int(np.argmax(norms))
        v = candidates[:, j] / norms[j]
        chosen.append(v)
        candidates = candidates - np.outer(v, v @ G @ candidates)
    basis = np.column_stack(chosen)
    # one re-orthonormalization pass against round-off
    L = np.linalg.cholesky(basis.T @ G @ basis)
    return np.linalg.solve(L, basis.T).T


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of R^m stored as a basis orthonormal for ``gram``."""

    columns: np.ndarray
    gram: np.ndarray | None = None

    @classmethod
    def span(cls, vectors, gram=None, ambient=None):
        vectors = np.asarray(vectors, dtype=float)
        if vectors.ndim == 1:
            vectors = vectors.reshape(-1, 1)
        if vectors.size == 0 and ambient is not None:
            vectors = np.zeros((ambient, 0))
        return cls(canonical_basis(vectors, gram), None if gram is None else np.asarray(gram, float))

    @classmethod
    def zero(cls, m, gram=None):
        return cls(np.zeros((m, 0)), gram)

    @classmethod
    def full(cls, m, gram=None):
        return cls.span(np.eye(m), gram)

    @property
    def ambient(self):
        return self.columns.shape[0]

    @property
    def dim(self):
        return self.columns.shape[1]

    @property
    def G(self):
        return _gram_or_eye(self.gram, self.ambient)

    def coords(self, v):
        """Coordinates of ``v`` (assumed in the subspace) in the orthonormal basis."""
        return self.columns.T @ self.G @ np.asarray(v, dtype=float)

    def projector(self):
        return self.columns @ self.columns.T @ self.G

    def project(self, v):
        return self.projector() @ np.asarray(v, dtype=float)

    def residual(self, vectors):
        """Norm of the part of ``vectors`` lying outside this subspace."""
        vectors = np.asarray(vectors, dtype=float)
        if vectors.ndim == 1:
            vectors = vectors.reshape(-1, 1)
        if vectors.size == 0:
            return 0.0
        return float(np.linalg.norm(vectors - self.projector() @ vectors))

    def contains(self, other, tol=CONTAIN_TOL):
        cols = other.columns if isinstance(other, Subspace) else other
        return self.residual(cols) < tol

    def equals(self, other, tol=CONTAIN_TOL):
        return self.dim == other.dim and self.contains(other, tol) and other.contains(self, tol)

    def orthonormality_residual(self):
        return float(np.max(np.abs(self.columns.T @ self.G @ self.columns - np.eye(self.dim)), initial=0.0))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient})"


def kernel(mat, gram=None, ncols=None):
    """Null space of ``mat`` via SVD, returned orthonormal for ``gram``."""
    mat = np.asarray(mat, dtype=float)
    if mat.ndim == 1:
        mat = mat.reshape(1, -1)
    n = mat.shape[1] if ncols is None else ncols
    if mat.size == 0:
        return Subspace.full(n, gram)
    _, s, vt = np.linalg.svd(mat)
    r = int(np.sum(s > rank_threshold(s)))
    null = vt[r:].T
    return Subspace.span(null, gram, ambient=n)


def smallest_retained_singular_value(mat):
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.size == 0:
        return float("inf")
    s = np.linalg.svd(mat, compute_uv=False)
    kept = s[s > rank_threshold(s)]
    return float(kept[-1]) if len(kept) else 0.0


def orthogonal_complement(S, inside=None, gram=None, tol=CONTAIN_TOL):
    """Complement of ``S`` within ``inside``, orthogonal for ``gram``."""
    gram = S.gram if gram is None else gram
    m = S.ambient
    if inside is None:
        inside = Subspace.full(m, gram)
    if not inside.contains(S, tol):
        raise SubspaceError("subspace is not contained in the enclosing subspace")
    G = _gram_or_eye(gram, m)
    if inside.dim == 0:
        return Subspace.zero(m, gram)
    coeffs = kernel(S.columns.T @ G @ inside.columns, ncols=inside.dim)
    return Subspace.span(inside.columns @ coeffs.columns, gram, ambient=m)


def intersection(S, T):
    if S.dim == 0 or T.dim == 0:
        return Subspace.zero(S.ambient, S.gram)
    null = kernel(np.hstack([S.columns, -T.columns]))
    return Subspace.span(S.columns @ null.columns[: S.dim], S.gram, ambient=S.ambient)


def direct_sum(*parts, gram=None):
    cols = np.hstack([p.columns for p in parts])
    if gram is None:
        gram = parts[0].gram
    return Subspace.span(cols, gram, ambient=parts[0].ambient)
