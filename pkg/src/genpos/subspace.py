"""Numerically robust linear and affine subspace arithmetic.

Linear subspaces are held as orthonormal bases (m x k column matrices),
affine flats as a canonical base point (the point nearest the origin)
plus a direction subspace.  All dimension decisions go through one
SVD-based tolerance policy so that the modular law

    dim(U + V) + dim(U /\ V) = dim U + dim V

holds as an exact integer identity of decided ranks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (AmbientMismatchError, EmptyFlatError, NotContainedError,
                     NotDisjointError, NotSkewError, PreconditionError)
from .tolerance import DEFAULT_TOLERANCE, Tolerance, decided_rank

_ORTHO_CHECK = 1e-8


def _as_matrix(vectors, ambient_dim=None) -> np.ndarray:
    """Stack vectors as columns of an (m, k) float array."""
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        cols = np.array(vectors, dtype=float)
    else:
        vecs = [np.asarray(v, dtype=float).reshape(-1) for v in vectors]
        if not vecs:
            if ambient_dim is None:
                raise PreconditionError("cannot infer ambient dimension from empty input")
            return np.zeros((ambient_dim, 0))
        m = vecs[0].shape[0]
        for v in vecs:
            if v.shape[0] != m:
                raise AmbientMismatchError("vectors have mismatched ambient dimensions")
        cols = np.column_stack(vecs)
    if ambient_dim is not None and cols.shape[0] != ambient_dim:
        raise AmbientMismatchError(
            f"expected ambient dimension {ambient_dim}, got {cols.shape[0]}")
    if not np.all(np.isfinite(cols)):
        raise PreconditionError("non-finite coordinates")
    return cols


@dataclass(frozen=True)
class LinSubspace:
    """A linear subspace of R^m held as an orthonormal basis.

    ``basis`` has shape (ambient_dim, dim); an empty basis is the zero
    subspace.  Values are immutable after construction.
    """

    ambient_dim: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise PreconditionError("ambient dimension must be >= 1")
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2 or b.shape[0] != self.ambient_dim:
            raise PreconditionError("basis must be an (ambient_dim, dim) matrix")
        if b.shape[1] > self.ambient_dim:
            raise PreconditionError("more basis vectors than the ambient dimension")
        if b.shape[1]:
            gram = b.T @ b
            if np.max(np.abs(gram - np.eye(b.shape[1]))) > _ORTHO_CHECK:
                raise PreconditionError("basis is not orthonormal")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, ambient_dim: int) -> "LinSubspace":
        return cls(ambient_dim, np.zeros((ambient_dim, 0)))

    @classmethod
    def full(cls, ambient_dim: int) -> "LinSubspace":
        return cls(ambient_dim, np.eye(ambient_dim))

    def project(self, x: np.ndarray) -> np.ndarray:
        """Orthogonal projection of x onto the subspace."""
        x = np.asarray(x, dtype=float)
        if self.dim == 0:
            return np.zeros_like(x)
        return self.basis @ (self.basis.T @ x)

    def contains_vector(self, x, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        x = np.asarray(x, dtype=float)
        scale = max(1.0, float(np.linalg.norm(x)))
        return float(np.linalg.norm(x - self.project(x))) <= tol.residual_cut(scale)


def span_of(vectors, tol: Tolerance = DEFAULT_TOLERANCE, *,
            ambient_dim: int | None = None) -> LinSubspace:
    """Orthonormalized span of the given m-vectors.

    Numerical rank is decided by singular values against ``tol``.
    """
    a = _as_matrix(vectors, ambient_dim)
    m = a.shape[0]
    if m < 1:
        raise PreconditionError("ambient dimension must be >= 1")
    if a.shape[1] == 0:
        return LinSubspace.zero(m)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    r = decided_rank(s, tol)
    return LinSubspace(m, u[:, :r])


def _check_same_ambient(u: LinSubspace, v: LinSubspace):
    if u.ambient_dim != v.ambient_dim:
        raise AmbientMismatchError(
            f"ambient dimensions differ: {u.ambient_dim} vs {v.ambient_dim}")


def subspace_sum(u: LinSubspace, v: LinSubspace,
                 tol: Tolerance = DEFAULT_TOLERANCE) -> LinSubspace:
    """U + V, the span of the union of the two bases."""
    _check_same_ambient(u, v)
    return span_of(np.concatenate([u.basis, v.basis], axis=1), tol,
                   ambient_dim=u.ambient_dim)


def intersect_linear(u: LinSubspace, v: LinSubspace,
                     tol: Tolerance = DEFAULT_TOLERANCE) -> LinSubspace:
    """U /\\ V with dim decided through the modular identity with the sum.

    The intersection dimension is fixed as dim U + dim V - dim(U+V), and
    the basis is recovered from the corresponding near-null right
    singular vectors of [B_u | -B_v], so the modular law holds exactly.
    """
    _check_same_ambient(u, v)
    s_dim = subspace_sum(u, v, tol).dim
    r = u.dim + v.dim - s_dim
    if r <= 0:
        return LinSubspace.zero(u.ambient_dim)
    stacked = np.concatenate([u.basis, -v.basis], axis=1)
    _, _, vt = np.linalg.svd(stacked)
    coeffs = vt[-r:, :u.dim]  # coefficients of the U-side, one row per vector
    w = u.basis @ coeffs.T
    uu, _, _ = np.linalg.svd(w, full_matrices=False)
    return LinSubspace(u.ambient_dim, uu[:, :r])


def orthogonal_complement(u: LinSubspace) -> LinSubspace:
    """The orthogonal complement; dim result = m - dim U."""
    m, k = u.ambient_dim, u.dim
    if k == 0:
        return LinSubspace.full(m)
    full_u, _, _ = np.linalg.svd(u.basis, full_matrices=True)
    return LinSubspace(m, full_u[:, k:])


def principal_angles(u: LinSubspace, v: LinSubspace) -> np.ndarray:
    """Principal angles (radians, ascending) between two subspaces."""
    _check_same_ambient(u, v)
    if min(u.dim, v.dim) == 0:
        return np.zeros(0)
    cosines = np.linalg.svd(u.basis.T @ v.basis, compute_uv=False)
    return np.arccos(np.clip(cosines, -1.0, 1.0))


def max_principal_angle(u: LinSubspace, v: LinSubspace) -> float:
    """Largest principal angle between equal-dimension subspaces.

    Computed from sines (singular values of the projection of one basis
    onto the other's complement), which stays accurate for tiny angles
    where the cosine formulation loses resolution.  Subspaces of unequal
    dimension report pi/2; two zero subspaces report 0.
    """
    _check_same_ambient(u, v)
    if u.dim != v.dim:
        return float(np.pi / 2)
    if u.dim == 0:
        return 0.0
    resid = v.basis - u.basis @ (u.basis.T @ v.basis)
    sines = np.linalg.svd(resid, compute_uv=False)
    return float(np.arcsin(np.clip(sines[0], -1.0, 1.0)))


_EMPTY_MARKER = object()


@dataclass(frozen=True)
class AffineFlat:
    """An affine d-plane in R^m: canonical base point + direction subspace.

    The base point is the point of the flat nearest the origin, so it is
    orthogonal to the direction.  The empty flat is a distinguished
    value with dim = -1 (see :meth:`empty`).
    """

    base: np.ndarray = field(repr=False)
    direction: LinSubspace
    _empty: bool = False

    def __post_init__(self):
        b = np.asarray(self.base, dtype=float).reshape(-1)
        if b.shape[0] != self.direction.ambient_dim:
            raise AmbientMismatchError("base point dimension differs from direction ambient")
        if not self._empty:
            if not np.all(np.isfinite(b)):
                raise PreconditionError("non-finite base point")
            # canonicalize: base orthogonal to direction
            b = b - self.direction.project(b)
        b.setflags(write=False)
        object.__setattr__(self, "base", b)

    @property
    def ambient_dim(self) -> int:
        return self.direction.ambient_dim

    @property
    def dim(self) -> int:
        return -1 if self._empty else self.direction.dim

    @property
    def is_empty(self) -> bool:
        return self._empty

    @classmethod
    def empty(cls, ambient_dim: int) -> "AffineFlat":
        return cls(np.zeros(ambient_dim), LinSubspace.zero(ambient_dim), _empty=True)

    @classmethod
    def from_point(cls, point) -> "AffineFlat":
        point = np.asarray(point, dtype=float).reshape(-1)
        return cls(point, LinSubspace.zero(point.shape[0]))

    def contains_point(self, x, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        if self._empty:
            return False
        x = np.asarray(x, dtype=float)
        resid = x - self.base - self.direction.project(x - self.base)
        scale = max(1.0, float(np.linalg.norm(x)), float(np.linalg.norm(self.base)))
        return float(np.linalg.norm(resid)) <= tol.residual_cut(scale)

    def sample_points(self) -> np.ndarray:
        """Base point plus base + v for each direction basis vector (rows)."""
        if self._empty:
            raise EmptyFlatError("empty flat has no points")
        pts = [self.base]
        for j in range(self.direction.dim):
            pts.append(self.base + self.direction.basis[:, j])
        return np.array(pts)


def affine_hull(points, tol: Tolerance = DEFAULT_TOLERANCE) -> AffineFlat:
    """Smallest affine flat containing the given points."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise PreconditionError("affine_hull needs a nonempty list of points")
    if not np.all(np.isfinite(pts)):
        raise PreconditionError("non-finite coordinates")
    centroid = pts.mean(axis=0)
    direction = span_of((pts - centroid).T, tol, ambient_dim=pts.shape[1])
    return AffineFlat(centroid, direction)


def _check_flats(p: AffineFlat, q: AffineFlat):
    if p.ambient_dim != q.ambient_dim:
        raise AmbientMismatchError("flats have different ambient dimensions")
    if p.is_empty or q.is_empty:
        raise EmptyFlatError("operation requires nonempty flats")


def flat_distance(p: AffineFlat, q: AffineFlat) -> float:
    """Euclidean distance between two nonempty flats."""
    _check_flats(p, q)
    stacked = np.concatenate([p.direction.basis, -q.direction.basis], axis=1)
    rhs = q.base - p.base
    if stacked.shape[1] == 0:
        return float(np.linalg.norm(rhs))
    sol, *_ = np.linalg.lstsq(stacked, rhs, rcond=None)
    return float(np.linalg.norm(stacked @ sol - rhs))


def intersect_affine(p: AffineFlat, q: AffineFlat,
                     tol: Tolerance = DEFAULT_TOLERANCE) -> AffineFlat:
    """Intersection flat, or the empty flat (dim -1) when disjoint."""
    _check_flats(p, q)
    stacked = np.concatenate([p.direction.basis, -q.direction.basis], axis=1)
    rhs = q.base - p.base
    if stacked.shape[1] == 0:
        sol = np.zeros(0)
        residual = float(np.linalg.norm(rhs))
    else:
        sol, *_ = np.linalg.lstsq(stacked, rhs, rcond=None)
        residual = float(np.linalg.norm(stacked @ sol - rhs))
    scale = max(1.0, float(np.linalg.norm(p.base)), float(np.linalg.norm(q.base)))
    if residual > tol.residual_cut(scale):
        return AffineFlat.empty(p.ambient_dim)
    point = p.base + p.direction.basis @ sol[:p.direction.dim]
    direction = intersect_linear(p.direction, q.direction, tol)
    return AffineFlat(point, direction)


def homogenize(p: AffineFlat) -> LinSubspace:
    """The (d+1)-dim subspace of R^{m+1} corresponding to a nonempty d-flat.

    Spanned by {(v, 0) : v in direction} plus (base, 1) normalized;
    orthonormal by construction because base is orthogonal to direction.
    """
    if p.is_empty:
        raise EmptyFlatError("cannot homogenize the empty flat")
    m = p.ambient_dim
    cols = np.zeros((m + 1, p.dim + 1))
    cols[:m, :p.dim] = p.direction.basis
    last = np.append(p.base, 1.0)
    cols[:, p.dim] = last / np.linalg.norm(last)
    return LinSubspace(m + 1, cols)


def dehomogenize(w: LinSubspace, tol: Tolerance = DEFAULT_TOLERANCE) -> AffineFlat | None:
    """Affine flat in R^m corresponding to a subspace of R^{m+1}.

    Returns None when the subspace lies in the hyperplane at infinity
    (no vector with nonzero last coordinate).
    """
    m = w.ambient_dim - 1
    if w.dim == 0:
        return None
    last_row = w.basis[m, :]
    norm_last = float(np.linalg.norm(last_row))
    if norm_last <= tol.residual_cut():
        return None
    point_coeff = last_row / (norm_last ** 2)
    point = (w.basis @ point_coeff)[:m]
    # direction: vectors of W with vanishing last coordinate
    _, _, vt = np.linalg.svd(last_row.reshape(1, -1), full_matrices=True)
    null_coeffs = vt[1:, :]  # (dim-1) x dim
    direction = span_of((w.basis @ null_coeffs.T)[:m, :], tol, ambient_dim=m)
    return AffineFlat(point, direction)


def pairwise_skew(p: AffineFlat, q: AffineFlat,
                  tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """True iff the flats neither meet nor share a direction."""
    _check_flats(p, q)
    if not intersect_affine(p, q, tol).is_empty:
        return False
    return intersect_linear(p.direction, q.direction, tol).dim == 0


def jointly_skew(flats, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """True iff the affine hull of the union attains n_1+...+n_k+k-1."""
    flats = list(flats)
    if len(flats) < 2:
        raise PreconditionError("jointly_skew needs at least two flats")
    m = flats[0].ambient_dim
    for f in flats:
        if f.is_empty:
            raise EmptyFlatError("jointly_skew requires nonempty flats")
        if f.ambient_dim != m:
            raise AmbientMismatchError("flats have different ambient dimensions")
    points = np.concatenate([f.sample_points() for f in flats], axis=0)
    target = sum(f.dim for f in flats) + len(flats) - 1
    return affine_hull(points, tol).dim == target


def bridge_subspace(vr: LinSubspace, v1: LinSubspace, v2: LinSubspace,
                    tol: Tolerance = DEFAULT_TOLERANCE) -> LinSubspace:
    """The unique 2r-dim subspace W = (Vr+V1) /\\ (Vr+V2) with
    dim(W /\\ V1) = dim(W /\\ V2) = r and Vr inside W.

    Requires pairwise trivial intersections and Vr inside V1 + V2.
    """
    _check_same_ambient(vr, v1)
    _check_same_ambient(vr, v2)
    for a, b, names in ((vr, v1, "Vr,V1"), (vr, v2, "Vr,V2"), (v1, v2, "V1,V2")):
        if intersect_linear(a, b, tol).dim != 0:
            raise NotDisjointError(f"subspaces {names} have nonzero intersection")
    v12 = subspace_sum(v1, v2, tol)
    if subspace_sum(v12, vr, tol).dim != v12.dim:
        raise NotContainedError("Vr is not contained in V1 + V2")
    w1 = subspace_sum(vr, v1, tol)
    w2 = subspace_sum(vr, v2, tol)
    return intersect_linear(w1, w2, tol)


def bridge_flat(pr: AffineFlat, p1: AffineFlat, p2: AffineFlat,
                tol: Tolerance = DEFAULT_TOLERANCE) -> AffineFlat | None:
    """The unique (2r+1)-flat through Pr meeting P1 and P2 in dim >= r,
    or None when no such flat exists.

    Computed by homogenizing all three flats and applying
    :func:`bridge_subspace` in R^{m+1}.  Inputs must be pairwise skew.
    """
    for a, b, names in ((pr, p1, "Pr,P1"), (pr, p2, "Pr,P2"), (p1, p2, "P1,P2")):
        if not pairwise_skew(a, b, tol):
            raise NotSkewError(f"flats {names} are not skew")
    r = pr.dim
    try:
        w = bridge_subspace(homogenize(pr), homogenize(p1), homogenize(p2), tol)
    except NotContainedError:
        return None
    flat = dehomogenize(w, tol)
    if flat is None or flat.dim != 2 * r + 1:
        return None
    # the homogeneous intersection may sit at infinity; require real meets
    for other in (p1, p2):
        if intersect_affine(flat, other, tol).dim < r:
            return None
    return flat
