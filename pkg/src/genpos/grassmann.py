"""Dimension formulas and feasibility tests for incidence strata of
Grassmannians and affine-plane spaces, with an independent numerical
local-dimension oracle.

Conventions: ``m`` is the ambient dimension, ``d`` the moving-plane
dimension, ``n`` a fixed flag dimension and ``r`` the target dimension
of the intersection.  Exact linear strata have closed-form dimensions;
for affine strata the module returns the corresponding upper bounds
(labelled as bounds), obtained through the homogenization index shift
(m, d, n, r) -> (m+1, d+1, n+1, r+1).

The oracle measures the local dimension of
``{V^d : dim(V^d /\\ V^n) >= r}`` at a constructed witness: nearby
d-planes are written as graphs of maps V^d -> (V^d)^perp, giving
(m-d)d chart parameters, the rank-deficiency constraint is expressed by
the (d+n-r+1)-minors of the combined basis matrix, and the dimension is
(m-d)d minus the rank of the Jacobian of those minors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (IndeterminateRankError, InfeasibleStratumError,
                     PreconditionError)
from .subspace import LinSubspace, intersect_linear, orthogonal_complement
from .tolerance import DEFAULT_TOLERANCE, Tolerance

#: sentinel returned for provably empty strata
EMPTY = None


@dataclass(frozen=True)
class StratumSpec:
    """Ambient/plane dimensions and incidence targets for one stratum."""

    m: int
    d: int
    constraints: tuple[tuple[int, int], ...]  # (n_i, r_i) pairs
    mode: str = "exact"       # "exact" | "at_least"
    space: str = "linear"     # "linear" | "affine"

    def __post_init__(self):
        if self.mode not in ("exact", "at_least"):
            raise PreconditionError("mode must be 'exact' or 'at_least'")
        if self.space not in ("linear", "affine"):
            raise PreconditionError("space must be 'linear' or 'affine'")
        lo = 1 if self.space == "linear" else 0
        if not lo <= self.d <= self.m:
            raise PreconditionError(f"need {lo} <= d <= m")
        for n_i, r_i in self.constraints:
            if n_i > self.m:
                raise PreconditionError("flag dimension exceeds ambient dimension")
            floor = 0 if self.space == "linear" else -1
            if self.mode == "exact" and r_i < floor:
                raise PreconditionError(f"exact mode requires r >= {floor}")


def grassmannian_dim(m: int, d: int) -> int:
    """Dimension of the space of d-dim linear subspaces of R^m."""
    return (m - d) * d


def affine_grassmannian_dim(m: int, d: int) -> int:
    """Dimension of the space of affine d-planes in R^m."""
    return (m - d) * (d + 1)


def feasible_single(m: int, d: int, n: int, r: int) -> bool:
    """Whether 0 <= r <= d <= n + d - r <= m holds."""
    return 0 <= r <= d <= n + d - r <= m


def single_flag_dim(m: int, d: int, n: int, r: int) -> int:
    """Dimension of the exact single-flag stratum: (n-r)r + (m-d)(d-r)."""
    if not feasible_single(m, d, n, r):
        raise InfeasibleStratumError(
            f"(m,d,n,r)=({m},{d},{n},{r}) violates 0 <= r <= d <= n+d-r <= m")
    return (n - r) * r + (m - d) * (d - r)


def single_flag_dim_geq(m: int, d: int, n: int, r: int) -> int:
    """Dimension of the stratum with intersection dimension >= r.

    Evaluated by maximizing the exact dimensions over all feasible
    r' >= r, exercising the stratification recursion; the result equals
    the closed form of the exact stratum at r.
    """
    if not feasible_single(m, d, n, r):
        raise InfeasibleStratumError(
            f"(m,d,n,r)=({m},{d},{n},{r}) violates 0 <= r <= d <= n+d-r <= m")
    dims = [single_flag_dim(m, d, n, rp)
            for rp in range(r, min(d, n) + 1)
            if feasible_single(m, d, n, rp)]
    return max(dims)


def affine_single_flag_bound(m: int, d: int, n: int, r: int) -> int:
    """Upper bound for affine d-planes meeting a fixed n-plane in dim >= r."""
    if not -1 <= r <= d <= n + d - r <= m:
        raise InfeasibleStratumError(
            f"(m,d,n,r)=({m},{d},{n},{r}) violates -1 <= r <= d <= n+d-r <= m")
    return (n - r) * (r + 1) + (m - d) * (d - r)


def two_flag_dim(m: int, n1: int, r1: int, n2: int, r2: int) -> int:
    """Dimension of (r1+r2)-planes meeting two independent flags exactly.

    Equals the product dimension (n1-r1)r1 + (n2-r2)r2; the same value
    holds with ">=" constraints.
    """
    if not (0 <= r1 <= n1 and 0 <= r2 <= n2 and n1 + n2 <= m):
        raise InfeasibleStratumError(
            f"need 0 <= r_i <= n_i and n1+n2 <= m, got ({m},{n1},{r1},{n2},{r2})")
    return (n1 - r1) * r1 + (n2 - r2) * r2


def affine_two_flag_bound(m: int, n1: int, r1: int, n2: int, r2: int) -> int:
    """Upper bound for (r1+r2+1)-planes meeting two skew planes in dims >= r_i."""
    if not (0 <= r1 <= n1 and 0 <= r2 <= n2 and m >= n1 + n2 + 1):
        raise InfeasibleStratumError(
            f"need 0 <= r_i <= n_i and m >= n1+n2+1, got ({m},{n1},{r1},{n2},{r2})")
    return (n1 - r1) * (r1 + 1) + (n2 - r2) * (r2 + 1)


def three_flag_dim(m: int, n1: int, n2: int, n3: int, r: int) -> int | None:
    """Dimension of 2r-planes meeting three spanning flags in dims >= r.

    Returns ``EMPTY`` (None) when r exceeds n1+n2+n3-m, in which case
    the stratum is empty.  The configuration hypotheses (pairwise-zero
    intersections, flags spanning the whole space) are on the caller.
    """
    if r < 0:
        raise PreconditionError("r must be nonnegative")
    if r == 0:
        return 0
    excess = n1 + n2 + n3 - m
    if r > excess:
        return EMPTY
    return (excess - r) * r


def affine_three_flag_bound(m: int, n1: int, n2: int, n3: int, r: int) -> int:
    """Upper bound for (2r+1)-planes meeting three jointly spanning,
    pairwise skew planes in dims >= r."""
    if r < 0:
        raise PreconditionError("r must be nonnegative")
    if m > n1 + n2 + n3 + 1 - r:
        raise InfeasibleStratumError(
            f"need m <= n1+n2+n3+1-r, got ({m},{n1},{n2},{n3},{r})")
    return (n1 + n2 + n3 + 1 - m - r) * (r + 1)


def stratum_witness(m: int, d: int, n: int, r: int,
                    seed: int) -> tuple[LinSubspace, LinSubspace]:
    """A pair (V^d, V^n) with dim(V^d /\\ V^n) = r exactly by construction.

    The two subspaces share r columns of a random orthogonal matrix and
    take their remaining directions from disjoint column blocks.
    """
    if not feasible_single(m, d, n, r):
        raise InfeasibleStratumError(
            f"(m,d,n,r)=({m},{d},{n},{r}) violates 0 <= r <= d <= n+d-r <= m")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((m, m))
    q, rmat = np.linalg.qr(g)
    q = q * np.sign(np.diag(rmat))
    vd = LinSubspace(m, q[:, :d])
    vn = LinSubspace(m, np.concatenate([q[:, :r], q[:, d:d + (n - r)]], axis=1))
    return vd, vn


def _minor_jacobian(m0: np.ndarray, b_perp: np.ndarray, d: int, k: int) -> np.ndarray:
    """Jacobian of all k-minors of [B_d + B_perp L | B_n] at L = 0.

    Each minor is affine in every single entry L_ij, so the derivative
    with respect to L_ij is the determinant of the minor submatrix with
    the column of global index j replaced by the restriction of
    B_perp[:, i]; this is exact up to machine rounding.
    """
    m = m0.shape[0]
    n_cols = m0.shape[1]
    n_perp = b_perp.shape[1]
    rowsets = list(itertools.combinations(range(m), k))
    colsets = list(itertools.combinations(range(n_cols), k))
    jac = np.zeros((len(rowsets) * len(colsets), n_perp * d))
    mats = []
    slots = []
    minor_index = 0
    for rows in rowsets:
        ridx = np.array(rows)
        for cols in colsets:
            cidx = np.array(cols)
            base = m0[np.ix_(ridx, cidx)]
            for j_local, j_global in enumerate(cidx):
                if j_global >= d:
                    continue
                for i in range(n_perp):
                    s = base.copy()
                    s[:, j_local] = b_perp[ridx, i]
                    mats.append(s)
                    slots.append((minor_index, i * d + j_global))
            minor_index += 1
    if mats:
        dets = np.linalg.det(np.stack(mats))
        for (row, col), val in zip(slots, dets):
            jac[row, col] = val
    return jac


def stratum_dim_oracle(m: int, d: int, n: int, r: int,
                       witness: tuple[LinSubspace, LinSubspace],
                       tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    """Measured local dimension of {V^d : dim(V^d /\\ V^n) >= r} at the witness.

    Independent of the closed-form formulas: the constraint is encoded
    by minors of the combined basis matrix in the graph chart around the
    witness and the dimension read off the Jacobian rank.
    """
    vd, vn = witness
    if vd.ambient_dim != m or vd.dim != d or vn.dim != n:
        raise PreconditionError("witness does not match (m, d, n)")
    if intersect_linear(vd, vn, tol).dim != r:
        raise PreconditionError("witness does not lie in the stratum")
    n_params = (m - d) * d
    k = d + n - r + 1
    if k > min(m, d + n) or n_params == 0:
        # the rank constraint is vacuous (or the chart is a point)
        return n_params
    b_perp = orthogonal_complement(vd).basis
    m0 = np.concatenate([vd.basis, vn.basis], axis=1)
    jac = _minor_jacobian(m0, b_perp, d, k)
    s = np.linalg.svd(jac, compute_uv=False)
    if s.size == 0 or s[0] <= tol.abs_floor:
        return n_params
    cut = tol.rank_cut(float(s[0]))
    rank = int(np.sum(s > cut))
    if 0 < rank < s.size:
        kept, dropped = float(s[rank - 1]), float(s[rank])
        if dropped > 0 and kept / dropped < 1e2:
            raise IndeterminateRankError(
                f"Jacobian rank unstable: sigma_{rank}={kept:.3e}, "
                f"sigma_{rank + 1}={dropped:.3e}")
    return n_params - rank


def feasible_singles(max_m: int):
    """All feasible (m, d, n, r) with 1 <= m <= max_m, ordered lexicographically."""
    for m in range(1, max_m + 1):
        for d in range(1, m + 1):
            for n in range(0, m + 1):
                for r in range(0, min(d, n) + 1):
                    if feasible_single(m, d, n, r):
                        yield m, d, n, r
