"""Doubly ruled quadrics through three pairwise-skew lines in R^3,
ruling extraction, and common transversals to four segments.

A quadric surface is held as a symmetric 4x4 homogeneous coefficient
matrix Q with Frobenius norm 1 and a sign canon (the first coefficient
of largest magnitude is positive).  The 10 scalar coefficients are kept
in the monomial order x^2, y^2, z^2, xy, xz, yz, x, y, z, 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (DegeneratePointError, DegenerateSystemError,
                     InfiniteFamilyError, NotSkewError, PreconditionError)
from .tolerance import DEFAULT_TOLERANCE, Tolerance

#: documented monomial order of the 10 quadric coefficients
COEFF_MONOMIALS = ("x^2", "y^2", "z^2", "xy", "xz", "yz", "x", "y", "z", "1")


def _canonical_direction(d: np.ndarray) -> np.ndarray:
    d = d / np.linalg.norm(d)
    lead = int(np.argmax(np.abs(d)))
    return -d if d[lead] < 0 else d


@dataclass(frozen=True)
class Line3:
    """A line in R^3: canonical foot point (nearest the origin) and unit
    direction with a fixed sign canon, plus the derived Pluecker vector."""

    point: np.ndarray = field(repr=False)
    direction: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.point, dtype=float).reshape(3)
        d = np.asarray(self.direction, dtype=float).reshape(3)
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(d))):
            raise PreconditionError("non-finite line data")
        norm = np.linalg.norm(d)
        if norm <= 0:
            raise PreconditionError("line direction must be nonzero")
        d = _canonical_direction(d)
        p = p - np.dot(p, d) * d
        p.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "point", p)
        object.__setattr__(self, "direction", d)

    @classmethod
    def through_points(cls, a, b) -> "Line3":
        a = np.asarray(a, dtype=float).reshape(3)
        b = np.asarray(b, dtype=float).reshape(3)
        return cls(a, b - a)

    @property
    def pluecker(self) -> np.ndarray:
        """(direction, point x direction); the two halves are orthogonal."""
        return np.concatenate([self.direction, np.cross(self.point, self.direction)])

    def at(self, t: float) -> np.ndarray:
        return self.point + t * self.direction

    def distance_to_point(self, x) -> float:
        x = np.asarray(x, dtype=float).reshape(3)
        return float(np.linalg.norm(np.cross(x - self.point, self.direction)))

    def same_line(self, other: "Line3", tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        scale = max(1.0, float(np.linalg.norm(self.point)))
        return (abs(abs(float(np.dot(self.direction, other.direction))) - 1.0)
                <= tol.residual_cut()
                and float(np.linalg.norm(self.point - other.point))
                <= tol.residual_cut(scale))


@dataclass(frozen=True)
class Segment3:
    """A closed segment [a, b] in R^3 with positive length."""

    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).reshape(3)
        b = np.asarray(self.b, dtype=float).reshape(3)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise PreconditionError("non-finite segment endpoints")
        if np.linalg.norm(b - a) <= 0:
            raise PreconditionError("segment endpoints must differ")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def carrier(self) -> Line3:
        return Line3.through_points(self.a, self.b)

    def parameter_of(self, x) -> float:
        """Barycentric coordinate of the projection of x onto the carrier."""
        x = np.asarray(x, dtype=float).reshape(3)
        ab = self.b - self.a
        return float(np.dot(x - self.a, ab) / np.dot(ab, ab))


@dataclass(frozen=True)
class Quadric3:
    """Symmetric 4x4 homogeneous coefficient matrix, canonically scaled."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        q = np.asarray(self.matrix, dtype=float).reshape(4, 4)
        if not np.all(np.isfinite(q)):
            raise PreconditionError("non-finite quadric matrix")
        if np.max(np.abs(q - q.T)) > 1e-8:
            raise PreconditionError("quadric matrix must be symmetric")
        q = 0.5 * (q + q.T)
        norm = np.linalg.norm(q)
        if norm <= 0:
            raise PreconditionError("quadric matrix must be nonzero")
        q = q / norm
        coeffs = _matrix_to_coeffs(q)
        lead = int(np.argmax(np.abs(coeffs)))
        if coeffs[lead] < 0:
            q = -q
        q.setflags(write=False)
        object.__setattr__(self, "matrix", q)

    @classmethod
    def from_coefficients(cls, coeffs) -> "Quadric3":
        return cls(_coeffs_to_matrix(np.asarray(coeffs, dtype=float).reshape(10)))

    @property
    def coefficients(self) -> np.ndarray:
        """The 10 coefficients in the order x^2,y^2,z^2,xy,xz,yz,x,y,z,1."""
        return _matrix_to_coeffs(self.matrix)

    @property
    def quad_form(self) -> np.ndarray:
        """Upper-left 3x3 block: the quadratic-form part."""
        return self.matrix[:3, :3]

    def value(self, p) -> float:
        """Value of the quadric polynomial at a 3-point."""
        ph = np.append(np.asarray(p, dtype=float).reshape(3), 1.0)
        return float(ph @ self.matrix @ ph)

    def gradient(self, p) -> np.ndarray:
        """Half-gradient A p + b of the quadric polynomial at p."""
        p = np.asarray(p, dtype=float).reshape(3)
        return self.matrix[:3, :3] @ p + self.matrix[:3, 3]

    def point_residual(self, p) -> float:
        """|Q(p)| normalized by the squared homogeneous point norm."""
        ph = np.append(np.asarray(p, dtype=float).reshape(3), 1.0)
        return abs(float(ph @ self.matrix @ ph)) / float(ph @ ph)

    def direction_residual(self, d) -> float:
        """|d^T A d| / |d|^2 (asymptotic-direction residual)."""
        d = np.asarray(d, dtype=float).reshape(3)
        return abs(float(d @ self.quad_form @ d)) / float(d @ d)


def _coeffs_to_matrix(c: np.ndarray) -> np.ndarray:
    q = np.empty((4, 4))
    q[0, 0], q[1, 1], q[2, 2], q[3, 3] = c[0], c[1], c[2], c[9]
    q[0, 1] = q[1, 0] = c[3] / 2.0
    q[0, 2] = q[2, 0] = c[4] / 2.0
    q[1, 2] = q[2, 1] = c[5] / 2.0
    q[0, 3] = q[3, 0] = c[6] / 2.0
    q[1, 3] = q[3, 1] = c[7] / 2.0
    q[2, 3] = q[3, 2] = c[8] / 2.0
    return q


def _matrix_to_coeffs(q: np.ndarray) -> np.ndarray:
    return np.array([q[0, 0], q[1, 1], q[2, 2],
                     2 * q[0, 1], 2 * q[0, 2], 2 * q[1, 2],
                     2 * q[0, 3], 2 * q[1, 3], 2 * q[2, 3], q[3, 3]])


def _monomial_row_point(p: np.ndarray) -> np.ndarray:
    x, y, z = p
    return np.array([x * x, y * y, z * z, x * y, x * z, y * z, x, y, z, 1.0])


def _monomial_row_direction(d: np.ndarray) -> np.ndarray:
    x, y, z = d
    return np.array([x * x, y * y, z * z, x * y, x * z, y * z, 0.0, 0.0, 0.0, 0.0])


def lines_skew(l1: Line3, l2: Line3, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """True iff the two lines neither intersect nor are parallel."""
    cross = np.cross(l1.direction, l2.direction)
    scale = max(1.0, float(np.linalg.norm(l1.point)), float(np.linalg.norm(l2.point)))
    if np.linalg.norm(cross) <= tol.residual_cut():
        return False  # parallel (or identical)
    gap = float(np.dot(l2.point - l1.point, cross / np.linalg.norm(cross)))
    return abs(gap) > tol.residual_cut(scale)


def line_meet(l1: Line3, l2: Line3,
              tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray | None:
    """Intersection point of two lines, or None (parallel, identical or skew)."""
    stacked = np.column_stack([l1.direction, -l2.direction])
    rhs = l2.point - l1.point
    sol, *_ = np.linalg.lstsq(stacked, rhs, rcond=None)
    residual = float(np.linalg.norm(stacked @ sol - rhs))
    scale = max(1.0, float(np.linalg.norm(l1.point)), float(np.linalg.norm(l2.point)))
    if residual > tol.residual_cut(scale):
        return None
    cross = np.cross(l1.direction, l2.direction)
    if np.linalg.norm(cross) <= tol.residual_cut():
        return None  # parallel or identical: no single intersection point
    return l1.at(float(sol[0]))


def quadric_through_three_skew_lines(points, tol: Tolerance = DEFAULT_TOLERANCE
                                     ) -> Quadric3:
    """The quadric through the three pairwise-skew lines spanned by six points.

    Points are consumed pairwise: lines through (p0,p1), (p2,p3), (p4,p5).
    The coefficient vector spans the one-dimensional nullspace of a 9x10
    linear system: six point-incidence rows plus three rows forcing each
    line direction to be asymptotic.  Raises when the lines are not
    pairwise skew or the nullspace is not one-dimensional.
    """
    pts = np.asarray(points, dtype=float).reshape(6, 3)
    if not np.all(np.isfinite(pts)):
        raise PreconditionError("non-finite coordinates")
    lines = [Line3.through_points(pts[2 * i], pts[2 * i + 1]) for i in range(3)]
    for i in range(3):
        for j in range(i + 1, 3):
            if not lines_skew(lines[i], lines[j], tol):
                raise NotSkewError(f"input lines {i} and {j} are not skew")
    rows = [_monomial_row_point(p) for p in pts]
    rows += [_monomial_row_direction(pts[2 * i + 1] - pts[2 * i]) for i in range(3)]
    system = np.array(rows)
    system /= np.linalg.norm(system, axis=1, keepdims=True)
    _, s, vt = np.linalg.svd(system)
    if s[-1] < tol.rank_cut(float(s[0])):
        raise DegenerateSystemError(
            "coefficient system has nullspace dimension > 1")
    quadric = Quadric3.from_coefficients(vt[-1])
    worst = max(max(quadric.point_residual(p) for p in pts),
                max(quadric.direction_residual(l.direction) for l in lines))
    if worst > tol.residual_cut(1e3):
        raise DegenerateSystemError(
            f"recovered quadric fails the incidence residual check ({worst:.3e})")
    return quadric


def quadric_residuals(q: Quadric3, points, directions) -> float:
    """Max normalized incidence/asymptotic residual over points and directions."""
    worst = 0.0
    for p in points:
        worst = max(worst, q.point_residual(p))
    for d in directions:
        worst = max(worst, q.direction_residual(d))
    return worst


ONE_SHEET_HYPERBOLOID = "one_sheet_hyperboloid"
HYPERBOLIC_PARABOLOID = "hyperbolic_paraboloid"
OTHER = "other"


def classify_quadric(q: Quadric3, tol: Tolerance = DEFAULT_TOLERANCE) -> str:
    """Classify by the eigen-signature of the quadratic form and det(Q).

    A full-rank indefinite quadratic form with det(Q) > 0 is a one-sheet
    hyperboloid; a rank-2 indefinite form with det(Q) > 0 is a
    hyperbolic paraboloid; everything else reports "other".
    """
    eigs = np.linalg.eigvalsh(q.quad_form)
    cut = tol.rank_cut(float(np.max(np.abs(eigs)))) if np.max(np.abs(eigs)) > 0 else 0.0
    pos = int(np.sum(eigs > cut))
    neg = int(np.sum(eigs < -cut))
    det = float(np.linalg.det(q.matrix))
    if det <= tol.residual_cut():
        return OTHER
    if pos + neg == 3 and {pos, neg} == {1, 2}:
        return ONE_SHEET_HYPERBOLOID
    if pos + neg == 2 and pos == 1:
        return HYPERBOLIC_PARABOLOID
    return OTHER


def rulings_through_point(q: Quadric3, p,
                          tol: Tolerance = DEFAULT_TOLERANCE) -> tuple[Line3, Line3]:
    """The two distinct lines through a surface point that lie on the surface.

    Their directions are the asymptotic directions inside the tangent
    plane at p, found as the null directions of the restricted binary
    quadratic form.
    """
    p = np.asarray(p, dtype=float).reshape(3)
    if q.point_residual(p) > tol.residual_cut(1e3):
        raise PreconditionError("point is not on the surface")
    grad = q.gradient(p)
    gnorm = np.linalg.norm(grad)
    if gnorm <= tol.residual_cut():
        raise DegeneratePointError("singular point: vanishing gradient")
    # orthonormal basis of the tangent directions (grad^perp)
    _, _, vt = np.linalg.svd(grad.reshape(1, 3), full_matrices=True)
    e1, e2 = vt[1], vt[2]
    a = float(e1 @ q.quad_form @ e1)
    b = float(e1 @ q.quad_form @ e2)
    c = float(e2 @ q.quad_form @ e2)
    form = np.array([[a, b], [b, c]])
    disc = b * b - a * c
    if disc <= tol.residual_cut(float(np.linalg.norm(form) ** 2)):
        raise DegeneratePointError("tangent quadratic has no two distinct real roots")
    lam, vecs = np.linalg.eigh(form)  # lam[0] < 0 < lam[1]
    d1 = np.sqrt(-lam[0]) * vecs[:, 1] + np.sqrt(lam[1]) * vecs[:, 0]
    d2 = np.sqrt(-lam[0]) * vecs[:, 1] - np.sqrt(lam[1]) * vecs[:, 0]
    lines = []
    for ab in (d1, d2):
        direction = ab[0] * e1 + ab[1] * e2
        line = Line3(p, direction)
        if not line_quadric_intersection(q, line, tol).contained:
            raise DegeneratePointError("computed ruling fails the on-surface check")
        lines.append(line)
    lines.sort(key=lambda l: tuple(l.direction))
    return lines[0], lines[1]


@dataclass(frozen=True)
class LineQuadricHit:
    """Result of substituting a line into a quadric: a univariate quadratic."""

    contained: bool
    params: tuple[float, ...]
    points: tuple[np.ndarray, ...]
    coefficients: tuple[float, float, float]  # (t^2, t, 1)
    discriminant: float


def line_quadric_intersection(q: Quadric3, line: Line3,
                              tol: Tolerance = DEFAULT_TOLERANCE) -> LineQuadricHit:
    """Intersection of a line with the surface.

    Returns ``contained`` when all three coefficients of the substituted
    quadratic vanish, otherwise the real roots (0, 1 or 2 points).
    """
    p, d = line.point, line.direction
    c2 = float(d @ q.quad_form @ d)
    c1 = 2.0 * float(d @ q.gradient(p))
    c0 = q.value(p)
    scale = (1.0 + float(np.linalg.norm(p))) ** 2
    cut = tol.residual_cut(scale)
    disc = c1 * c1 - 4.0 * c2 * c0
    if max(abs(c2), abs(c1), abs(c0)) <= cut:
        return LineQuadricHit(True, (), (), (c2, c1, c0), disc)
    if abs(c2) <= cut:
        if abs(c1) <= cut:
            return LineQuadricHit(False, (), (), (c2, c1, c0), disc)
        t = -c0 / c1
        return LineQuadricHit(False, (t,), (line.at(t),), (c2, c1, c0), disc)
    if disc < -cut * cut:
        return LineQuadricHit(False, (), (), (c2, c1, c0), disc)
    if disc <= cut * cut:
        t = -c1 / (2.0 * c2)
        return LineQuadricHit(False, (t,), (line.at(t),), (c2, c1, c0), disc)
    sq = np.sqrt(disc)
    qq = -(c1 + np.copysign(sq, c1)) / 2.0
    roots = sorted((qq / c2, c0 / qq))
    return LineQuadricHit(False, tuple(roots),
                          tuple(line.at(t) for t in roots), (c2, c1, c0), disc)


def same_family(q: Quadric3, l1: Line3, l2: Line3,
                tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Whether two lines on the surface belong to the same ruling family.

    Identical lines and skew lines share a family; lines intersecting in
    one point (or parallel distinct lines, which are coplanar) do not.
    """
    for line in (l1, l2):
        if not line_quadric_intersection(q, line, tol).contained:
            raise PreconditionError("line is not contained in the surface")
    if l1.same_line(l2, tol):
        return True
    if np.linalg.norm(np.cross(l1.direction, l2.direction)) <= tol.residual_cut():
        return False  # parallel distinct rulings are coplanar: opposite families
    return line_meet(l1, l2, tol) is None


@dataclass(frozen=True)
class Transversal:
    """A common transversal line with its per-segment intersection data."""

    line: Line3
    segment_points: tuple[np.ndarray, ...]
    segment_parameters: tuple[float, ...]


@dataclass(frozen=True)
class TransversalResult:
    """Transversal lines to four segments plus the supporting evidence."""

    transversals: tuple[Transversal, ...]
    quadric: Quadric3
    candidate_points: tuple[np.ndarray, ...]
    discriminant: float

    @property
    def count(self) -> int:
        return len(self.transversals)


def _segment_hit(line: Line3, seg: Segment3,
                 tol: Tolerance) -> tuple[np.ndarray, float] | None:
    point = line_meet(line, seg.carrier, tol)
    if point is None:
        return None
    t = seg.parameter_of(point)
    eps = max(tol.abs_floor, tol.rel_rank_threshold)
    if -eps <= t <= 1.0 + eps:
        return point, t
    return None


def transversals_to_four_segments(segments, tol: Tolerance = DEFAULT_TOLERANCE
                                  ) -> TransversalResult:
    """All lines meeting each of four segments; there are at most two.

    Builds the doubly ruled quadric through the carrier lines of the
    first three segments, intersects the fourth carrier with it (at most
    two points), takes through each intersection point the ruling that
    meets all three base lines, and keeps a candidate only if it meets
    every segment within its endpoints.
    """
    segs = list(segments)
    if len(segs) != 4:
        raise PreconditionError("exactly four segments are required")
    segs = [s if isinstance(s, Segment3) else Segment3(*s) for s in segs]
    base_pts = np.concatenate([[s.a, s.b] for s in segs[:3]])
    quadric = quadric_through_three_skew_lines(base_pts, tol)
    carriers = [s.carrier for s in segs]
    hit = line_quadric_intersection(quadric, carriers[3], tol)
    if hit.contained:
        raise InfiniteFamilyError(
            "fourth carrier line lies on the quadric; transversal family is infinite")
    found = []
    for x in hit.points:
        rulings = rulings_through_point(quadric, x, tol)
        meeting = [r for r in rulings
                   if all(line_meet(r, carriers[i], tol) is not None
                          or r.same_line(carriers[i], tol) for i in range(3))]
        if not meeting:
            continue
        candidate = meeting[0]
        hits = [_segment_hit(candidate, s, tol) for s in segs]
        if all(h is not None for h in hits):
            found.append(Transversal(candidate,
                                     tuple(h[0] for h in hits),
                                     tuple(h[1] for h in hits)))
    return TransversalResult(tuple(found), quadric, hit.points, hit.discriminant)


def sample_quadric_mesh(q: Quadric3, box_min, box_max, resolution: int = 48
                        ) -> tuple[np.ndarray, np.ndarray]:
    """Triangulated sample mesh of the surface inside an axis-aligned box.

    The surface is solved along the axis with the strongest quadratic
    coefficient over a grid on the remaining two axes; every emitted
    vertex satisfies the quadric equation to root-solving accuracy.
    Returns (vertices, triangles).
    """
    box_min = np.asarray(box_min, dtype=float).reshape(3)
    box_max = np.asarray(box_max, dtype=float).reshape(3)
    if np.any(box_max <= box_min):
        raise PreconditionError("box_max must exceed box_min componentwise")
    diag = np.abs(np.diag(q.quad_form))
    axis = int(np.argmax(diag))
    if diag[axis] <= 1e-14:
        axis = int(np.argmax(np.abs(2 * q.matrix[:3, 3])))
    u_ax, v_ax = [i for i in range(3) if i != axis]
    us = np.linspace(box_min[u_ax], box_max[u_ax], resolution + 1)
    vs = np.linspace(box_min[v_ax], box_max[v_ax], resolution + 1)
    verts: list[np.ndarray] = []
    # vertex index per (branch, iu, iv); -1 marks no solution in the box
    index = -np.ones((2, len(us), len(vs)), dtype=int)
    for iu, uu in enumerate(us):
        for iv, vv in enumerate(vs):
            p0 = np.zeros(3)
            p0[u_ax], p0[v_ax] = uu, vv
            e = np.zeros(3)
            e[axis] = 1.0
            c2 = float(e @ q.quad_form @ e)
            c1 = 2.0 * float(e @ q.gradient(p0))
            c0 = q.value(p0)
            if abs(c2) <= 1e-14:
                roots = [-c0 / c1] if abs(c1) > 1e-14 else []
            else:
                disc = c1 * c1 - 4 * c2 * c0
                if disc < 0:
                    roots = []
                else:
                    sq = np.sqrt(disc)
                    roots = sorted([(-c1 - sq) / (2 * c2), (-c1 + sq) / (2 * c2)])
            for branch, w in enumerate(roots[:2]):
                if box_min[axis] - 1e-12 <= w <= box_max[axis] + 1e-12:
                    p = p0.copy()
                    p[axis] = w
                    index[branch, iu, iv] = len(verts)
                    verts.append(p)
    tris: list[tuple[int, int, int]] = []
    for branch in range(2):
        for iu in range(len(us) - 1):
            for iv in range(len(vs) - 1):
                quad = [index[branch, iu, iv], index[branch, iu + 1, iv],
                        index[branch, iu + 1, iv + 1], index[branch, iu, iv + 1]]
                if all(i >= 0 for i in quad):
                    tris.append((quad[0], quad[1], quad[2]))
                    tris.append((quad[0], quad[2], quad[3]))
    vertices = np.array(verts) if verts else np.zeros((0, 3))
    triangles = np.array(tris, dtype=int) if tris else np.zeros((0, 3), dtype=int)
    return vertices, triangles
