"""General-position perturbation of piecewise-linear maps on finite
simplicial complexes.

A map is specified by vertex images and is linear on every simplex.  The
pipeline subdivides the complex until every simplex has a small image,
then perturbs all vertex images by a seeded random displacement until a
set of rank predicates holds, and emits a machine-checkable certificate
with the dimension bound implied by the marked-subcomplex hull planes.

True algebraic independence of coordinates is undecidable numerically;
the predicates verified here are exactly the finitely many rank
conditions the constructions consume (general position, no four
coplanar points, independent line directions, pairwise/joint skewness
of marked hulls), which random displacements satisfy almost surely.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (CaseHypothesisError, PreconditionError, RetryBudgetError)
from .grassmann import (InfeasibleStratumError, affine_single_flag_bound,
                        affine_three_flag_bound, affine_two_flag_bound)
from .quadric import Segment3, transversals_to_four_segments
from .subspace import AffineFlat, affine_hull, jointly_skew, pairwise_skew
from .tolerance import DEFAULT_TOLERANCE, Tolerance, decided_rank

#: retry budget for predicate-constrained perturbation
RETRY_BUDGET = 64

#: absolute margin enforcing strict diameter inequalities
DIAMETER_MARGIN = 1e-12

_SUBDIVISION_CAP = 64


def _face_closure(simplices) -> set[tuple[str, ...]]:
    closed: set[tuple[str, ...]] = set()
    for simplex in simplices:
        verts = tuple(sorted(str(v) for v in simplex))
        if len(set(verts)) != len(verts):
            raise PreconditionError(f"simplex {verts} repeats a vertex")
        for size in range(1, len(verts) + 1):
            for face in itertools.combinations(verts, size):
                closed.add(face)
    return closed


def _sorted_simplices(simplices) -> tuple[tuple[str, ...], ...]:
    return tuple(sorted(simplices, key=lambda s: (len(s), s)))


@dataclass(frozen=True)
class PLMapSpec:
    """Abstract simplicial complex + marked subcomplexes + vertex images.

    ``simplices`` and every marked subcomplex are closed under faces at
    construction time; marked subcomplexes must be pairwise disjoint.
    ``images`` maps vertex id -> m-vector (stored as an array aligned
    with ``vertices``).
    """

    vertices: tuple[str, ...]
    simplices: tuple[tuple[str, ...], ...]
    marked: tuple[tuple[tuple[str, ...], ...], ...]
    image_array: np.ndarray = field(repr=False)

    def __post_init__(self):
        verts = tuple(str(v) for v in self.vertices)
        if len(set(verts)) != len(verts):
            raise PreconditionError("vertex ids must be unique")
        closed = _face_closure(self.simplices)
        closed.update((v,) for v in verts)
        vert_set = set(verts)
        for s in closed:
            for v in s:
                if v not in vert_set:
                    raise PreconditionError(f"simplex vertex {v!r} is not declared")
        marked_closed = []
        for sub in self.marked:
            sub_closed = _face_closure(sub)
            if not sub_closed <= closed:
                raise PreconditionError("marked subcomplex is not part of the complex")
            marked_closed.append(_sorted_simplices(sub_closed))
        for i in range(len(marked_closed)):
            for j in range(i + 1, len(marked_closed)):
                if set(marked_closed[i]) & set(marked_closed[j]):
                    raise PreconditionError(
                        f"marked subcomplexes {i} and {j} are not disjoint")
        img = np.asarray(self.image_array, dtype=float)
        if img.ndim != 2 or img.shape[0] != len(verts):
            raise PreconditionError("need one image vector per vertex")
        if not np.all(np.isfinite(img)):
            raise PreconditionError("non-finite vertex images")
        img.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "simplices", _sorted_simplices(closed))
        object.__setattr__(self, "marked", tuple(marked_closed))
        object.__setattr__(self, "image_array", img)

    @classmethod
    def build(cls, vertices, simplices, marked, images) -> "PLMapSpec":
        """Construct from any iterables; ``images`` maps id -> vector."""
        verts = tuple(str(v) for v in vertices)
        img = np.array([np.asarray(images[v], dtype=float).reshape(-1) for v in verts])
        return cls(verts, tuple(tuple(str(v) for v in s) for s in simplices),
                   tuple(tuple(tuple(str(v) for v in s) for s in sub) for sub in marked),
                   img)

    @property
    def ambient_dim(self) -> int:
        return self.image_array.shape[1]

    @property
    def dim(self) -> int:
        return max((len(s) for s in self.simplices), default=0) - 1

    def image_of(self, vertex: str) -> np.ndarray:
        return self.image_array[self.vertices.index(vertex)]

    def images(self) -> dict[str, np.ndarray]:
        return {v: self.image_array[i] for i, v in enumerate(self.vertices)}

    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def simplex_images(self, simplex: tuple[str, ...]) -> np.ndarray:
        idx = self.vertex_index()
        return self.image_array[[idx[v] for v in simplex]]

    def image_diameter(self, simplex: tuple[str, ...]) -> float:
        pts = self.simplex_images(simplex)
        if len(pts) == 1:
            return 0.0
        diffs = pts[:, None, :] - pts[None, :, :]
        return float(np.sqrt((diffs ** 2).sum(axis=2)).max())

    def max_image_diameter(self) -> float:
        return max(self.image_diameter(s) for s in self.simplices)

    def top_simplices(self, subcomplex=None) -> tuple[tuple[str, ...], ...]:
        """Simplices not strictly contained in another one."""
        sims = self.simplices if subcomplex is None else tuple(subcomplex)
        sets = [frozenset(s) for s in sims]
        tops = [s for s, fs in zip(sims, sets)
                if not any(fs < other for other in sets)]
        return tuple(tops)

    def marked_dims(self) -> tuple[int, ...]:
        return tuple(max(len(s) for s in sub) - 1 for sub in self.marked)

    def with_images(self, image_array: np.ndarray) -> "PLMapSpec":
        return PLMapSpec(self.vertices, self.simplices, self.marked,
                         np.asarray(image_array, dtype=float))


def _barycenter_id(simplex: tuple[str, ...]) -> str:
    if len(simplex) == 1:
        return simplex[0]
    return "(" + "+".join(simplex) + ")"


def barycentric_subdivide(spec: PLMapSpec) -> PLMapSpec:
    """Standard barycentric subdivision.

    The subdivision has one vertex per simplex (original vertices keep
    their ids and images, barycenters get the mean of their simplex's
    vertex images); its simplices are the chains of faces.  Marked
    subcomplexes map to their subdivided counterparts.
    """
    idx = spec.vertex_index()
    new_images: dict[str, np.ndarray] = {}
    for s in spec.simplices:
        new_images[_barycenter_id(s)] = spec.image_array[[idx[v] for v in s]].mean(axis=0)

    def chains_of(simplices) -> list[tuple[str, ...]]:
        out = []
        for top in spec.top_simplices(simplices):
            for perm in itertools.permutations(top):
                chain = tuple(_barycenter_id(tuple(sorted(perm[:i + 1])))
                              for i in range(len(perm)))
                out.append(chain)
        return out

    new_simplices = chains_of(spec.simplices)
    new_marked = tuple(chains_of(sub) for sub in spec.marked)
    new_vertices = tuple(sorted(new_images))
    image_array = np.array([new_images[v] for v in new_vertices])
    return PLMapSpec(new_vertices, tuple(new_simplices), new_marked, image_array)


def subdivide_until(spec: PLMapSpec, delta: float) -> PLMapSpec:
    """Iterate barycentric subdivision until every simplex image has
    diameter strictly below delta/2 (with an absolute safety margin)."""
    if not (delta > 0):
        raise PreconditionError("delta must be positive")
    current = spec
    for _ in range(_SUBDIVISION_CAP):
        if current.max_image_diameter() <= delta / 2.0 - DIAMETER_MARGIN:
            return current
        current = barycentric_subdivide(current)
    raise PreconditionError("subdivision cap exceeded; delta is pathologically small")


# ---------------------------------------------------------------------------
# degeneracy predicates
# ---------------------------------------------------------------------------

def _affinely_independent_all(subsets: np.ndarray, tol: Tolerance) -> bool:
    """subsets: (batch, k, m) point groups; True iff every group spans
    an affine (k-1)-flat."""
    diffs = subsets[:, 1:, :] - subsets[:, :1, :]
    svals = np.linalg.svd(diffs, compute_uv=False)
    cuts = np.maximum(tol.abs_floor, tol.rel_rank_threshold * svals[:, 0])
    ranks = (svals > cuts[:, None]).sum(axis=1)
    return bool(np.all(ranks == diffs.shape[1]))


def general_position(points, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """True iff every subset of at most m+1 points is affinely independent.

    A dependent subset of any size forces a dependent subset of size
    m+1 (or of the whole set when there are fewer points), so only the
    maximal-size subsets need checking.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise PreconditionError("general_position needs a nonempty point list")
    n_pts, m = pts.shape
    size = min(n_pts, m + 1)
    if size == 1:
        return True
    subsets = np.array([pts[list(c)] for c in itertools.combinations(range(n_pts), size)])
    return _affinely_independent_all(subsets, tol)


def no_four_coplanar(points, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """True iff no 2-plane in R^3 contains four of the six points."""
    pts = np.asarray(points, dtype=float)
    if pts.shape != (6, 3):
        raise PreconditionError("exactly six 3-points are required")
    quads = np.array([pts[list(c)] for c in itertools.combinations(range(6), 4)])
    return _affinely_independent_all(quads, tol)


def independent_directions(directions, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """True iff three 3-vectors are linearly independent; equivalently no
    2-plane is parallel to all three lines they direct."""
    dirs = np.asarray(directions, dtype=float)
    if dirs.shape != (3, 3):
        raise PreconditionError("exactly three 3-vectors are required")
    if np.any(np.linalg.norm(dirs, axis=1) <= DEFAULT_TOLERANCE.abs_floor):
        raise PreconditionError("zero direction vector")
    svals = np.linalg.svd(dirs, compute_uv=False)
    return decided_rank(svals, tol) == 3


def _group_hulls(points: np.ndarray, groups, tol: Tolerance
                 ) -> list[tuple[int, AffineFlat]]:
    return [(label, affine_hull(points[list(idxs)], tol)) for label, idxs in groups]


def _pred_general_position(points, groups, tol):
    return general_position(points, tol)


def _pred_no_four_coplanar(points, groups, tol):
    return no_four_coplanar(points, tol)


def _pred_independent_directions(points, groups, tol):
    pts = np.asarray(points, dtype=float)
    if pts.shape != (6, 3):
        raise PreconditionError("independent_directions predicate expects six 3-points")
    dirs = pts[1::2] - pts[0::2]
    return independent_directions(dirs, tol)


def _pred_pairwise_skew(points, groups, tol):
    hulls = _group_hulls(points, groups, tol)
    for (la, fa), (lb, fb) in itertools.combinations(hulls, 2):
        if la == lb:
            continue
        if not pairwise_skew(fa, fb, tol):
            return False
    return True


def _pred_jointly_skew(points, groups, tol):
    labels = sorted({label for label, _ in groups})
    if len(labels) < 2:
        return True
    flats = []
    for label in labels:
        idxs = sorted({i for l, g in groups if l == label for i in g})
        flats.append(affine_hull(points[idxs], tol))
    return jointly_skew(flats, tol)


#: registry of degeneracy predicates available to generic_perturb
PREDICATES = {
    "general_position": _pred_general_position,
    "no_four_coplanar": _pred_no_four_coplanar,
    "independent_directions": _pred_independent_directions,
    "pairwise_skew": _pred_pairwise_skew,
    "jointly_skew": _pred_jointly_skew,
}


def generic_perturb(points, eps: float, predicates, seed: int, *,
                    groups=(), tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Move every point by less than ``eps`` so all predicates hold.

    Fresh uniform displacements are drawn for up to RETRY_BUDGET
    attempts; the output is deterministic given the seed.  ``groups``
    supplies (label, point-index) pairs for the skewness predicates;
    pairs sharing a label are skipped in pairwise checks.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise PreconditionError("need a nonempty point list")
    if not (eps > 0):
        raise PreconditionError("eps must be positive")
    for name in predicates:
        if name not in PREDICATES:
            raise PreconditionError(f"unknown predicate {name!r}")
    rng = np.random.default_rng(seed)
    m = pts.shape[1]
    radius = eps / np.sqrt(m)
    for _ in range(RETRY_BUDGET):
        candidate = pts + rng.uniform(-radius, radius, size=pts.shape)
        if all(PREDICATES[name](candidate, groups, tol) for name in predicates):
            return candidate
    raise RetryBudgetError(
        f"no perturbation satisfying {list(predicates)} found in {RETRY_BUDGET} attempts")


# ---------------------------------------------------------------------------
# the perturbation pipeline and its certificates
# ---------------------------------------------------------------------------

#: headline bound formulas per case, as functions of (n, m, d)
CASE_BOUNDS = {
    "a": lambda n, m, d: 3 * n + 1 - m,
    "b": lambda n, m, d: 2 * n,
    "c": lambda n, m, d: n + d * (m - d),
    "d": lambda n, m, d: 0,
}

_CASE_MARKED = {"a": 3, "b": 2, "c": 1, "d": 4}


@dataclass(frozen=True)
class GPCertificate:
    """Machine-checkable record of one perturbation run."""

    case: str
    m: int
    n: int
    d: int | None
    delta: float
    seed: int
    hull_dims: tuple[int, ...]
    skew_pairwise: tuple[tuple[tuple[int, int], bool], ...]
    skew_joint: bool | None
    bound: int
    transversal_counts: tuple[tuple[tuple[tuple[str, ...], ...], int], ...]
    max_perturbation: float

    @property
    def all_pairwise_skew(self) -> bool:
        return all(ok for _, ok in self.skew_pairwise)


def _validate_case(spec: PLMapSpec, case: str, n: int, d: int):
    if case not in _CASE_MARKED:
        raise CaseHypothesisError(f"unknown case {case!r}")
    m = spec.ambient_dim
    k = len(spec.marked)
    if k != _CASE_MARKED[case]:
        raise CaseHypothesisError(
            f"case {case!r} needs {_CASE_MARKED[case]} marked subcomplexes, got {k}")
    dims = spec.marked_dims()
    if case == "d":
        if any(dim > 1 for dim in dims):
            raise CaseHypothesisError("case 'd' requires marked subcomplexes of dim <= 1")
        if m != 3:
            raise CaseHypothesisError("case 'd' requires ambient dimension 3")
        return
    if any(dim > n for dim in dims):
        raise CaseHypothesisError(f"marked subcomplex dimension exceeds n={n}")
    if case in ("a", "b") and m < 2 * n + 1:
        raise CaseHypothesisError(f"case {case!r} requires m >= 2n+1 = {2 * n + 1}")
    if case == "c":
        if d < 1 or d > m:
            raise CaseHypothesisError("case 'c' requires 1 <= d <= m")
        if m < n + d:
            # certified regime is m >= n+d; smaller m (even >= n+1) is refused
            raise CaseHypothesisError(
                f"case 'c' requires m >= n+d = {n + d}; m={m} is outside the "
                f"certified regime")


def perturb_pl_map(spec: PLMapSpec, case: str, delta: float, seed: int, *,
                   n: int | None = None, d: int = 1,
                   tol: Tolerance = DEFAULT_TOLERANCE
                   ) -> tuple[PLMapSpec, GPCertificate]:
    """Subdivide, perturb vertex images, and certify the dimension bound.

    The returned map is delta-close to the input (vertex images move by
    less than delta/2 and the map is linear on every simplex).  The
    certificate records the marked hull dimensions, the skewness facts
    the bound rests on, and for case 'd' the per-quadruple transversal
    counts.
    """
    if n is None:
        n = max(spec.marked_dims(), default=0)
        if case == "d":
            n = 1
    _validate_case(spec, case, n, d)
    if case != "c":
        d_record = None
    else:
        d_record = d
    fine = subdivide_until(spec, delta)
    groups = []
    idx = fine.vertex_index()
    for gi, sub in enumerate(fine.marked):
        for top in fine.top_simplices(sub):
            groups.append((gi, tuple(idx[v] for v in top)))
    predicates = ["general_position"] if case == "c" else ["general_position",
                                                           "pairwise_skew"]
    eps = 0.5 * delta * (1.0 - 1e-12)
    new_points = generic_perturb(fine.image_array, eps, predicates, seed,
                                 groups=groups, tol=tol)
    perturbed = fine.with_images(new_points)
    max_move = float(np.linalg.norm(new_points - fine.image_array, axis=1).max())

    hull_dims = []
    group_flats: dict[int, list[AffineFlat]] = {}
    for gi, sub in enumerate(perturbed.marked):
        dims = []
        flats = []
        for top in perturbed.top_simplices(sub):
            flat = affine_hull(perturbed.simplex_images(top), tol)
            dims.append(flat.dim)
            flats.append(flat)
        hull_dims.append(max(dims))
        group_flats[gi] = flats
    pair_report = []
    for i, j in itertools.combinations(range(len(perturbed.marked)), 2):
        ok = all(pairwise_skew(fa, fb, tol)
                 for fa in group_flats[i] for fb in group_flats[j])
        pair_report.append(((i, j), ok))
    if len(perturbed.marked) >= 2:
        whole = [affine_hull(np.concatenate(
            [perturbed.simplex_images(t) for t in perturbed.top_simplices(sub)]), tol)
            for sub in perturbed.marked]
        joint = jointly_skew(whole, tol)
    else:
        joint = None

    counts = []
    if case == "d":
        edge_groups = [[t for t in perturbed.top_simplices(sub) if len(t) == 2]
                       for sub in perturbed.marked]
        for quad in itertools.product(*edge_groups):
            segs = [Segment3(*perturbed.simplex_images(s)) for s in quad]
            result = transversals_to_four_segments(segs, tol)
            counts.append((tuple(quad), result.count))

    certificate = GPCertificate(
        case=case, m=perturbed.ambient_dim, n=n, d=d_record, delta=float(delta),
        seed=int(seed), hull_dims=tuple(hull_dims),
        skew_pairwise=tuple(pair_report), skew_joint=joint,
        bound=CASE_BOUNDS[case](n, perturbed.ambient_dim, d),
        transversal_counts=tuple(counts), max_perturbation=max_move)
    return perturbed, certificate


def recompute_bound(certificate: GPCertificate) -> int:
    """Re-derive the dimension bound from the recorded hull dimensions.

    Uses the affine stratum bounds on the certified hull planes and
    checks the result against the certificate's headline bound (an
    infeasible configuration means the incidence set is empty, reported
    as -1).  Raises on an inconsistent certificate.
    """
    if not certificate.all_pairwise_skew:
        raise PreconditionError("certificate skewness facts do not hold")
    m = certificate.m
    dims = certificate.hull_dims
    if certificate.case == "a":
        try:
            value = affine_three_flag_bound(m, dims[0], dims[1], dims[2], 0)
        except InfeasibleStratumError:
            value = -1
    elif certificate.case == "b":
        value = affine_two_flag_bound(m, dims[0], 0, dims[1], 0)
    elif certificate.case == "c":
        value = affine_single_flag_bound(m, certificate.d, dims[0], 0)
    elif certificate.case == "d":
        value = 0
    else:
        raise PreconditionError(f"unknown case {certificate.case!r}")
    if value > certificate.bound:
        raise PreconditionError(
            f"recomputed bound {value} exceeds the certified bound "
            f"{certificate.bound}")
    return value
