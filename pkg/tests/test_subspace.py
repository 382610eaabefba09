import numpy as np
import pytest

import genpos as gp
from genpos.errors import (AmbientMismatchError, EmptyFlatError,
                           NotContainedError, NotDisjointError, NotSkewError,
                           PreconditionError)


def random_subspace(m, k, rng):
    return gp.span_of(rng.standard_normal((m, k)))


class TestSpanOf:
    def test_collinear_input(self):
        u = gp.span_of([[1, 0, 0], [2, 0, 0]])
        assert u.dim == 1
        assert u.contains_vector([5, 0, 0])

    def test_empty_span(self):
        u = gp.span_of([], ambient_dim=4)
        assert u.dim == 0
        assert u.ambient_dim == 4

    def test_known_numerical_rank(self):
        # 50 random 6-vectors of rank 4 by construction (A @ B, inner dim 4)
        rng = np.random.default_rng(42)
        a = rng.standard_normal((6, 4))
        b = rng.standard_normal((4, 50))
        u = gp.span_of(a @ b)
        assert u.dim == 4

    def test_rejects_mixed_dims(self):
        with pytest.raises(AmbientMismatchError):
            gp.span_of([[1, 0], [1, 0, 0]])

    def test_rejects_non_finite(self):
        with pytest.raises(PreconditionError):
            gp.span_of([[np.nan, 0, 0]])


class TestSumIntersect:
    def test_axis_sum(self):
        u = gp.subspace_sum(gp.span_of([[1, 0, 0]]), gp.span_of([[0, 1, 0]]))
        assert u.dim == 2

    def test_sum_idempotent(self):
        rng = np.random.default_rng(0)
        u = random_subspace(5, 2, rng)
        assert gp.subspace_sum(u, u).dim == u.dim

    def test_constructed_overlap(self):
        # U, V of dim 2 in R^5 sharing exactly one direction by construction
        rng = np.random.default_rng(7)
        q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
        u = gp.LinSubspace(5, q[:, :2])
        shared = (q[:, 0] + q[:, 1]) / np.sqrt(2)  # generic vector of U
        v = gp.span_of(np.column_stack([shared, q[:, 3]]))
        assert gp.subspace_sum(u, v).dim == 3
        w = gp.intersect_linear(u, v)
        assert w.dim == 1
        assert w.contains_vector(shared)

    def test_plane_intersection(self):
        w = gp.intersect_linear(gp.span_of([[1, 0, 0], [0, 1, 0]]),
                                gp.span_of([[0, 1, 0], [0, 0, 1]]))
        assert w.dim == 1
        assert w.contains_vector([0, 1, 0])

    def test_intersection_with_zero(self):
        u = gp.span_of([[1, 0, 0], [0, 1, 0]])
        assert gp.intersect_linear(u, gp.LinSubspace.zero(3)).dim == 0

    def test_triple_intersection_dimension(self):
        # generic 2+2+2 in R^4: dim (V1 (+) V2) /\ V3 = 2+2+2-4 = 2
        rng = np.random.default_rng(11)
        v1 = random_subspace(4, 2, rng)
        v2 = random_subspace(4, 2, rng)
        v3 = random_subspace(4, 2, rng)
        w = gp.intersect_linear(gp.subspace_sum(v1, v2), v3)
        assert w.dim == 2

    def test_modular_law_random(self):
        rng = np.random.default_rng(123)
        for _ in range(50):
            m = rng.integers(2, 8)
            u = random_subspace(m, int(rng.integers(0, m + 1)), rng)
            v = random_subspace(m, int(rng.integers(0, m + 1)), rng)
            s = gp.subspace_sum(u, v)
            w = gp.intersect_linear(u, v)
            assert s.dim + w.dim == u.dim + v.dim

    def test_ambient_mismatch(self):
        with pytest.raises(AmbientMismatchError):
            gp.subspace_sum(gp.span_of([[1, 0]]), gp.span_of([[1, 0, 0]]))


class TestComplement:
    def test_axis(self):
        c = gp.orthogonal_complement(gp.span_of([[1, 0, 0]]))
        assert c.dim == 2
        assert abs(c.basis[0]).max() < 1e-12

    def test_zero_subspace(self):
        c = gp.orthogonal_complement(gp.LinSubspace.zero(5))
        assert c.dim == 5

    def test_random_orthogonality(self):
        rng = np.random.default_rng(5)
        u = random_subspace(7, 3, rng)
        v = gp.orthogonal_complement(u)
        assert v.dim == 4
        assert np.max(np.abs(u.basis.T @ v.basis)) <= 1e-12

    def test_involution(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            m = int(rng.integers(1, 8))
            u = random_subspace(m, int(rng.integers(0, m + 1)), rng)
            uu = gp.orthogonal_complement(gp.orthogonal_complement(u))
            assert uu.dim == u.dim
            assert gp.max_principal_angle(u, uu) <= 1e-9


class TestAffineHull:
    def test_two_points(self):
        f = gp.affine_hull([[0, 0, 0], [1, 0, 0]])
        assert f.dim == 1
        assert f.contains_point([7, 0, 0])

    def test_single_point(self):
        f = gp.affine_hull([[2.0, 3.0]])
        assert f.dim == 0
        assert np.allclose(f.base, [2, 3])

    def test_points_on_known_plane(self):
        # 4 points sampled from a constructed 2-plane in R^5
        rng = np.random.default_rng(3)
        base = rng.standard_normal(5)
        b1, b2 = rng.standard_normal(5), rng.standard_normal(5)
        pts = [base + a * b1 + b * b2 for a, b in [(0, 0), (1, 0), (0, 1), (2, -3)]]
        f = gp.affine_hull(pts)
        assert f.dim == 2
        for p in pts:
            assert f.contains_point(p)

    def test_empty_input(self):
        with pytest.raises(PreconditionError):
            gp.affine_hull(np.zeros((0, 3)))

    def test_canonical_base(self):
        f = gp.affine_hull([[1, 1, 0], [2, 1, 0]])
        assert abs(np.dot(f.base, f.direction.basis[:, 0])) < 1e-12
        assert np.allclose(f.base, [0, 1, 0])


class TestIntersectAffine:
    def x_axis(self):
        return gp.affine_hull([[0, 0, 0], [1, 0, 0]])

    def test_skew_lines_empty(self):
        other = gp.affine_hull([[0, 1, 0], [0, 1, 1]])
        w = gp.intersect_affine(self.x_axis(), other)
        assert w.is_empty and w.dim == -1

    def test_two_planes(self):
        z0 = gp.affine_hull([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
        y0 = gp.affine_hull([[0, 0, 0], [1, 0, 0], [0, 0, 1]])
        w = gp.intersect_affine(z0, y0)
        assert w.dim == 1
        assert w.contains_point([3, 0, 0])

    def test_generic_flats_dimension(self):
        # two random 3-flats in R^5 meet in dimension 3+3-5 = 1
        rng = np.random.default_rng(2024)
        for _ in range(100):
            f1 = gp.affine_hull(rng.standard_normal((4, 5)))
            f2 = gp.affine_hull(rng.standard_normal((4, 5)))
            assert gp.intersect_affine(f1, f2).dim == 1

    def test_empty_input_rejected(self):
        with pytest.raises(EmptyFlatError):
            gp.intersect_affine(self.x_axis(), gp.AffineFlat.empty(3))


class TestHomogenize:
    def test_point(self):
        f = gp.AffineFlat.from_point([1, 2])
        h = gp.homogenize(f)
        assert h.ambient_dim == 3 and h.dim == 1
        assert h.contains_vector(np.array([1, 2, 1]) / np.sqrt(6))

    def test_x_axis(self):
        f = gp.affine_hull([[0, 0], [1, 0]])
        h = gp.homogenize(f)
        assert h.dim == 2
        assert h.contains_vector([1, 0, 0])
        assert h.contains_vector([0, 0, 1])

    def test_skew_lines_homogenized(self):
        l1 = gp.affine_hull([[0, 0, 0], [1, 0, 0]])
        l2 = gp.affine_hull([[0, 1, 0], [0, 1, 1]])
        w = gp.intersect_linear(gp.homogenize(l1), gp.homogenize(l2))
        assert w.dim == 0  # = dim(P /\ Q) + 1 with empty intersection giving -1

    def test_incidence_shift(self):
        rng = np.random.default_rng(99)
        for _ in range(25):
            f1 = gp.affine_hull(rng.standard_normal((3, 4)))
            f2 = gp.affine_hull(rng.standard_normal((3, 4)))
            cross = gp.intersect_affine(f1, f2)
            h = gp.intersect_linear(gp.homogenize(f1), gp.homogenize(f2))
            if cross.is_empty:
                expected = gp.intersect_linear(f1.direction, f2.direction).dim
            else:
                expected = cross.dim + 1
            assert h.dim == expected

    def test_empty_rejected(self):
        with pytest.raises(EmptyFlatError):
            gp.homogenize(gp.AffineFlat.empty(3))


class TestSkewness:
    def test_two_skew_lines(self):
        l1 = gp.affine_hull([[0, 0, 0], [1, 0, 0]])
        l2 = gp.affine_hull([[0, 1, 0], [0, 1, 1]])
        assert gp.jointly_skew([l1, l2])
        assert gp.pairwise_skew(l1, l2)

    def test_intersecting_lines(self):
        l1 = gp.affine_hull([[0, 0, 0], [1, 0, 0]])
        l2 = gp.affine_hull([[0, 0, 0], [0, 1, 0]])
        assert not gp.jointly_skew([l1, l2])

    def test_three_rulings_pairwise_but_not_jointly(self):
        # rulings of x^2+y^2-z^2 = 1 at angles 0, 2pi/3, 4pi/3: every pair is
        # skew, but joint skewness needs hull dimension 5, impossible in R^3
        lines = []
        for theta in (0.0, 2 * np.pi / 3, 4 * np.pi / 3):
            p = np.array([np.cos(theta), np.sin(theta), 0.0])
            d = np.array([-np.sin(theta), np.cos(theta), 1.0])
            lines.append(gp.affine_hull([p, p + d]))
        for i in range(3):
            for j in range(i + 1, 3):
                assert gp.pairwise_skew(lines[i], lines[j])
        assert not gp.jointly_skew(lines)

    def test_pairwise_skew_definition(self):
        # jointly_skew on two flats == disjoint and direction-independent
        rng = np.random.default_rng(31)
        for _ in range(40):
            f1 = gp.affine_hull(rng.standard_normal((2, 4)))
            f2 = gp.affine_hull(rng.standard_normal((2, 4)))
            lhs = gp.jointly_skew([f1, f2])
            rhs = (gp.intersect_affine(f1, f2).is_empty
                   and gp.intersect_linear(f1.direction, f2.direction).dim == 0)
            assert lhs == rhs

    def test_needs_two_flats(self):
        with pytest.raises(PreconditionError):
            gp.jointly_skew([gp.affine_hull([[0, 0, 0], [1, 0, 0]])])


class TestBridgeSubspace:
    def test_basis_aligned(self):
        v1 = gp.span_of([[1, 0, 0, 0], [0, 1, 0, 0]])
        v2 = gp.span_of([[0, 0, 1, 0], [0, 0, 0, 1]])
        vr = gp.span_of([[1, 0, 1, 0]])
        w = gp.bridge_subspace(vr, v1, v2)
        assert w.dim == 2
        assert w.contains_vector([1, 0, 0, 0])
        assert w.contains_vector([0, 0, 1, 0])

    def test_zero_vr(self):
        v1 = gp.span_of([[1, 0, 0, 0]])
        v2 = gp.span_of([[0, 1, 0, 0]])
        w = gp.bridge_subspace(gp.LinSubspace.zero(4), v1, v2)
        assert w.dim == 0

    def test_random_dimension_conditions(self):
        rng = np.random.default_rng(55)
        for _ in range(30):
            q, _ = np.linalg.qr(rng.standard_normal((7, 7)))
            v1 = gp.LinSubspace(7, q[:, :3])
            v2 = gp.LinSubspace(7, q[:, 3:6])
            mix = v1.basis @ rng.standard_normal(3) + v2.basis @ rng.standard_normal(3)
            vr = gp.span_of([mix])
            w = gp.bridge_subspace(vr, v1, v2)
            assert w.dim == 2
            assert gp.intersect_linear(w, v1).dim == 1
            assert gp.intersect_linear(w, v2).dim == 1
            assert gp.subspace_sum(w, vr).dim == w.dim  # Vr inside W
            # swapping the two flags reproduces the same subspace
            w2 = gp.bridge_subspace(vr, v2, v1)
            assert gp.max_principal_angle(w, w2) <= 1e-8

    def test_nonzero_pairwise_intersection_rejected(self):
        v1 = gp.span_of([[1, 0, 0, 0], [0, 1, 0, 0]])
        v2 = gp.span_of([[0, 1, 0, 0], [0, 0, 1, 0]])
        vr = gp.span_of([[0, 0, 0, 1]])
        with pytest.raises(NotDisjointError):
            gp.bridge_subspace(vr, v1, v2)

    def test_vr_outside_sum_rejected(self):
        v1 = gp.span_of([[1, 0, 0, 0, 0]])
        v2 = gp.span_of([[0, 1, 0, 0, 0]])
        vr = gp.span_of([[0, 0, 1, 0, 0]])
        with pytest.raises(NotContainedError):
            gp.bridge_subspace(vr, v1, v2)


class TestBridgeFlat:
    def skew_lines(self):
        l1 = gp.affine_hull([[1, 0, 0], [1, 1, 1]])
        l2 = gp.affine_hull([[-1, 0, 0], [-1, 1, -1]])
        return l1, l2

    def test_point_on_transversal(self):
        # in R^3 a generic point admits exactly one transversal of two skew
        # lines; the bridge flat through it is that transversal
        l1, l2 = self.skew_lines()
        p = gp.AffineFlat.from_point([0.3, -0.2, 0.15])
        flat = gp.bridge_flat(p, l1, l2)
        assert flat is not None and flat.dim == 1
        assert gp.intersect_affine(flat, l1).dim == 0
        assert gp.intersect_affine(flat, l2).dim == 0
        assert flat.contains_point([0.3, -0.2, 0.15])

    def test_generic_point_in_r4_has_none(self):
        rng = np.random.default_rng(8)
        l1 = gp.affine_hull(rng.standard_normal((2, 4)))
        l2 = gp.affine_hull(rng.standard_normal((2, 4)))
        p = gp.AffineFlat.from_point(rng.standard_normal(4))
        assert gp.bridge_flat(p, l1, l2) is None

    def test_point_on_line_rejected(self):
        l1, l2 = self.skew_lines()
        p = gp.AffineFlat.from_point([1, 0, 0])
        with pytest.raises(NotSkewError):
            gp.bridge_flat(p, l1, l2)


class TestCanonicalForm:
    def test_base_orthogonal_to_direction(self):
        rng = np.random.default_rng(77)
        for _ in range(20):
            f = gp.affine_hull(rng.standard_normal((3, 5)) + 4.0)
            if f.direction.dim:
                assert np.max(np.abs(f.direction.basis.T @ f.base)) <= 1e-9
