import numpy as np
import pytest

import genpos as gp
from genpos.errors import InfeasibleStratumError, PreconditionError


class TestFeasibility:
    def test_known_feasible(self):
        assert gp.feasible_single(5, 2, 3, 1)

    def test_last_inequality_fails(self):
        assert not gp.feasible_single(3, 2, 2, 0)  # 2+2-0 = 4 > 3

    def test_r_above_d(self):
        assert not gp.feasible_single(4, 2, 2, 3)


class TestSingleFlagDim:
    def test_r_equals_d_reduces_to_smaller_grassmannian(self):
        # all 2-planes inside a fixed 3-space: dim = dim of the (3,2) space
        assert gp.single_flag_dim(5, 2, 3, 2) == 2
        assert gp.grassmannian_dim(3, 2) == 2

    def test_r_zero_open_stratum(self):
        assert gp.single_flag_dim(5, 2, 3, 0) == 6
        assert gp.grassmannian_dim(5, 2) == 6

    def test_middle_case(self):
        assert gp.single_flag_dim(4, 2, 2, 1) == 3

    def test_infeasible_raises(self):
        with pytest.raises(InfeasibleStratumError):
            gp.single_flag_dim(3, 2, 2, 0)

    def test_bounded_by_grassmannian_dim(self):
        # equality also holds on the boundary n+d-r = m, where the
        # incidence constraint is vacuous and the stratum is open
        for m, d, n, r in gp.feasible_singles(7):
            value = gp.single_flag_dim(m, d, n, r)
            assert value <= gp.grassmannian_dim(m, d)
            vacuous = (r == 0) or (n + d - r == m)
            assert (value == gp.grassmannian_dim(m, d)) == vacuous

    def test_strict_monotonicity_in_r(self):
        for m, d, n, r in gp.feasible_singles(8):
            if gp.feasible_single(m, d, n, r + 1):
                assert (gp.single_flag_dim(m, d, n, r + 1)
                        < gp.single_flag_dim(m, d, n, r))


class TestSingleFlagDimGeq:
    def test_known_value(self):
        assert gp.single_flag_dim_geq(4, 2, 2, 1) == 3

    def test_r_equals_d(self):
        assert gp.single_flag_dim_geq(5, 2, 3, 2) == 2

    def test_recursion_enumerates_exact_dims(self):
        # max over r' in {1,2,3} of the exact dims {8,5,0}
        exact = [gp.single_flag_dim(6, 3, 3, rp) for rp in (1, 2, 3)]
        assert exact == [8, 5, 0]
        assert gp.single_flag_dim_geq(6, 3, 3, 1) == 8

    def test_matches_closed_form_everywhere(self):
        for m, d, n, r in gp.feasible_singles(8):
            assert gp.single_flag_dim_geq(m, d, n, r) == gp.single_flag_dim(m, d, n, r)


class TestAffineSingleFlagBound:
    def test_lines_meeting_a_line_in_r3(self):
        assert gp.affine_single_flag_bound(3, 1, 1, 0) == 3

    def test_vacuous_constraint(self):
        # r = -1 puts no constraint: the whole affine-plane space
        # (feasible only while n+d+1 <= m)
        for m, d, n in [(3, 1, 1), (5, 2, 1), (6, 2, 3)]:
            assert (gp.affine_single_flag_bound(m, d, n, -1)
                    == gp.affine_grassmannian_dim(m, d))

    def test_lines_through_a_point(self):
        assert gp.affine_single_flag_bound(3, 1, 0, 0) == 2

    def test_dominates_linear_dim(self):
        for m, d, n, r in gp.feasible_singles(8):
            assert (gp.affine_single_flag_bound(m, d, n, r)
                    >= gp.single_flag_dim(m, d, n, r))

    def test_infeasible(self):
        with pytest.raises(InfeasibleStratumError):
            gp.affine_single_flag_bound(3, 2, 2, -1)  # 2+2+1 = 5 > 3


class TestTwoFlagDim:
    def test_product_of_two_line_spaces(self):
        assert gp.two_flag_dim(4, 2, 1, 2, 1) == 2
        assert (gp.grassmannian_dim(2, 1) + gp.grassmannian_dim(2, 1)) == 2

    def test_full_flags_are_points(self):
        assert gp.two_flag_dim(6, 3, 3, 2, 2) == 0

    def test_mixed(self):
        assert gp.two_flag_dim(6, 3, 1, 2, 1) == 3

    def test_product_dimension_everywhere(self):
        for m in range(2, 9):
            for n1 in range(1, m):
                for n2 in range(1, m - n1 + 1):
                    for r1 in range(0, n1 + 1):
                        for r2 in range(0, n2 + 1):
                            expected = ((n1 - r1) * r1 + (n2 - r2) * r2)
                            assert gp.two_flag_dim(m, n1, r1, n2, r2) == expected

    def test_hypothesis_violation(self):
        with pytest.raises(InfeasibleStratumError):
            gp.two_flag_dim(3, 2, 1, 2, 1)  # n1+n2 > m


class TestAffineTwoFlagBound:
    def test_transversals_to_two_skew_lines(self):
        assert gp.affine_two_flag_bound(3, 1, 0, 1, 0) == 2

    def test_full_r(self):
        assert gp.affine_two_flag_bound(6, 2, 2, 2, 2) == 0

    def test_known_value(self):
        assert gp.affine_two_flag_bound(5, 2, 0, 1, 0) == 3

    def test_requires_room_for_skewness(self):
        with pytest.raises(InfeasibleStratumError):
            gp.affine_two_flag_bound(3, 2, 0, 1, 0)  # m < n1+n2+1


class TestThreeFlagDim:
    def test_known_value(self):
        assert gp.three_flag_dim(4, 2, 2, 2, 1) == 1

    def test_r_zero(self):
        assert gp.three_flag_dim(6, 2, 2, 2, 0) == 0

    def test_empty(self):
        assert gp.three_flag_dim(6, 2, 2, 2, 1) is gp.EMPTY

    def test_matches_reduced_grassmannian(self):
        # the stratum is a copy of the r-planes of a (n1+n2+n3-m)-space
        for m, n1, n2, n3, r in [(4, 2, 2, 2, 1), (6, 3, 3, 2, 1), (6, 3, 3, 3, 1)]:
            w = n1 + n2 + n3 - m
            assert gp.three_flag_dim(m, n1, n2, n3, r) == gp.single_flag_dim(w, r, w, r)

    def test_negative_r(self):
        with pytest.raises(PreconditionError):
            gp.three_flag_dim(4, 2, 2, 2, -1)


class TestAffineThreeFlagBound:
    def test_transversals_to_three_skew_lines_in_r3(self):
        assert gp.affine_three_flag_bound(3, 1, 1, 1, 0) == 1

    def test_boundary_is_zero(self):
        m, n1, n2, n3 = 5, 2, 2, 1
        r = n1 + n2 + n3 + 1 - m
        assert gp.affine_three_flag_bound(m, n1, n2, n3, r) == 0

    def test_known_value(self):
        assert gp.affine_three_flag_bound(5, 2, 2, 1, 0) == 1

    def test_homogenization_index_shift(self):
        # affine (5; 2,2,1; 0) relates to linear (6; 3,3,2; 1)
        value = gp.three_flag_dim(6, 3, 3, 2, 1)
        assert value == 1
        assert gp.affine_three_flag_bound(5, 2, 2, 1, 0) == value

    def test_hypothesis_violation(self):
        with pytest.raises(InfeasibleStratumError):
            gp.affine_three_flag_bound(6, 1, 1, 1, 0)


class TestWitness:
    @pytest.mark.parametrize("m,d,n,r", [(4, 2, 2, 1), (5, 2, 3, 0),
                                         (6, 3, 3, 3), (7, 3, 4, 2)])
    def test_intersection_dimension_exact(self, m, d, n, r):
        for seed in range(3):
            vd, vn = gp.stratum_witness(m, d, n, r, seed)
            assert vd.dim == d and vn.dim == n
            assert gp.intersect_linear(vd, vn).dim == r

    def test_containment_case(self):
        vd, vn = gp.stratum_witness(5, 2, 3, 2, seed=1)
        assert gp.subspace_sum(vd, vn).dim == vn.dim  # Vd inside Vn

    def test_deterministic(self):
        a = gp.stratum_witness(5, 2, 3, 1, seed=9)
        b = gp.stratum_witness(5, 2, 3, 1, seed=9)
        assert np.array_equal(a[0].basis, b[0].basis)
        assert np.array_equal(a[1].basis, b[1].basis)

    def test_infeasible(self):
        with pytest.raises(InfeasibleStratumError):
            gp.stratum_witness(3, 2, 2, 0, seed=0)


class TestOracle:
    def test_middle_case(self):
        witness = gp.stratum_witness(4, 2, 2, 1, seed=13)
        assert gp.stratum_dim_oracle(4, 2, 2, 1, witness) == 3

    def test_open_stratum(self):
        witness = gp.stratum_witness(5, 2, 3, 0, seed=13)
        assert gp.stratum_dim_oracle(5, 2, 3, 0, witness) == gp.grassmannian_dim(5, 2)

    def test_containment_case(self):
        witness = gp.stratum_witness(5, 2, 3, 2, seed=13)
        assert gp.stratum_dim_oracle(5, 2, 3, 2, witness) == 2

    def test_wrong_witness_rejected(self):
        witness = gp.stratum_witness(4, 2, 2, 0, seed=1)
        with pytest.raises(PreconditionError):
            gp.stratum_dim_oracle(4, 2, 2, 1, witness)

    def test_agrees_with_formula_m_up_to_6(self):
        for m, d, n, r in gp.feasible_singles(6):
            for i in range(2):
                witness = gp.stratum_witness(m, d, n, r, seed=29 * m + i)
                assert (gp.stratum_dim_oracle(m, d, n, r, witness)
                        == gp.single_flag_dim(m, d, n, r)), (m, d, n, r)
